#pragma once

#include "netrisk/json_io.hpp"

#include <string>

namespace netrisk {

struct DriverOptions {
  std::string out_dir = ".";
  double tol = 0.0;  // extra slack on mc confidence-interval checks
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMcCheck = 3;

int run_exact(const RunConfig& cfg, const DriverOptions& opts);
int run_sweep(const RunConfig& cfg, const DriverOptions& opts);
int run_poisson(const RunConfig& cfg, const DriverOptions& opts);
int run_mc(const RunConfig& cfg, const DriverOptions& opts);
int run_figures(const RunConfig& cfg, const DriverOptions& opts);

}  // namespace netrisk
