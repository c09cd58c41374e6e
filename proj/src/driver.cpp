#include "netrisk/driver.hpp"

#include "netrisk/exact.hpp"
#include "netrisk/montecarlo.hpp"
#include "netrisk/poisson.hpp"
#include "netrisk/risk.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

namespace netrisk {

namespace {

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

const char* regime_str(Dependence d) {
  return d == Dependence::AsymptoticallyIndependent ? "independent"
                                                    : "dependent";
}

struct Row {
  std::string param;
  double value = 0.0;
  std::string quantity;
  std::string regime;
  std::string method;
  double point = 0.0;
  double error_radius = 0.0;
};

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& scenario_id,
            double alpha)
      : out_(path, std::ios::binary) {
    if (!out_)
      throw std::runtime_error("cannot open output file " + path.string());
    out_ << "# scenario=" << scenario_id << ",alpha=" << fmt(alpha)
         << ",schema_version=" << kSchemaVersion << "\n";
    out_ << "param,value,quantity,regime,method,point,error_radius\n";
  }

  void write(const Row& r) {
    out_ << r.param << ',' << fmt(r.value) << ',' << r.quantity << ','
         << r.regime << ',' << r.method << ',' << fmt(r.point) << ','
         << fmt(r.error_radius) << "\n";
  }

  void write_all(const std::vector<Row>& rows) {
    for (const auto& r : rows) write(r);
  }

 private:
  std::ofstream out_;
};

ExactOptions driver_exact_options() {
  ExactOptions o;
  o.allow_monte_carlo = true;  // cap overflow degrades to a flagged estimate
  o.mc_replicates = 200'000;
  return o;
}

/// Tail constants of the scenario's regime: per agent, systemic, uninsured.
std::vector<Row> constant_rows(const MarketScenario& s, const std::string& param,
                               double value, const ExactOptions& opts) {
  std::vector<Row> rows;
  const std::string regime = regime_str(s.claims.dependence);
  const bool ind = s.claims.dependence == Dependence::AsymptoticallyIndependent;
  for (long i = 0; i < s.agents(); ++i) {
    Row r{param, value, "C_agent_" + std::to_string(i), regime, "", 0.0, 0.0};
    if (ind) {
      r.point = individual_constant_ind(s, i);
      r.method = method_name(Method::ClosedForm);
    } else {
      const ScalarResult res = individual_constant_dep(s, i, opts);
      r.point = res.value;
      r.method = method_name(res.method);
      r.error_radius = res.error_radius;
    }
    rows.push_back(std::move(r));
  }
  {
    Row r{param, value, "C_systemic", regime, "", 0.0, 0.0};
    if (ind) {
      r.point = systemic_constant_ind(s, opts);
      r.method = method_name(Method::ClosedForm);
    } else {
      const ScalarResult res = systemic_constant_dep(s, opts);
      r.point = res.value;
      r.method = method_name(res.method);
      r.error_radius = res.error_radius;
    }
    rows.push_back(std::move(r));
  }
  try {
    const ScalarResult res = uninsured_constant(s, opts);
    rows.push_back({param, value, "B_uninsured", regime,
                    method_name(res.method), res.value, res.error_radius});
  } catch (const std::invalid_argument&) {
    // undefined for this weight scheme; omit the row
  }
  return rows;
}

std::filesystem::path prepare_out_dir(const DriverOptions& opts) {
  std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

double root(double c, double alpha) { return std::pow(c, 1.0 / alpha); }

}  // namespace

int run_exact(const RunConfig& cfg, const DriverOptions& dopts) {
  const MarketScenario& s = cfg.scenario;
  const ExactOptions opts = driver_exact_options();
  const auto dir = prepare_out_dir(dopts);
  CsvWriter csv(dir / "exact.csv", scenario_hash(s), s.claims.alpha);

  csv.write_all(constant_rows(s, "alpha", s.claims.alpha, opts));

  const std::string regime = regime_str(s.claims.dependence);
  const bool ind = s.claims.dependence == Dependence::AsymptoticallyIndependent;
  double systemic;
  Method sys_method = Method::ClosedForm;
  double sys_err = 0.0;
  if (ind) {
    systemic = systemic_constant_ind(s, opts);
  } else {
    const ScalarResult res = systemic_constant_dep(s, opts);
    systemic = res.value;
    sys_method = res.method;
    sys_err = res.error_radius;
  }
  for (double gamma : {0.05, 0.01, 0.001}) {
    csv.write({"gamma", gamma, "VaR_systemic", regime, method_name(sys_method),
               var_asymptotic(systemic, s.claims.alpha, gamma), sys_err});
    if (s.claims.alpha > 1.0)
      csv.write({"gamma", gamma, "CoTE_systemic", regime,
                 method_name(sys_method),
                 cote_asymptotic(systemic, s.claims.alpha, gamma), sys_err});
  }

  if (ind && s.norm.r == 1.0 && !s.norm.infinite &&
      s.weights.kind != WeightScheme::Kind::ExplicitWeights) {
    csv.write({"alpha", s.claims.alpha, "div_benefit", regime,
               method_name(Method::ClosedForm),
               diversification_benefit(s, opts), 0.0});
  }

  if (ind && s.weights.kind == WeightScheme::Kind::Proportional) {
    const SpectralMeasure sm = spectral_measure_ind(s, opts);
    for (std::size_t k = 0; k < sm.atoms.size(); ++k)
      csv.write({"atom", static_cast<double>(k),
                 "spectral_mass_" + std::to_string(k), regime,
                 method_name(Method::Enumeration), sm.atoms[k].mass, 0.0});
  }
  return kExitOk;
}

int run_sweep(const RunConfig& cfg, const DriverOptions& dopts) {
  if (!cfg.has_sweep)
    throw std::invalid_argument("config: sweep subcommand needs a sweep block");
  const ExactOptions opts = driver_exact_options();
  const auto dir = prepare_out_dir(dopts);
  CsvWriter csv(dir / "sweep.csv", scenario_hash(cfg.scenario),
                cfg.scenario.claims.alpha);

  const auto& grid = cfg.sweep.values;
  std::vector<std::vector<Row>> blocks(grid.size());
  // grid points are independent; compute them concurrently, write in order
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* env = std::getenv("RISK_ENGINE_THREADS")) {
    const long v = std::atol(env);
    if (v > 0) workers = static_cast<unsigned>(v);
  }
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  auto work = [&] {
    for (std::size_t k = next.fetch_add(1); k < grid.size();
         k = next.fetch_add(1)) {
      MarketScenario s = cfg.scenario;
      apply_sweep_value(s, cfg.sweep.parameter, grid[k]);
      auto rows = constant_rows(s, cfg.sweep.parameter, grid[k], opts);
      if (s.claims.dependence == Dependence::AsymptoticallyIndependent &&
          s.norm.r == 1.0 && !s.norm.infinite &&
          s.weights.kind != WeightScheme::Kind::ExplicitWeights) {
        try {
          rows.push_back({cfg.sweep.parameter, grid[k], "div_benefit",
                          regime_str(s.claims.dependence),
                          method_name(Method::ClosedForm),
                          diversification_benefit(s, opts), 0.0});
        } catch (const std::invalid_argument&) {
          // degenerate grid point (all constants vanish); omit the row
        }
      }
      blocks[k] = std::move(rows);
    }
  };
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& block : blocks) csv.write_all(block);
  return kExitOk;
}

int run_poisson(const RunConfig& cfg, const DriverOptions& dopts) {
  const MarketScenario& s = cfg.scenario;
  const auto dir = prepare_out_dir(dopts);
  CsvWriter csv(dir / "poisson.csv", scenario_hash(s), s.claims.alpha);
  const std::string regime = regime_str(s.claims.dependence);

  if (s.claims.dependence == Dependence::AsymptoticallyIndependent) {
    for (long i = 0; i < s.agents(); ++i) {
      const PoissonApprox a = approx_individual_constant(s, i);
      csv.write({"alpha", s.claims.alpha, "C_agent_" + std::to_string(i),
                 regime, "poisson", a.value, a.bound});
    }
    const PoissonApprox sys = approx_systemic_constant(s);
    csv.write({"alpha", s.claims.alpha, "C_systemic", regime, "poisson",
               sys.value, sys.bound});
  } else {
    const DepApprox a = approx_dep_constants(s);
    for (std::size_t i = 0; i < a.individual.size(); ++i)
      csv.write({"alpha", s.claims.alpha, "C_agent_" + std::to_string(i),
                 regime, "poisson", a.individual[i].value,
                 a.individual[i].bound});
    csv.write({"alpha", s.claims.alpha, "C_systemic", regime, "poisson",
               a.systemic.value, a.systemic.bound});
  }

  const UninsuredPoissonApprox u = uninsured_poisson(s);
  csv.write({"alpha", s.claims.alpha, "B_uninsured", "independent", "poisson",
             u.tail_constant_ind.value, u.tail_constant_ind.bound});
  csv.write({"alpha", s.claims.alpha, "B_uninsured", "dependent", "poisson",
             u.tail_constant_dep.value, u.tail_constant_dep.bound});
  const auto [lambda, tv] = noninsured_count_approx(s);
  csv.write({"alpha", s.claims.alpha, "noninsured_count_mean", regime,
             "poisson", lambda, tv});
  return kExitOk;
}

int run_mc(const RunConfig& cfg, const DriverOptions& dopts) {
  const MarketScenario& s = cfg.scenario;
  const ExactOptions opts = driver_exact_options();
  SimConfig sim = cfg.sim;
  if (sim.thresholds.empty()) sim.thresholds = default_thresholds(s);
  const auto dir = prepare_out_dir(dopts);
  CsvWriter csv(dir / "mc.csv", scenario_hash(s), s.claims.alpha);
  const std::string regime = regime_str(s.claims.dependence);
  const bool ind = s.claims.dependence == Dependence::AsymptoticallyIndependent;

  struct Check {
    std::string name;
    Target target;
    double exact = 0.0;
    bool have_exact = false;
  };
  std::vector<Check> checks;
  for (long i = 0; i < s.agents(); ++i) {
    Check c{"tail_agent_" + std::to_string(i), Target::agent_loss(i)};
    try {
      c.exact = ind ? individual_constant_ind(s, i)
                    : individual_constant_dep(s, i, opts).value;
      c.have_exact = true;
    } catch (const std::exception&) {
    }
    checks.push_back(std::move(c));
  }
  {
    Check c{"tail_aggregate", Target::aggregate()};
    try {
      c.exact = ind ? systemic_constant_ind(s, opts)
                    : systemic_constant_dep(s, opts).value;
      c.have_exact = true;
    } catch (const std::exception&) {
    }
    checks.push_back(std::move(c));
  }
  {
    Check c{"tail_uninsured", Target::uninsured()};
    try {
      c.exact = uninsured_constant(s, opts).value;
      c.have_exact = true;
    } catch (const std::exception&) {
    }
    checks.push_back(std::move(c));
  }

  bool all_pass = true;
  std::ostringstream failures;
  for (const auto& c : checks) {
    const auto curve = empirical_tail_constant(s, c.target, sim);
    for (const auto& e : curve)
      csv.write({"threshold", e.threshold, c.name, regime, "monte_carlo",
                 e.point, e.half_width});
    if (c.have_exact) {
      csv.write({"threshold", curve.back().threshold, c.name + "_ref", regime,
                 "exact", c.exact, 0.0});
      const auto& last = curve.back();
      const bool pass =
          std::abs(c.exact - last.point) <= last.half_width + dopts.tol;
      csv.write({"threshold", last.threshold, c.name + "_ci_pass", regime,
                 "monte_carlo", pass ? 1.0 : 0.0, 0.0});
      if (!pass) {
        all_pass = false;
        if (failures.tellp() > 0) failures << ",";
        failures << "{\"quantity\":\"" << c.name << "\",\"exact\":"
                 << fmt(c.exact) << ",\"estimate\":" << fmt(last.point)
                 << ",\"half_width\":" << fmt(last.half_width) << "}";
      }
    }
  }
  if (!all_pass) {
    std::cerr << "{\"error\":\"mc check failed\",\"failures\":["
              << failures.str() << "]}\n";
    return kExitMcCheck;
  }
  return kExitOk;
}

namespace {

MarketScenario homogeneous_scenario(double alpha, double p,
                                    Dependence dep =
                                        Dependence::AsymptoticallyIndependent) {
  MarketScenario s;
  s.edges = EdgeModel::homogeneous(5, 5, p);
  s.claims.alpha = alpha;
  s.claims.scales = VectorXd::Ones(5);
  s.claims.dependence = dep;
  s.weights = WeightScheme::proportional();
  s.norm = AggregationNorm::lp(1.0);
  return s;
}

MarketScenario toy_scenario(double alpha, double b,
                            Dependence dep =
                                Dependence::AsymptoticallyIndependent) {
  MarketScenario s;
  s.edges = EdgeModel::toy(b);
  s.claims.alpha = alpha;
  s.claims.scales = VectorXd::Ones(3);
  s.claims.dependence = dep;
  s.weights = WeightScheme::proportional();
  s.norm = AggregationNorm::lp(1.0);
  return s;
}

MarketScenario rasch_scenario(double alpha, const VectorXd& beta,
                              const VectorXd& delta) {
  MarketScenario s;
  s.edges = EdgeModel::rasch(beta, delta);
  s.claims.alpha = alpha;
  s.claims.scales = VectorXd::Ones(delta.size());
  s.claims.dependence = Dependence::AsymptoticallyIndependent;
  s.weights = WeightScheme::proportional();
  s.norm = AggregationNorm::lp(1.0);
  return s;
}

std::vector<double> grid01(double lo, double hi, double step) {
  std::vector<double> g;
  for (double x = lo; x <= hi + 1e-12; x += step)
    g.push_back(std::min(x, hi));
  return g;
}

std::string tag(double alpha) { return "[alpha=" + fmt(alpha) + "]"; }

}  // namespace

int run_figures(const RunConfig& cfg, const DriverOptions& dopts) {
  (void)cfg;  // the figure datasets use fixed canonical scenarios
  const ExactOptions opts = driver_exact_options();
  const auto dir = prepare_out_dir(dopts);
  const auto grid = grid01(0.0, 1.0, 0.01);

  {
    CsvWriter csv(dir / "toy_individual.csv",
                  scenario_hash(toy_scenario(1.0, 0.5)), 0.0);
    for (double alpha : {0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0})
      for (double b : grid) {
        const MarketScenario s = toy_scenario(alpha, b);
        csv.write({"toy_b", b, "C_agent_0_root" + tag(alpha), "independent",
                   method_name(Method::ClosedForm),
                   root(individual_constant_ind(s, 0), alpha), 0.0});
      }
  }

  {
    CsvWriter csv(dir / "homogeneous_individual.csv",
                  scenario_hash(homogeneous_scenario(1.0, 0.5)), 0.0);
    for (double alpha : {0.8, 1.0, 1.5, 3.0, 5.0})
      for (double p : grid) {
        const MarketScenario s = homogeneous_scenario(alpha, p);
        csv.write({"homogeneous_p", p, "C_agent_0_root" + tag(alpha),
                   "independent", method_name(Method::ClosedForm),
                   root(individual_constant_ind(s, 0), alpha), 0.0});
      }
  }

  {
    CsvWriter csv(dir / "ind_vs_dep.csv",
                  scenario_hash(homogeneous_scenario(1.0, 0.5)), 0.0);
    for (double alpha : {0.8, 1.0, 1.5, 3.0, 5.0})
      for (double p : grid) {
        const MarketScenario si = homogeneous_scenario(alpha, p);
        const MarketScenario sd =
            homogeneous_scenario(alpha, p, Dependence::FullyDependent);
        csv.write({"homogeneous_p", p, "C_agent_0_root" + tag(alpha),
                   "independent", method_name(Method::ClosedForm),
                   root(individual_constant_ind(si, 0), alpha), 0.0});
        csv.write({"homogeneous_p", p, "C_systemic_root" + tag(alpha),
                   "independent", method_name(Method::ClosedForm),
                   root(systemic_constant_ind(si, opts), alpha), 0.0});
        const ScalarResult ci = individual_constant_dep(sd, 0, opts);
        csv.write({"homogeneous_p", p, "C_agent_0_root" + tag(alpha),
                   "dependent", method_name(ci.method), root(ci.value, alpha),
                   ci.error_radius});
        const ScalarResult cs = systemic_constant_dep(sd, opts);
        csv.write({"homogeneous_p", p, "C_systemic_root" + tag(alpha),
                   "dependent", method_name(cs.method), root(cs.value, alpha),
                   cs.error_radius});
      }
  }

  const auto beta_grid = grid01(0.01, 1.0, 0.01);
  const struct {
    const char* file;
    VectorXd delta;
  } rasch_figs[] = {
      {"rasch_dominant_object.csv",
       (VectorXd(5) << 1.0, 0.1, 0.1, 0.1, 0.1).finished()},
      {"rasch_unattractive_object.csv",
       (VectorXd(5) << 0.1, 1.0, 1.0, 1.0, 1.0).finished()},
  };
  for (const auto& fig : rasch_figs) {
    CsvWriter csv(dir / fig.file,
                  scenario_hash(rasch_scenario(
                      1.0, VectorXd::Constant(5, 0.5), fig.delta)),
                  0.0);
    for (double alpha : {0.8, 1.0, 1.5, 3.0, 5.0})
      for (double beta : beta_grid) {
        const MarketScenario s =
            rasch_scenario(alpha, VectorXd::Constant(5, beta), fig.delta);
        csv.write({"rasch_beta_common", beta, "C_agent_0_root" + tag(alpha),
                   "independent", method_name(Method::ClosedForm),
                   root(individual_constant_ind(s, 0), alpha), 0.0});
      }
  }

  {
    CsvWriter csv(dir / "divben_homog_toy.csv",
                  scenario_hash(homogeneous_scenario(1.0, 0.5)), 0.0);
    for (double alpha : {0.7, 0.8, 1.0, 3.0, 5.0})
      for (double p : beta_grid) {
        csv.write({"homogeneous_p", p, "div_benefit_homog" + tag(alpha),
                   "independent", method_name(Method::ClosedForm),
                   diversification_benefit(homogeneous_scenario(alpha, p),
                                           opts),
                   0.0});
        csv.write({"toy_b", p, "div_benefit_toy" + tag(alpha), "independent",
                   method_name(Method::ClosedForm),
                   diversification_benefit(toy_scenario(alpha, p), opts),
                   0.0});
      }
  }

  {
    CsvWriter csv(dir / "rnorm_systemic.csv",
                  scenario_hash(homogeneous_scenario(1.0, 0.5)), 0.0);
    const struct {
      const char* label;
      AggregationNorm norm;
    } norms[] = {{"1", AggregationNorm::lp(1.0)},
                 {"2", AggregationNorm::lp(2.0)},
                 {"5", AggregationNorm::lp(5.0)},
                 {"10", AggregationNorm::lp(10.0)},
                 {"inf", AggregationNorm::max()}};
    for (double alpha : {0.8, 3.0})
      for (const auto& n : norms)
        for (double p : grid) {
          MarketScenario s = homogeneous_scenario(alpha, p);
          s.norm = n.norm;
          csv.write({"homogeneous_p", p,
                     std::string("C_systemic_root[r=") + n.label + "]" +
                         tag(alpha),
                     "independent", method_name(Method::ClosedForm),
                     root(systemic_constant_ind(s, opts), alpha), 0.0});
        }
  }

  {
    const VectorXd fixed = (VectorXd(5) << 0.1, 0.3, 0.5, 0.7, 0.9).finished();
    CsvWriter csv(dir / "divben_rasch.csv",
                  scenario_hash(rasch_scenario(1.0, fixed, fixed)), 0.0);
    for (double alpha : {0.7, 0.8, 1.0, 3.0, 5.0})
      for (double x : beta_grid) {
        csv.write({"rasch_delta_common", x,
                   "div_benefit_fixed_beta" + tag(alpha), "independent",
                   method_name(Method::ClosedForm),
                   diversification_benefit(
                       rasch_scenario(alpha, fixed, VectorXd::Constant(5, x)),
                       opts),
                   0.0});
        csv.write({"rasch_beta_common", x,
                   "div_benefit_fixed_delta" + tag(alpha), "independent",
                   method_name(Method::ClosedForm),
                   diversification_benefit(
                       rasch_scenario(alpha, VectorXd::Constant(5, x), fixed),
                       opts),
                   0.0});
      }
  }

  return kExitOk;
}

}  // namespace netrisk
