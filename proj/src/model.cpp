#include "netrisk/model.hpp"

#include <algorithm>
#include <sstream>

namespace netrisk {

EdgeModel EdgeModel::explicit_probs(MatrixXd probs) {
  EdgeModel m;
  m.kind = Kind::Explicit;
  m.p = std::move(probs);
  return m;
}

EdgeModel EdgeModel::deterministic(MatrixXd adjacency01) {
  EdgeModel m;
  m.kind = Kind::Deterministic;
  m.p = std::move(adjacency01);
  return m;
}

EdgeModel EdgeModel::toy(double b) {
  EdgeModel m;
  m.kind = Kind::Toy;
  m.toy_b = b;
  return m;
}

EdgeModel EdgeModel::homogeneous(long q, long d, double p) {
  EdgeModel m;
  m.kind = Kind::Homogeneous;
  m.hom_q = q;
  m.hom_d = d;
  m.hom_p = p;
  return m;
}

EdgeModel EdgeModel::rasch(VectorXd beta, VectorXd delta) {
  EdgeModel m;
  m.kind = Kind::Rasch;
  m.beta = std::move(beta);
  m.delta = std::move(delta);
  return m;
}

long EdgeModel::agents() const {
  switch (kind) {
    case Kind::Toy: return 3;
    case Kind::Homogeneous: return hom_q;
    case Kind::Rasch: return beta.size();
    default: return p.rows();
  }
}

long EdgeModel::objects() const {
  switch (kind) {
    case Kind::Toy: return 3;
    case Kind::Homogeneous: return hom_d;
    case Kind::Rasch: return delta.size();
    default: return p.cols();
  }
}

MatrixXd materialize_probabilities(const EdgeModel& model) {
  switch (model.kind) {
    case EdgeModel::Kind::Explicit:
    case EdgeModel::Kind::Deterministic:
      return model.p;
    case EdgeModel::Kind::Toy: {
      const double b = model.toy_b;
      MatrixXd p(3, 3);
      // cyclic pattern: each agent insures "its" object surely, the next with
      // probability b and the last with probability b^2
      p << 1.0, b, b * b,
           b * b, 1.0, b,
           b, b * b, 1.0;
      return p;
    }
    case EdgeModel::Kind::Homogeneous:
      return MatrixXd::Constant(model.hom_q, model.hom_d, model.hom_p);
    case EdgeModel::Kind::Rasch: {
      const long q = model.beta.size();
      const long d = model.delta.size();
      MatrixXd p(q, d);
      for (long i = 0; i < q; ++i) {
        for (long j = 0; j < d; ++j) {
          const double pij = model.beta(i) * model.delta(j);
          if (pij > 1.0) {
            std::ostringstream os;
            os << "rasch: beta(" << i << ")*delta(" << j << ") = " << pij
               << " exceeds 1";
            throw std::invalid_argument(os.str());
          }
          p(i, j) = pij;
        }
      }
      return p;
    }
  }
  throw std::logic_error("unreachable edge model kind");
}

WeightScheme WeightScheme::proportional() { return WeightScheme{}; }

WeightScheme WeightScheme::compensated(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("compensated weights need r > 0");
  WeightScheme s;
  s.kind = Kind::Compensated;
  s.r = r;
  return s;
}

WeightScheme WeightScheme::explicit_weights(MatrixXd w) {
  WeightScheme s;
  s.kind = Kind::ExplicitWeights;
  s.w = std::move(w);
  return s;
}

double WeightScheme::weight(long i, long j, long deg) const {
  if (deg <= 0) return 0.0;  // 0/0 := 0 convention
  switch (kind) {
    case Kind::Proportional: return 1.0 / static_cast<double>(deg);
    case Kind::Compensated:
      return std::pow(static_cast<double>(deg), 1.0 - 1.0 / r);
    case Kind::ExplicitWeights: return w(i, j);
  }
  throw std::logic_error("unreachable weight scheme kind");
}

AggregationNorm AggregationNorm::lp(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("norm parameter r must be > 0");
  AggregationNorm n;
  n.r = r;
  return n;
}

AggregationNorm AggregationNorm::max() {
  AggregationNorm n;
  n.infinite = true;
  n.r = std::numeric_limits<double>::infinity();
  return n;
}

double AggregationNorm::operator()(const VectorXd& x) const {
  if (infinite) return x.cwiseAbs().maxCoeff();
  if (r == 1.0) return x.cwiseAbs().sum();
  if (r == 2.0) return x.norm();
  double acc = 0.0;
  for (long i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x(i)), r);
  return std::pow(acc, 1.0 / r);
}

namespace {

void check_probability_entries(const MatrixXd& p, std::vector<std::string>& out) {
  for (long i = 0; i < p.rows(); ++i)
    for (long j = 0; j < p.cols(); ++j)
      if (!(p(i, j) >= 0.0 && p(i, j) <= 1.0)) {
        std::ostringstream os;
        os << "edge probability p(" << i << "," << j << ") = " << p(i, j)
           << " outside [0,1]";
        out.push_back(os.str());
      }
}

}  // namespace

std::vector<std::string> validate_scenario(const MarketScenario& s) {
  std::vector<std::string> v;

  if (!(s.claims.alpha > 0.0)) v.push_back("alpha must be positive");
  if (s.claims.scales.size() < 1) v.push_back("need at least one object (d >= 1)");
  for (long j = 0; j < s.claims.scales.size(); ++j)
    if (!(s.claims.scales(j) > 0.0)) {
      std::ostringstream os;
      os << "claim scale K(" << j << ") = " << s.claims.scales(j)
         << " must be positive";
      v.push_back(os.str());
    }

  const long q = s.edges.agents();
  const long d = s.edges.objects();
  if (q < 1) v.push_back("need at least one agent (q >= 1)");
  if (s.claims.scales.size() != d) {
    std::ostringstream os;
    os << "claim dimension " << s.claims.scales.size()
       << " does not match object count " << d;
    v.push_back(os.str());
  }

  switch (s.edges.kind) {
    case EdgeModel::Kind::Explicit:
      check_probability_entries(s.edges.p, v);
      break;
    case EdgeModel::Kind::Deterministic:
      for (long i = 0; i < s.edges.p.rows(); ++i)
        for (long j = 0; j < s.edges.p.cols(); ++j)
          if (s.edges.p(i, j) != 0.0 && s.edges.p(i, j) != 1.0) {
            std::ostringstream os;
            os << "deterministic model entry (" << i << "," << j
               << ") must be 0 or 1";
            v.push_back(os.str());
          }
      break;
    case EdgeModel::Kind::Toy:
      if (!(s.edges.toy_b >= 0.0 && s.edges.toy_b <= 1.0))
        v.push_back("toy parameter b must lie in [0,1]");
      break;
    case EdgeModel::Kind::Homogeneous:
      if (!(s.edges.hom_p >= 0.0 && s.edges.hom_p <= 1.0))
        v.push_back("homogeneous probability p must lie in [0,1]");
      break;
    case EdgeModel::Kind::Rasch:
      for (long i = 0; i < s.edges.beta.size(); ++i)
        for (long j = 0; j < s.edges.delta.size(); ++j)
          if (s.edges.beta(i) * s.edges.delta(j) > 1.0) {
            std::ostringstream os;
            os << "rasch product beta(" << i << ")*delta(" << j << ") = "
               << s.edges.beta(i) * s.edges.delta(j) << " exceeds 1";
            v.push_back(os.str());
          }
      break;
  }

  switch (s.weights.kind) {
    case WeightScheme::Kind::Proportional:
      break;
    case WeightScheme::Kind::Compensated:
      if (!(s.weights.r > 0.0)) v.push_back("compensated weights need r > 0");
      break;
    case WeightScheme::Kind::ExplicitWeights: {
      const MatrixXd& w = s.weights.w;
      if (w.rows() != q || w.cols() != d) {
        v.push_back("explicit weight matrix shape does not match q x d");
        break;
      }
      for (long i = 0; i < q; ++i)
        for (long j = 0; j < d; ++j)
          if (!(w(i, j) >= 0.0)) {
            std::ostringstream os;
            os << "weight W(" << i << "," << j << ") must be nonnegative";
            v.push_back(os.str());
          }
      // column sums over the support of each object's potential insurers
      try {
        MatrixXd p = materialize_probabilities(s.edges);
        for (long j = 0; j < d; ++j) {
          double colsum = 0.0;
          for (long i = 0; i < q; ++i)
            if (p(i, j) > 0.0) colsum += w(i, j);
          if (colsum > 1.0 + 1e-12) {
            std::ostringstream os;
            os << "explicit weight column sum " << colsum << " for object " << j
               << " exceeds 1";
            v.push_back(os.str());
          }
        }
      } catch (const std::exception&) {
        // probability materialization failures are reported above
      }
      break;
    }
  }

  if (!(s.norm.infinite || s.norm.r > 0.0))
    v.push_back("aggregation norm parameter must be positive or infinite");

  return v;
}

void require_valid(const MarketScenario& s) {
  auto v = validate_scenario(s);
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& msg : v) os << "\n  - " << msg;
  throw std::invalid_argument(os.str());
}

}  // namespace netrisk
