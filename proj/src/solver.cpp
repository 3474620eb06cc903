#include "crossnet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crossnet/error.hpp"
#include "crossnet/io.hpp"
#include "crossnet/rng.hpp"

namespace crossnet {

namespace {

// The membership factor as seen by the consistency term: Q*X (or R*X) when
// normalization is on, X itself otherwise.
struct ConsistencyView {
  Matrix M;
  Vector scale;  // diagonal of Q/R; all ones when normalization is off
};

ConsistencyView consistency_view(const Matrix& x, const SolverConfig& cfg) {
  ConsistencyView v;
  if (cfg.normalize_consistency) {
    auto q = row_normalizer(x, cfg.epsilon);
    v.M = q.apply(x);
    v.scale = std::move(q.diagonal);
  } else {
    v.M = x;
    v.scale = Vector::Ones(x.rows());
  }
  return v;
}

// Rows are processed in blocks so no n x n temporary is ever materialized.
constexpr Eigen::Index kBlockRows = 32;

// ||base - L R^T||^2.
double residual_norm(const Matrix& base, const Matrix& l, const Matrix& rt) {
  double total = 0.0;
  Matrix block;
  for (Eigen::Index r = 0; r < l.rows(); r += kBlockRows) {
    const Eigen::Index rows = std::min(kBlockRows, l.rows() - r);
    block = base.middleRows(r, rows);
    block.noalias() -= l.middleRows(r, rows) * rt;
    total += block.squaredNorm();
  }
  return total;
}

double consistency_term(const Matrix& m, const Matrix& s, ConsistencyForm form) {
  if (form == ConsistencyForm::UserSimilarity) {
    const Matrix mt = m.transpose(), st = s.transpose();
    double total = 0.0;
    Matrix block;
    for (Eigen::Index r = 0; r < m.rows(); r += kBlockRows) {
      const Eigen::Index rows = std::min(kBlockRows, m.rows() - r);
      block.noalias() = m.middleRows(r, rows) * mt;
      block.noalias() -= s.middleRows(r, rows) * st;
      total += block.squaredNorm();
    }
    return total;
  }
  Matrix diff = m.transpose() * m;
  diff.noalias() -= s.transpose() * s;
  return diff.squaredNorm();
}

// Negative (attracting) and positive (repelling) parts of the consistency
// term's gradient with respect to the raw factor X, up to a common factor.
struct GradientSplit {
  Matrix numerator;
  Matrix denominator;
};

GradientSplit consistency_split(const Matrix& x, const Matrix& s, const SolverConfig& cfg) {
  const ConsistencyView v = consistency_view(x, cfg);
  const Matrix& m = v.M;
  Matrix pull;
  if (cfg.consistency == ConsistencyForm::UserSimilarity) {
    pull = s * (s.transpose() * m);
  } else {
    pull = m * (s.transpose() * s);
  }
  Matrix push = m * (m.transpose() * m);

  GradientSplit out;
  if (cfg.normalize_consistency && cfg.normalization_chain_rule) {
    // d/dX_ij of g(QX) = q_i (G_ij - sum_l G_il M_il) for G = dg/dM.
    const Vector pull_dot = (pull.array() * m.array()).rowwise().sum();
    const Vector push_dot = (push.array() * m.array()).rowwise().sum();
    out.numerator = v.scale.asDiagonal() * (pull.colwise() + push_dot);
    out.denominator = v.scale.asDiagonal() * (push.colwise() + pull_dot);
  } else {
    out.numerator = v.scale.asDiagonal() * pull;
    out.denominator = v.scale.asDiagonal() * push;
  }
  return out;
}

void multiplicative_update(Matrix& x, const Matrix& numerator, const Matrix& denominator, const SolverConfig& cfg) {
  x.array() *= (numerator.array() / (denominator.array() + cfg.epsilon)).sqrt();
  x = x.cwiseMax(cfg.floor);
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) fail(ErrorKind::Numerical, "NumericalBlowup", std::string("non-finite entries in ") + what);
}

void check_dims(const MultiplexNetwork& net, const FactorSet& f, const SolverConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(net.n());
  const auto k = static_cast<Eigen::Index>(cfg.k);
  bool ok = f.U.size() == net.p() && f.H.size() == net.p() && f.W.size() == net.q() && f.S.rows() == n &&
            f.S.cols() == k && cfg.a.size() == net.p() && cfg.c.size() == net.p() && cfg.b.size() == net.q() &&
            cfg.d.size() == net.q();
  for (std::size_t t = 0; ok && t < net.p(); ++t) {
    ok = f.U[t].rows() == n && f.U[t].cols() == k && f.H[t].rows() == k && f.H[t].cols() == k;
  }
  for (std::size_t g = 0; ok && g < net.q(); ++g) ok = f.W[g].rows() == n && f.W[g].cols() == k;
  if (!ok) fail(ErrorKind::Usage, "DimensionMismatch", "factor/config dimensions do not match the network");
}

}  // namespace

SolverConfig SolverConfig::defaults_for(const MultiplexNetwork& net, std::size_t k) {
  SolverConfig cfg;
  cfg.k = k;
  cfg.a.assign(net.p(), 1.0);
  cfg.c.assign(net.p(), 1.0);
  cfg.b.assign(net.q(), 1.0);
  cfg.d.assign(net.q(), 1.0);
  return cfg;
}

void SolverConfig::validate(const MultiplexNetwork& net) const {
  auto bad = [](const std::string& msg) { fail(ErrorKind::Usage, "InvalidConfig", msg); };
  if (k < 2) bad("k must be >= 2");
  if (a.size() != net.p() || c.size() != net.p()) bad("a and c need one weight per directed layer");
  if (b.size() != net.q() || d.size() != net.q()) bad("b and d need one weight per symmetric layer");
  auto nonneg = [](const std::vector<double>& v) {
    for (double x : v)
      if (!(x >= 0.0) || !std::isfinite(x)) return false;
    return true;
  };
  if (!nonneg(a) || !nonneg(b) || !nonneg(c) || !nonneg(d)) bad("weights must be finite and >= 0");
  auto any_positive = [](const std::vector<double>& x, const std::vector<double>& y) {
    for (double v : x)
      if (v > 0) return true;
    for (double v : y)
      if (v > 0) return true;
    return false;
  };
  if (net.p() > 0 && !any_positive(a, c)) bad("directed layers need a nonzero a or c weight");
  if (net.q() > 0 && !any_positive(b, d)) bad("symmetric layers need a nonzero b or d weight");
  if (!(rel_tol > 0.0)) bad("rel_tol must be > 0");
  if (!(epsilon > 0.0 && epsilon <= 1e-6)) bad("epsilon must lie in (0, 1e-6]");
  if (!(floor >= 0.0)) bad("floor must be >= 0");
}

bool FactorSet::nonnegative() const {
  for (const auto& m : U)
    if (!all_nonnegative(m)) return false;
  for (const auto& m : H)
    if (!all_nonnegative(m)) return false;
  for (const auto& m : W)
    if (!all_nonnegative(m)) return false;
  return all_nonnegative(S);
}

ObjectiveTerms objective_terms(const MultiplexNetwork& net, const FactorSet& f, const SolverConfig& cfg) {
  check_dims(net, f, cfg);
  ObjectiveTerms terms;
  for (std::size_t t = 0; t < net.p(); ++t) {
    const Matrix& u = f.U[t];
    const Matrix hut = f.H[t] * u.transpose();
    terms.directed += cfg.a[t] * residual_norm(net.directed[t].weights, u, hut);
    terms.directed_consistency += cfg.c[t] * consistency_term(consistency_view(u, cfg).M, f.S, cfg.consistency);
  }
  for (std::size_t g = 0; g < net.q(); ++g) {
    const Matrix& w = f.W[g];
    terms.symmetric += cfg.b[g] * residual_norm(net.symmetric[g].weights, w, w.transpose());
    terms.symmetric_consistency += cfg.d[g] * consistency_term(consistency_view(w, cfg).M, f.S, cfg.consistency);
  }
  return terms;
}

double objective(const MultiplexNetwork& net, const FactorSet& f, const SolverConfig& cfg) {
  return objective_terms(net, f, cfg).total();
}

FactorSet update_step(const MultiplexNetwork& net, FactorSet f, const SolverConfig& cfg) {
  check_dims(net, f, cfg);

  for (std::size_t t = 0; t < net.p(); ++t) {
    const Matrix& adj = net.directed[t].weights;
    Matrix& u = f.U[t];
    Matrix& h = f.H[t];
    {
      const Matrix gram = u.transpose() * u;
      Matrix numerator = cfg.a[t] * ((adj * u) * h.transpose() + (adj.transpose() * u) * h);
      Matrix denominator = cfg.a[t] * (u * (h * gram * h.transpose()) + u * (h.transpose() * gram * h));
      if (cfg.c[t] > 0.0) {
        const GradientSplit split = consistency_split(u, f.S, cfg);
        numerator += 2.0 * cfg.c[t] * split.numerator;
        denominator += 2.0 * cfg.c[t] * split.denominator;
      }
      multiplicative_update(u, numerator, denominator, cfg);
      check_finite(u, "U");
    }
    {
      const Matrix gram = u.transpose() * u;
      const Matrix numerator = u.transpose() * adj * u;
      const Matrix denominator = gram * h * gram;
      multiplicative_update(h, numerator, denominator, cfg);
      check_finite(h, "H");
    }
  }

  for (std::size_t g = 0; g < net.q(); ++g) {
    const Matrix& sim = net.symmetric[g].weights;
    Matrix& w = f.W[g];
    Matrix numerator = cfg.b[g] * (sim * w);
    Matrix denominator = cfg.b[g] * (w * (w.transpose() * w));
    if (cfg.d[g] > 0.0) {
      const GradientSplit split = consistency_split(w, f.S, cfg);
      numerator += cfg.d[g] * split.numerator;
      denominator += cfg.d[g] * split.denominator;
    }
    multiplicative_update(w, numerator, denominator, cfg);
    check_finite(w, "W");
  }

  double total_weight = 0.0;
  Matrix numerator = Matrix::Zero(f.S.rows(), f.S.cols());
  auto accumulate = [&](const Matrix& x, double weight) {
    if (weight <= 0.0) return;
    const Matrix m = consistency_view(x, cfg).M;
    if (cfg.consistency == ConsistencyForm::UserSimilarity) {
      numerator.noalias() += weight * (m * (m.transpose() * f.S));
    } else {
      numerator.noalias() += weight * (f.S * (m.transpose() * m));
    }
    total_weight += weight;
  };
  for (std::size_t t = 0; t < net.p(); ++t) accumulate(f.U[t], cfg.c[t]);
  for (std::size_t g = 0; g < net.q(); ++g) accumulate(f.W[g], cfg.d[g]);
  if (total_weight > 0.0) {
    const Matrix denominator = total_weight * (f.S * (f.S.transpose() * f.S));
    multiplicative_update(f.S, numerator, denominator, cfg);
    check_finite(f.S, "S");
  }
  return f;
}

FactorSet initialize_factors(const MultiplexNetwork& net, const SolverConfig& cfg) {
  Rng rng(cfg.rng_seed);
  const auto n = static_cast<Eigen::Index>(net.n());
  const auto k = static_cast<Eigen::Index>(cfg.k);
  auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform_open_closed();
    return m;
  };
  FactorSet f;
  for (std::size_t t = 0; t < net.p(); ++t) {
    f.U.push_back(draw(n, k));
    f.H.push_back(draw(k, k));
  }
  for (std::size_t g = 0; g < net.q(); ++g) f.W.push_back(draw(n, k));
  f.S = normalize_rows(draw(n, k), cfg.epsilon);
  return f;
}

SolveResult solve(const MultiplexNetwork& net, const SolverConfig& cfg) {
  if (net.p() == 0 && net.q() == 0) fail(ErrorKind::Data, "NoLayers", "network has no layers");
  cfg.validate(net);

  SolveResult result;
  result.factors = initialize_factors(net, cfg);
  double previous = objective(net, result.factors, cfg);
  result.trace.objective_per_iter.push_back(previous);

  for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
    result.factors = update_step(net, std::move(result.factors), cfg);
    const double current = objective(net, result.factors, cfg);
    if (!std::isfinite(current)) fail(ErrorKind::Numerical, "NumericalBlowup", "objective became non-finite");
    result.trace.objective_per_iter.push_back(current);
    ++result.trace.iterations_run;
    const double change = previous > 0.0 ? std::abs(previous - current) / previous : 0.0;
    previous = current;
    if (change < cfg.rel_tol) {
      result.trace.converged = true;
      break;
    }
  }
  result.assignment = CommunityAssignment::from_membership(result.factors.S);
  return result;
}

std::string trace_csv(const SolveTrace& trace) {
  std::ostringstream out;
  out << "iter,objective\n";
  for (std::size_t i = 0; i < trace.objective_per_iter.size(); ++i) {
    out << i << ',' << format_fixed(trace.objective_per_iter[i]) << '\n';
  }
  return out.str();
}

}  // namespace crossnet
