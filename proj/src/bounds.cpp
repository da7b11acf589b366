#include "rangekit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rangekit::bounds {

namespace {

constexpr double kCertTol = 1e-6;

void require_same_dim(int a, int b, const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Greedy randomized-NP fill over generic outcomes (probability under the
// null q, under the alternative s). Outcomes with smaller likelihood ratio
// s/q are preferred for declaring absent. Ties within a relative tolerance
// form one group that receives a uniform fractional weight; q-free
// outcomes can absorb no budget and never receive weight.
struct GreedyResult {
  std::vector<double> omega;
  double beta = 0.0;       // sum omega_i s_i
  double used = 0.0;       // sum omega_i q_i
  double marginal_ratio = 0.0;
};

GreedyResult greedy_np(const std::vector<double>& q, const std::vector<double>& s, double budget,
                       bool uniform_ties) {
  const size_t n = q.size();
  GreedyResult res;
  res.omega.assign(n, 0.0);
  if (budget <= 0.0) return res;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<double> ratio(n);
  for (size_t i = 0; i < n; ++i) ratio[i] = q[i] > 0.0 ? s[i] / q[i] : inf;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return ratio[a] < ratio[b]; });

  double remaining = budget;
  for (size_t pos = 0; pos < n && remaining > 0.0; ++pos) {
    const size_t i = order[pos];
    if (!(q[i] > 0.0)) continue;  // ratio inf: cannot absorb budget
    // Collect the group of outcomes tied with i when uniform spreading is on.
    size_t grp_end = pos + 1;
    if (uniform_ties) {
      const double tol = 1e-9 * std::max(1.0, std::abs(ratio[i]));
      while (grp_end < n && q[order[grp_end]] > 0.0 &&
             std::abs(ratio[order[grp_end]] - ratio[i]) <= tol)
        ++grp_end;
    }
    double grp_mass = 0.0;
    for (size_t k = pos; k < grp_end; ++k) grp_mass += q[order[k]];
    if (grp_mass <= remaining) {
      for (size_t k = pos; k < grp_end; ++k) res.omega[order[k]] = 1.0;
      remaining -= grp_mass;
    } else {
      const double w = remaining / grp_mass;
      for (size_t k = pos; k < grp_end; ++k) res.omega[order[k]] = w;
      remaining = 0.0;
    }
    res.marginal_ratio = ratio[i];
    pos = grp_end - 1;
  }
  for (size_t i = 0; i < n; ++i) {
    res.beta += res.omega[i] * s[i];
    res.used += res.omega[i] * q[i];
  }
  return res;
}

}  // namespace

BinaryTest BinaryTest::quantum(fock::Matrix lambda) {
  Eigen::SelfAdjointEigenSolver<fock::Matrix> es(lambda);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-9 || hi > 1.0 + 1e-9)
    throw std::invalid_argument("BinaryTest: operator spectrum outside [0,1]");
  if (lo < 0.0 || hi > 1.0) {
    Eigen::VectorXd clipped =
        es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    lambda = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  }
  BinaryTest t;
  t.kind = TestKind::quantum_operator;
  t.op = std::move(lambda);
  return t;
}

BinaryTest BinaryTest::classical(std::vector<double> omega, double omega_overflow) {
  for (double w : omega)
    if (w < -1e-12 || w > 1.0 + 1e-12)
      throw std::invalid_argument("BinaryTest: omega entry outside [0,1]");
  BinaryTest t;
  t.kind = TestKind::classical_stochastic;
  t.omega = std::move(omega);
  for (double& w : t.omega) w = clamp01(w);
  t.omega_overflow = clamp01(omega_overflow);
  return t;
}

double trace_norm_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "trace_norm_distance");
  Eigen::SelfAdjointEigenSolver<fock::Matrix> es(a.entries() - b.entries(),
                                                 Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

ErrorReport helstrom_error(const DensityMatrix& rho_s, const DensityMatrix& rho_th) {
  const double dist = trace_norm_distance(rho_s, rho_th);
  ErrorReport rep;
  rep.value = std::min(0.5, std::max(0.0, 0.5 * (1.0 - 0.5 * dist)));
  rep.kind = ErrorKind::symmetric;
  return rep;
}

ErrorReport measured_helstrom_error(const PhotonDistribution& p, const PhotonDistribution& q) {
  require_same_dim(static_cast<int>(p.probs.size()), static_cast<int>(q.probs.size()),
                   "measured_helstrom_error");
  double l1 = 0.0;
  for (size_t n = 0; n < p.probs.size(); ++n) l1 += std::abs(p.probs[n] - q.probs[n]);
  ErrorReport rep;
  rep.value = std::min(0.5, std::max(0.0, 0.5 * (1.0 - 0.5 * l1)));
  rep.kind = ErrorKind::symmetric;
  return rep;
}

AsymmetricResult quantum_beta(const DensityMatrix& rho_s, const DensityMatrix& rho_th,
                              double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("quantum_beta: epsilon must lie in (0,1)");
  require_same_dim(rho_s.dim(), rho_th.dim(), "quantum_beta");

  const int dim = rho_s.dim();
  const fock::Matrix& a = rho_s.entries();
  const fock::Matrix& b = rho_th.entries();
  const double def_s = rho_s.trace_deficit();
  const double def_th = rho_th.trace_deficit();
  // Beyond-cutoff mass always declares absent; the modeled part of the
  // constraint budget shrinks accordingly.
  const double budget = 1.0 - epsilon - def_th;
  const double trace_th = b.trace().real();

  AsymmetricResult res;
  if (budget <= 0.0) {
    res.beta = def_s;
    res.test = BinaryTest::quantum(fock::Matrix::Zero(dim, dim));
    res.type1 = 1.0 - def_th;
    res.duality_gap = 0.0;
    return res;
  }
  if (trace_th + 1e-9 < budget)
    throw NumericalError("quantum_beta: constraint infeasible on truncated support (trace " +
                         std::to_string(trace_th) + " < budget)");

  // Mass of the null state on the strictly negative eigenspace of a - t b.
  const auto constraint_mass = [&](double t) {
    Eigen::SelfAdjointEigenSolver<fock::Matrix> es(a - t * b);
    double mass = 0.0;
    for (int i = 0; i < dim; ++i) {
      if (es.eigenvalues()[i] < 0.0) {
        const auto v = es.eigenvectors().col(i);
        mass += std::real(v.dot(b * v));
      }
    }
    return mass;
  };

  double t_hi = 1.0;
  int guard = 0;
  while (constraint_mass(t_hi) < budget) {
    t_hi *= 2.0;
    if (++guard > 200)
      throw NumericalError("quantum_beta: failed to bracket the multiplier");
  }
  double t_lo = 0.0;
  for (int it = 0; it < 200 && (t_hi - t_lo) > 1e-12; ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (constraint_mass(mid) >= budget)
      t_hi = mid;
    else
      t_lo = mid;
  }
  const double t_star = 0.5 * (t_lo + t_hi);

  // Complete the test in the eigenbasis at t_star: strictly negative
  // directions get weight 1, the marginal (degenerate) group a uniform
  // fraction chosen so the constraint holds with equality.
  Eigen::SelfAdjointEigenSolver<fock::Matrix> es(a - t_star * b);
  std::vector<double> q(dim), s(dim);
  for (int i = 0; i < dim; ++i) {
    const auto v = es.eigenvectors().col(i);
    q[i] = std::max(0.0, std::real(v.dot(b * v)));
    s[i] = std::max(0.0, std::real(v.dot(a * v)));
  }
  GreedyResult greedy = greedy_np(q, s, budget, /*uniform_ties=*/true);

  Eigen::VectorXd weights(dim);
  for (int i = 0; i < dim; ++i) weights[i] = greedy.omega[i];
  fock::Matrix lambda =
      es.eigenvectors() * weights.asDiagonal() * es.eigenvectors().adjoint();

  res.beta = def_s + greedy.beta;
  res.test = BinaryTest::quantum(std::move(lambda));
  res.type1 = 1.0 - (greedy.used + def_th);

  // Weak-duality lower bound g(t) = def_s + t*budget + sum min(eig, 0),
  // evaluated at the bracket endpoints and midpoint.
  double best_dual = -std::numeric_limits<double>::infinity();
  for (double t : {t_lo, t_star, t_hi}) {
    Eigen::SelfAdjointEigenSolver<fock::Matrix> ds(a - t * b, Eigen::EigenvaluesOnly);
    double g = def_s + t * budget;
    for (int i = 0; i < dim; ++i) g += std::min(ds.eigenvalues()[i], 0.0);
    best_dual = std::max(best_dual, g);
  }
  res.duality_gap = std::max(0.0, res.beta - best_dual);
  if (res.duality_gap > kCertTol) {
    std::ostringstream msg;
    msg << "quantum_beta: duality gap " << res.duality_gap << " exceeds " << kCertTol
        << " (beta=" << res.beta << ", dual=" << best_dual << ", t=" << t_star << ")";
    throw NumericalError(msg.str());
  }
  return res;
}

AsymmetricResult classical_beta(const PhotonDistribution& p_s, const PhotonDistribution& p_th,
                                double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("classical_beta: epsilon must lie in [0,1]");
  require_same_dim(static_cast<int>(p_s.probs.size()), static_cast<int>(p_th.probs.size()),
                   "classical_beta");

  const size_t n = p_th.probs.size();
  const double def_s = p_s.deficit;
  const double def_th = p_th.deficit;
  const double total_th = p_th.total() + def_th;
  if (total_th + 1e-9 < 1.0 - epsilon)
    throw NumericalError("classical_beta: null mass " + std::to_string(total_th) +
                         " cannot meet the constraint (deficit mishandling?)");

  AsymmetricResult res;
  if (epsilon == 1.0) {
    // Unconstrained: always declare present.
    res.test = BinaryTest::classical(std::vector<double>(n, 0.0), 0.0);
    res.beta = 0.0;
    res.type1 = 1.0;
    res.duality_gap = 0.0;
    return res;
  }

  // Overflow first: counts beyond the cutoff declare absent.
  double remaining = 1.0 - epsilon;
  double omega_over = 1.0;
  if (def_th > 0.0) {
    const double take = std::min(def_th, remaining);
    omega_over = take / def_th;
    remaining -= take;
  }
  GreedyResult greedy = greedy_np(p_th.probs, p_s.probs, remaining, /*uniform_ties=*/false);

  res.beta = greedy.beta + omega_over * def_s;
  res.test = BinaryTest::classical(std::move(greedy.omega), omega_over);
  res.type1 = 1.0 - (greedy.used + omega_over * def_th);

  // LP dual at the marginal ratio certifies the greedy solution.
  const double t = greedy.marginal_ratio;
  double dual = omega_over * def_s + t * remaining;
  for (size_t i = 0; i < n; ++i) dual += std::min(p_s.probs[i] - t * p_th.probs[i], 0.0);
  res.duality_gap = std::max(0.0, res.beta - dual);
  return res;
}

ErrorReport mismatched_symmetric_error(const PhotonDistribution& p_actual_s,
                                       const PhotonDistribution& p_th,
                                       const PhotonDistribution& p_rule_s) {
  require_same_dim(static_cast<int>(p_actual_s.probs.size()),
                   static_cast<int>(p_th.probs.size()), "mismatched_symmetric_error");
  require_same_dim(static_cast<int>(p_rule_s.probs.size()),
                   static_cast<int>(p_th.probs.size()), "mismatched_symmetric_error");
  double false_alarm = 0.0;  // accepted null mass
  double accepted_s = 0.0;   // accepted actual-signal mass
  for (size_t i = 0; i < p_th.probs.size(); ++i) {
    if (p_rule_s.probs[i] - p_th.probs[i] >= 0.0) {
      false_alarm += p_th.probs[i];
      accepted_s += p_actual_s.probs[i];
    }
  }
  ErrorReport rep;
  rep.value = 0.5 * (false_alarm + (1.0 - accepted_s));
  rep.kind = ErrorKind::symmetric;
  return rep;
}

std::pair<double, double> stochastic_type_errors(const BinaryTest& test,
                                                 const PhotonDistribution& p_s,
                                                 const PhotonDistribution& p_th) {
  if (test.kind != TestKind::classical_stochastic)
    throw std::invalid_argument("stochastic_type_errors: classical test required");
  require_same_dim(static_cast<int>(test.omega.size()), static_cast<int>(p_s.probs.size()),
                   "stochastic_type_errors");
  require_same_dim(static_cast<int>(test.omega.size()), static_cast<int>(p_th.probs.size()),
                   "stochastic_type_errors");
  double type1 = (1.0 - test.omega_overflow) * p_th.deficit;
  double type2 = test.omega_overflow * p_s.deficit;
  for (size_t i = 0; i < test.omega.size(); ++i) {
    type1 += (1.0 - test.omega[i]) * p_th.probs[i];
    type2 += test.omega[i] * p_s.probs[i];
  }
  return {type1, type2};
}

}  // namespace rangekit::bounds
