#include "rangekit/receiver.hpp"

#include <algorithm>
#include <numbers>

#include "rangekit/parallel.hpp"

namespace rangekit::receiver {

namespace {

// Golden-section minimization on [lo, hi]; f must be unimodal near the
// seed for an exact answer, otherwise the caller re-checks against the
// seeding grid.
template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

DecisionRule DecisionRule::from_binary_test(const BinaryTest& test) {
  if (test.kind != bounds::TestKind::classical_stochastic)
    throw std::invalid_argument("DecisionRule: only classical tests are samplable");
  DecisionRule rule;
  rule.accept_present.resize(test.omega.size());
  for (size_t i = 0; i < test.omega.size(); ++i) rule.accept_present[i] = 1.0 - test.omega[i];
  rule.accept_overflow = 1.0 - test.omega_overflow;
  return rule;
}

PhotonDistribution receiver_distribution(const DensityMatrix& state,
                                         const ReceiverConfig& config) {
  if (state.dim() != config.cutoff.dim())
    throw std::invalid_argument("receiver_distribution: dimension mismatch");
  const fock::Matrix d = fock::displacement_matrix(config.displacement, config.cutoff);
  const fock::Matrix shifted = d * state.entries() * d.adjoint();
  PhotonDistribution dist;
  dist.probs.resize(state.dim());
  double sum = 0.0;
  for (int n = 0; n < state.dim(); ++n) {
    const double p = shifted(n, n).real();
    if (p < -1e-10)
      throw NumericalError("receiver_distribution: negative probability " + std::to_string(p));
    dist.probs[n] = std::max(p, 0.0);
    sum += dist.probs[n];
  }
  dist.deficit = 1.0 - sum;
  return dist;
}

DisplacementOpt optimize_displacement(const ThermalParams& thermal,
                                      const SignalParams& reference_signal,
                                      const FockCutoff& cutoff) {
  const double bound = displacement_bound(cutoff);
  const DensityMatrix rho_th = fock::thermal_state(thermal, cutoff);
  const DensityMatrix rho_s = fock::displaced_thermal_state(thermal, reference_signal, cutoff);
  const fock::Complex axis = std::polar(1.0, reference_signal.phase);

  const auto objective = [&](double b) {
    const ReceiverConfig cfg(b * axis, cutoff);
    return bounds::measured_helstrom_error(receiver_distribution(rho_s, cfg),
                                           receiver_distribution(rho_th, cfg))
        .value;
  };

  // Coarse scan; the objective can be multimodal. 41 odd => 0 is a node.
  constexpr int kGridPoints = 41;
  std::vector<double> grid(kGridPoints), val(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i)
    grid[i] = -bound + 2.0 * bound * static_cast<double>(i) / (kGridPoints - 1);
#pragma omp parallel for schedule(static) num_threads(thread_cap()) if (!in_parallel_region())
  for (int i = 0; i < kGridPoints; ++i) val[i] = objective(grid[i]);

  int best = 0;
  for (int i = 1; i < kGridPoints; ++i) {
    if (val[i] < val[best] ||
        (val[i] == val[best] && std::abs(grid[i]) < std::abs(grid[best])))
      best = i;
  }

  const double step = 2.0 * bound / (kGridPoints - 1);
  const double lo = std::max(-bound, grid[best] - step);
  const double hi = std::min(bound, grid[best] + step);
  double b_opt = golden_section(objective, lo, hi, 1e-5);
  double f_opt = objective(b_opt);
  if (val[best] < f_opt || (val[best] == f_opt && std::abs(grid[best]) < std::abs(b_opt))) {
    b_opt = grid[best];
    f_opt = val[best];
  }

  DisplacementOpt out;
  out.displacement = b_opt * axis;
  out.objective = f_opt;
  out.at_boundary = std::abs(b_opt) >= bound - 1e-3;
  return out;
}

DecisionRule np_rule(const PhotonDistribution& p_s, const PhotonDistribution& p_th) {
  if (p_s.probs.size() != p_th.probs.size())
    throw std::invalid_argument("np_rule: length mismatch");
  DecisionRule rule;
  rule.accept_present.resize(p_s.probs.size());
  for (size_t n = 0; n < p_s.probs.size(); ++n)
    rule.accept_present[n] = (p_s.probs[n] - p_th.probs[n] >= 0.0) ? 1.0 : 0.0;
  rule.accept_overflow = 0.0;
  return rule;
}

double symmetric_rule_error(const DecisionRule& rule, const PhotonDistribution& p_s,
                            const PhotonDistribution& p_th) {
  if (rule.accept_present.size() != p_s.probs.size() ||
      rule.accept_present.size() != p_th.probs.size())
    throw std::invalid_argument("symmetric_rule_error: length mismatch");
  double present_given_null = rule.accept_overflow * p_th.deficit;
  double present_given_signal = rule.accept_overflow * p_s.deficit;
  for (size_t n = 0; n < rule.accept_present.size(); ++n) {
    present_given_null += rule.accept_present[n] * p_th.probs[n];
    present_given_signal += rule.accept_present[n] * p_s.probs[n];
  }
  return 0.5 * (present_given_null + (1.0 - present_given_signal));
}

namespace {

ErrorReport phase_average_impl(const ThermalParams& thermal, double amplitude,
                               const ReceiverConfig& fixed_config,
                               const SignalParams& rule_reference, int k_phases,
                               bool parallel) {
  if (k_phases < 1) throw std::invalid_argument("phase_averaged_error: k_phases must be >= 1");

  const DensityMatrix rho_th = fock::thermal_state(thermal, fixed_config.cutoff);
  const PhotonDistribution p_th = receiver_distribution(rho_th, fixed_config);
  const DensityMatrix rho_ref =
      fock::displaced_thermal_state(thermal, rule_reference, fixed_config.cutoff);
  const DecisionRule rule = np_rule(receiver_distribution(rho_ref, fixed_config), p_th);

  // Per-phase staging; the ordered final sum keeps the result independent
  // of the schedule.
  std::vector<double> errs(k_phases);
  const auto eval_phase = [&](int k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / k_phases;
    const DensityMatrix rho_s =
        fock::displaced_thermal_state(thermal, SignalParams(amplitude, phi), fixed_config.cutoff);
    return symmetric_rule_error(rule, receiver_distribution(rho_s, fixed_config), p_th);
  };
  if (parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_cap()) if (!in_parallel_region())
    for (int k = 0; k < k_phases; ++k) errs[k] = eval_phase(k);
  } else {
    for (int k = 0; k < k_phases; ++k) errs[k] = eval_phase(k);
  }
  double sum = 0.0;
  for (double e : errs) sum += e;

  ErrorReport rep;
  rep.value = sum / k_phases;
  rep.kind = bounds::ErrorKind::symmetric;
  return rep;
}

}  // namespace

ErrorReport phase_averaged_error(const ThermalParams& thermal, double amplitude,
                                 const ReceiverConfig& fixed_config,
                                 const SignalParams& rule_reference, int k_phases) {
  return phase_average_impl(thermal, amplitude, fixed_config, rule_reference, k_phases, true);
}

namespace serial {
ErrorReport phase_averaged_error(const ThermalParams& thermal, double amplitude,
                                 const ReceiverConfig& fixed_config,
                                 const SignalParams& rule_reference, int k_phases) {
  return phase_average_impl(thermal, amplitude, fixed_config, rule_reference, k_phases, false);
}
}  // namespace serial

}  // namespace rangekit::receiver
