#pragma once

#include <cmath>
#include <vector>

#include "rangekit/bounds.hpp"
#include "rangekit/fock.hpp"

namespace rangekit::receiver {

using bounds::BinaryTest;
using bounds::ErrorReport;
using fock::DensityMatrix;
using fock::FockCutoff;
using fock::PhotonDistribution;
using fock::SignalParams;
using fock::ThermalParams;

/// Largest receiver displacement searched at a given cutoff. Keeps the
/// displaced mean photon number well inside the truncated basis so the
/// optimization is not dominated by truncation loss.
inline double displacement_bound(const FockCutoff& cutoff) {
  return 0.5 * std::sqrt(static_cast<double>(cutoff.d_max));
}

/// Displacement-then-count receiver: displace by beta_r, then resolve the
/// photon number.
struct ReceiverConfig {
  fock::Complex displacement{0.0, 0.0};
  FockCutoff cutoff;

  ReceiverConfig(fock::Complex beta_r, FockCutoff c) : displacement(beta_r), cutoff(c) {
    if (std::abs(beta_r) > displacement_bound(c) + 1e-12)
      throw std::invalid_argument("ReceiverConfig: |displacement| exceeds sqrt(d_max)/2");
  }
};

/// Per-count decision rule: probability of declaring the target PRESENT
/// for each count n. Deterministic rules hold 0/1 entries. Counts beyond
/// the cutoff declare present with probability `accept_overflow`
/// (0 for every rule built here: overflow decides absent).
struct DecisionRule {
  std::vector<double> accept_present;
  double accept_overflow = 0.0;

  bool deterministic() const {
    for (double a : accept_present)
      if (a != 0.0 && a != 1.0) return false;
    return accept_overflow == 0.0 || accept_overflow == 1.0;
  }

  static DecisionRule from_binary_test(const BinaryTest& test);
};

/// Count distribution after the receiver displacement:
/// diag(D(beta_r) state D(beta_r)^dag), overflow mass 1 - sum.
PhotonDistribution receiver_distribution(const DensityMatrix& state,
                                         const ReceiverConfig& config);

struct DisplacementOpt {
  fock::Complex displacement{0.0, 0.0};
  double objective = 0.5;
  bool at_boundary = false;  // optimum pinned at the search bound: cutoff-limited
};

/// Receiver displacement minimizing the measured symmetric error floor for
/// the given reference signal. The search runs along the signal-phase axis
/// (beta_r = b e^{i phi_ref}, b in [-bound, bound]): a 41-point grid scan
/// seeds golden-section refinement to |db| < 1e-5. Degenerate objectives
/// tie-break toward the smallest |b|.
DisplacementOpt optimize_displacement(const ThermalParams& thermal,
                                      const SignalParams& reference_signal,
                                      const FockCutoff& cutoff);

/// Deterministic threshold-type rule: declare present where
/// p_s(n) - p_th(n) >= 0 (ties decide present). Overflow decides absent.
DecisionRule np_rule(const PhotonDistribution& p_s, const PhotonDistribution& p_th);

/// Exact symmetric error of a rule under equal priors:
/// 1/2 [P(present | null) + P(absent | signal)], including the overflow
/// bin on both sides. This is the finite-sum value every Monte Carlo
/// estimate is checked against.
double symmetric_rule_error(const DecisionRule& rule, const PhotonDistribution& p_s,
                            const PhotonDistribution& p_th);

/// Symmetric error of the fixed receiver (displacement and rule frozen at
/// the reference phase/intensity) averaged over k_phases uniform signal
/// phases 2 pi k / K.
ErrorReport phase_averaged_error(const ThermalParams& thermal, double amplitude,
                                 const ReceiverConfig& fixed_config,
                                 const SignalParams& rule_reference, int k_phases);

namespace serial {
ErrorReport phase_averaged_error(const ThermalParams& thermal, double amplitude,
                                 const ReceiverConfig& fixed_config,
                                 const SignalParams& rule_reference, int k_phases);
}

}  // namespace rangekit::receiver
