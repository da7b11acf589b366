#pragma once

#include <utility>
#include <vector>

#include "rangekit/fock.hpp"

namespace rangekit::bounds {

using fock::DensityMatrix;
using fock::PhotonDistribution;

enum class ErrorKind { symmetric, type1, type2 };

/// A single error probability. std_error is 0 for exact computations and
/// the binomial standard error for Monte Carlo estimates.
struct ErrorReport {
  double value = 0.0;
  double std_error = 0.0;
  ErrorKind kind = ErrorKind::symmetric;
};

enum class TestKind { quantum_operator, classical_stochastic };

/// Binary test. Semantics: probability of declaring the target ABSENT.
/// Quantum kind: Hermitian operator with spectrum in [0,1].
/// Classical kind: per-count acceptance vector omega[n] in [0,1], plus the
/// acceptance probability omega_overflow applied to counts beyond the
/// cutoff.
struct BinaryTest {
  TestKind kind = TestKind::classical_stochastic;
  fock::Matrix op;                  // quantum kind
  std::vector<double> omega;        // classical kind, n = 0..d_max
  double omega_overflow = 1.0;

  static BinaryTest quantum(fock::Matrix lambda);
  static BinaryTest classical(std::vector<double> omega, double omega_overflow);
};

/// Solution of the constrained asymmetric test: minimized Type-II error
/// beta, the optimal test, the achieved Type-I error, and a weak-duality
/// certificate gap.
struct AsymmetricResult {
  double beta = 0.0;
  BinaryTest test;
  double type1 = 0.0;
  double duality_gap = 0.0;
};

/// Trace norm of the Hermitian difference a - b (sum of |eigenvalues|).
double trace_norm_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Optimal symmetric single-shot error for equal priors:
/// 1/2 (1 - 1/2 ||rho_s - rho_th||_1).
ErrorReport helstrom_error(const DensityMatrix& rho_s, const DensityMatrix& rho_th);

/// Symmetric error floor for a fixed measurement, from the l1 distance of
/// the two count distributions. The overflow bin is shared by both
/// hypotheses and carries no discriminating weight: lost tail mass is
/// unresolved by the measurement, and counting it as distinguishable would
/// understate the error and break the data-processing ordering against
/// helstrom_error.
ErrorReport measured_helstrom_error(const PhotonDistribution& p, const PhotonDistribution& q);

/// Minimum Type-II error subject to Type-I <= epsilon over all operators
/// 0 <= Lambda <= I. Solved by bisection over the Lagrange multiplier t:
/// Lambda(t) projects onto the negative eigenspace of rho_s - t rho_th,
/// completed by fractional weight spread uniformly over the marginal
/// (degenerate) eigenvectors so the constraint holds with equality.
///
/// Truncation deficits enter as an explicit extra outcome that always
/// declares absent (mirroring the classical convention), so for diagonal
/// state pairs this coincides exactly with classical_beta. For unit-trace
/// inputs it is the unmodified program.
///
/// The weak-duality certificate max_t [t(1-eps') - Tr((t rho_th - rho_s)_+)]
/// must come within 1e-6 of beta, otherwise NumericalError is thrown.
AsymmetricResult quantum_beta(const DensityMatrix& rho_s, const DensityMatrix& rho_th,
                              double epsilon);

/// Randomized Neyman-Pearson solution over count distributions: outcomes
/// sorted by likelihood ratio p_s/p_th ascending, omega filled greedily to
/// meet the false-alarm budget, with at most one fractional entry. The
/// overflow outcome always declares absent (omega_overflow = 1), except in
/// the unconstrained case epsilon = 1 where the all-zero test is optimal.
AsymmetricResult classical_beta(const PhotonDistribution& p_s, const PhotonDistribution& p_th,
                                double epsilon);

/// Symmetric error of the fixed decision rule "declare present when
/// p_rule_s(n) >= p_th(n)" evaluated against the actual signal
/// distribution. Counts beyond the cutoff declare absent, so the actual
/// signal's overflow mass is missed-detection mass.
ErrorReport mismatched_symmetric_error(const PhotonDistribution& p_actual_s,
                                       const PhotonDistribution& p_th,
                                       const PhotonDistribution& p_rule_s);

/// Exact (Type-I, Type-II) error pair of a classical stochastic test.
std::pair<double, double> stochastic_type_errors(const BinaryTest& test,
                                                 const PhotonDistribution& p_s,
                                                 const PhotonDistribution& p_th);

}  // namespace rangekit::bounds
