#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rangekit/errors.hpp"

namespace rangekit::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Photon-number truncation. A cutoff D keeps photon numbers 0..D
/// inclusive, so matrices have dimension D+1.
struct FockCutoff {
  int d_max = 30;

  explicit FockCutoff(int d) : d_max(d) {
    if (d < 1) throw std::invalid_argument("FockCutoff: d_max must be >= 1");
  }
  int dim() const { return d_max + 1; }
};

/// Background mean photon number.
struct ThermalParams {
  double nbar = 1.0;

  explicit ThermalParams(double n) : nbar(n) {
    if (!(n >= 0.0)) throw std::invalid_argument("ThermalParams: nbar must be >= 0");
  }
};

/// Coherent signal parameters: amplitude |alpha| and phase phi, so that
/// alpha = |alpha| e^{i phi}. The signal intensity is |alpha|^2.
struct SignalParams {
  double amplitude = 0.0;
  double phase = 0.0;

  SignalParams(double amp, double phi);

  Complex alpha() const { return std::polar(amplitude, phase); }
  double intensity() const { return amplitude * amplitude; }
};

/// Hermitian, positive-semidefinite matrix in the truncated number basis.
/// Probability mass lost to truncation is tracked in trace_deficit rather
/// than renormalized away, so cutoff effects stay visible downstream.
///
/// Construction enforces the representation invariants:
///  - max-norm Hermiticity defect <= 1e-12 (the stored matrix is the
///    Hermitian average),
///  - eigenvalues >= -1e-10; values in [-1e-10, 0) are truncation noise
///    and are clipped to zero, anything lower throws NumericalError.
class DensityMatrix {
 public:
  DensityMatrix(Matrix entries, double trace_deficit);

  const Matrix& entries() const { return entries_; }
  double trace_deficit() const { return trace_deficit_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  double trace() const { return entries_.trace().real(); }

 private:
  Matrix entries_;
  double trace_deficit_ = 0.0;
};

/// Probability vector over photon counts 0..d_max; `deficit` is the mass
/// beyond the cutoff (the overflow bin).
struct PhotonDistribution {
  std::vector<double> probs;
  double deficit = 0.0;

  int d_max() const { return static_cast<int>(probs.size()) - 1; }
  double total() const;
};

/// Column-stochastic matrix of conditional probabilities
/// response(m, n) = P(report m | true count n). Models detector
/// imperfections beyond plain loss.
class DetectorResponse {
 public:
  explicit DetectorResponse(Eigen::MatrixXd response);

  const Eigen::MatrixXd& matrix() const { return response_; }
  int dim() const { return static_cast<int>(response_.rows()); }

 private:
  Eigen::MatrixXd response_;
};

/// Generalized Laguerre polynomial L_n^{(k)}(x), evaluated by the upward
/// three-term recurrence in n (stable for the arguments used here,
/// including the negative arguments of the dephased-state formula).
double laguerre(int n, int k, double x);

/// Number-basis matrix elements <n|D(alpha)|m> of the displacement
/// operator D(alpha) = exp(alpha a^dag - conj(alpha) a), truncated to the
/// cutoff dimension. Convention: D(alpha)|0> is the coherent state with
/// <n|D(alpha)|0> = e^{-|alpha|^2/2} alpha^n / sqrt(n!). All other modules
/// inherit this convention; tests pin it against a truncated operator
/// exponential.
Matrix displacement_matrix(Complex alpha, const FockCutoff& cutoff);

/// Thermal state: diagonal with entries (nbar/(1+nbar))^n / (1+nbar).
/// The geometric tail beyond the cutoff is the exact trace deficit.
DensityMatrix thermal_state(const ThermalParams& thermal, const FockCutoff& cutoff);

/// Displaced thermal state D(alpha) rho_th D(alpha)^dag assembled in the
/// truncated basis. Throws NumericalError when the truncated trace drops
/// below 0.9, which signals that nbar + |alpha|^2 is too large for the
/// cutoff; raise d_max in that case.
DensityMatrix displaced_thermal_state(const ThermalParams& thermal, const SignalParams& signal,
                                      const FockCutoff& cutoff);

/// Phase-averaged (dephased) displaced thermal state. Diagonal, with
/// entries
///   nbar^n/(1+nbar)^{n+1} exp(-|a|^2/(1+nbar)) L_n(-|a|^2/((1+nbar) nbar)).
/// The nbar -> 0 limit is the Poisson distribution of a pure coherent
/// state and is handled in closed form.
DensityMatrix dephased_signal_state(const ThermalParams& thermal, double amplitude,
                                    const FockCutoff& cutoff);

/// Photon-count distribution of a state measured directly in the number
/// basis: real diagonal entries, with the state's trace deficit carried
/// over as the overflow mass.
PhotonDistribution diagonal_distribution(const DensityMatrix& state);

/// Push a count distribution through a detector response; the overflow
/// mass is unaffected.
PhotonDistribution apply_detector_response(const PhotonDistribution& dist,
                                           const DetectorResponse& response);

}  // namespace rangekit::fock
