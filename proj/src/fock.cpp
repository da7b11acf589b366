#include "rangekit/fock.hpp"

#include <cmath>
#include <numbers>

namespace rangekit::fock {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kPsdTol = 1e-10;

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

}  // namespace

SignalParams::SignalParams(double amp, double phi) : amplitude(amp), phase(wrap_phase(phi)) {
  if (!(amp >= 0.0)) throw std::invalid_argument("SignalParams: amplitude must be >= 0");
}

double PhotonDistribution::total() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

DensityMatrix::DensityMatrix(Matrix entries, double trace_deficit)
    : trace_deficit_(trace_deficit) {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw std::invalid_argument("DensityMatrix: square matrix required");

  const double defect = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (defect > kHermTol)
    throw std::invalid_argument("DensityMatrix: Hermiticity defect " + std::to_string(defect));
  entries_ = 0.5 * (entries + entries.adjoint().eval());

  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < -kPsdTol)
    throw NumericalError("DensityMatrix: eigenvalue " + std::to_string(lmin) +
                         " below PSD tolerance");
  if (lmin < 0.0) {
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    entries_ = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
    entries_ = 0.5 * (entries_ + entries_.adjoint().eval());
  }
}

DetectorResponse::DetectorResponse(Eigen::MatrixXd response) : response_(std::move(response)) {
  if (response_.rows() != response_.cols() || response_.rows() < 1)
    throw std::invalid_argument("DetectorResponse: square matrix required");
  for (int n = 0; n < response_.cols(); ++n) {
    double col = 0.0;
    for (int m = 0; m < response_.rows(); ++m) {
      const double v = response_(m, n);
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("DetectorResponse: entry outside [0,1]");
      col += v;
    }
    if (std::abs(col - 1.0) > 1e-12)
      throw std::invalid_argument("DetectorResponse: column " + std::to_string(n) +
                                  " sums to " + std::to_string(col));
  }
}

double laguerre(int n, int k, double x) {
  if (n < 0 || k < 0) throw std::invalid_argument("laguerre: n and k must be >= 0");
  if (!std::isfinite(x)) throw std::invalid_argument("laguerre: x must be finite");
  if (n == 0) return 1.0;
  double prev = 1.0;                       // L_0
  double cur = 1.0 + static_cast<double>(k) - x;  // L_1
  for (int m = 1; m < n; ++m) {
    const double next =
        ((2.0 * m + k + 1.0 - x) * cur - (m + static_cast<double>(k)) * prev) / (m + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

Matrix displacement_matrix(Complex alpha, const FockCutoff& cutoff) {
  const int dim = cutoff.dim();
  const double a2 = std::norm(alpha);
  const double pref = std::exp(-0.5 * a2);
  Matrix d(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m <= n; ++m) {
      // n >= m: <n|D|m> = pref * L_m^{(n-m)}(a2) * prod_{j=m+1..n} alpha/sqrt(j)
      Complex ladder(1.0, 0.0);
      for (int j = m + 1; j <= n; ++j) ladder *= alpha / std::sqrt(static_cast<double>(j));
      const double lag = laguerre(m, n - m, a2);
      d(n, m) = pref * lag * ladder;
      if (m != n) {
        // m >= n by symmetry of the same formula with -conj(alpha).
        Complex ladder2(1.0, 0.0);
        for (int j = m + 1; j <= n; ++j)
          ladder2 *= -std::conj(alpha) / std::sqrt(static_cast<double>(j));
        d(m, n) = pref * lag * ladder2;
      }
    }
  }
  return d;
}

DensityMatrix thermal_state(const ThermalParams& thermal, const FockCutoff& cutoff) {
  const int dim = cutoff.dim();
  const double r = thermal.nbar / (1.0 + thermal.nbar);
  Matrix m = Matrix::Zero(dim, dim);
  double weight = 1.0 / (1.0 + thermal.nbar);
  for (int n = 0; n < dim; ++n) {
    m(n, n) = weight;
    weight *= r;
  }
  // deficit = sum_{n > d_max} (1-r) r^n = r^{d_max+1}
  double tail = 1.0;
  for (int n = 0; n < dim; ++n) tail *= r;
  return DensityMatrix(std::move(m), tail);
}

DensityMatrix displaced_thermal_state(const ThermalParams& thermal, const SignalParams& signal,
                                      const FockCutoff& cutoff) {
  const Matrix d = displacement_matrix(signal.alpha(), cutoff);
  const DensityMatrix th = thermal_state(thermal, cutoff);
  Matrix m = d * th.entries() * d.adjoint();
  m = 0.5 * (m + m.adjoint().eval());
  const double trace = m.trace().real();
  if (trace < 0.9)
    throw NumericalError(
        "displaced_thermal_state: truncated trace " + std::to_string(trace) +
        " < 0.9; cutoff too small for nbar + |alpha|^2");
  return DensityMatrix(std::move(m), 1.0 - trace);
}

DensityMatrix dephased_signal_state(const ThermalParams& thermal, double amplitude,
                                    const FockCutoff& cutoff) {
  if (!(amplitude >= 0.0))
    throw std::invalid_argument("dephased_signal_state: amplitude must be >= 0");
  const int dim = cutoff.dim();
  const double a2 = amplitude * amplitude;
  Matrix m = Matrix::Zero(dim, dim);
  double sum = 0.0;
  if (thermal.nbar < 1e-12) {
    // Zero-temperature limit: Poisson counts of a pure coherent state.
    double p = std::exp(-a2);
    for (int n = 0; n < dim; ++n) {
      m(n, n) = p;
      sum += p;
      p *= a2 / (n + 1.0);
    }
  } else {
    const double nbar = thermal.nbar;
    const double r = nbar / (1.0 + nbar);
    const double damp = std::exp(-a2 / (1.0 + nbar));
    const double lag_arg = -a2 / ((1.0 + nbar) * nbar);
    double geo = 1.0 / (1.0 + nbar);
    for (int n = 0; n < dim; ++n) {
      const double p = geo * damp * laguerre(n, 0, lag_arg);
      m(n, n) = p;
      sum += p;
      geo *= r;
    }
  }
  return DensityMatrix(std::move(m), 1.0 - sum);
}

PhotonDistribution diagonal_distribution(const DensityMatrix& state) {
  PhotonDistribution dist;
  dist.probs.resize(state.dim());
  for (int n = 0; n < state.dim(); ++n) {
    const double p = state.entries()(n, n).real();
    if (p < -kPsdTol)
      throw NumericalError("diagonal_distribution: entry " + std::to_string(p) +
                           " below tolerance at n=" + std::to_string(n));
    dist.probs[n] = std::max(p, 0.0);
  }
  dist.deficit = state.trace_deficit();
  return dist;
}

PhotonDistribution apply_detector_response(const PhotonDistribution& dist,
                                           const DetectorResponse& response) {
  if (response.dim() != static_cast<int>(dist.probs.size()))
    throw std::invalid_argument("apply_detector_response: dimension mismatch");
  Eigen::VectorXd p(dist.probs.size());
  for (size_t i = 0; i < dist.probs.size(); ++i) p[static_cast<int>(i)] = dist.probs[i];
  Eigen::VectorXd q = response.matrix() * p;
  PhotonDistribution out;
  out.probs.assign(q.data(), q.data() + q.size());
  out.deficit = dist.deficit;
  return out;
}

}  // namespace rangekit::fock
