#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rangekit/fock.hpp"

using namespace rangekit;
using fock::Complex;
using fock::DensityMatrix;
using fock::FockCutoff;
using fock::Matrix;
using fock::SignalParams;
using fock::ThermalParams;

namespace {

constexpr double kPi = std::numbers::pi;

// Explicit-polynomial oracle: L_n^{(k)}(x) = sum_j (-1)^j C(n+k, n-j) x^j / j!.
// Trustworthy only while cancellation is mild, hence the small-n range.
long double laguerre_explicit(int n, int k, long double x) {
  long double sum = 0.0L;
  for (int j = 0; j <= n; ++j) {
    long double binom = 1.0L;  // C(n+k, n-j)
    for (int i = 1; i <= n - j; ++i)
      binom *= static_cast<long double>(k + j + i) / static_cast<long double>(i);
    long double xpow = 1.0L, fact = 1.0L;
    for (int i = 1; i <= j; ++i) {
      xpow *= x;
      fact *= static_cast<long double>(i);
    }
    sum += (j % 2 ? -1.0L : 1.0L) * binom * xpow / fact;
  }
  return sum;
}

// Independent displacement oracle: truncated matrix exponential of
// alpha a^dag - conj(alpha) a by scaling-and-squaring Taylor summation.
Matrix expm_displacement(Complex alpha, int dim) {
  Matrix gen = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) {
    const double root = std::sqrt(static_cast<double>(n));
    gen(n, n - 1) = alpha * root;              // a^dag
    gen(n - 1, n) = -std::conj(alpha) * root;  // -conj(alpha) a
  }
  int squarings = 0;
  double norm = gen.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    gen *= 0.5;
    norm *= 0.5;
    ++squarings;
  }
  Matrix result = Matrix::Identity(dim, dim);
  Matrix term = Matrix::Identity(dim, dim);
  for (int j = 1; j <= 40; ++j) {
    term = (term * gen / static_cast<double>(j)).eval();
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) result = (result * result).eval();
  return result;
}

Matrix phase_rotation(double phi, int dim) {
  Matrix r = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) r(n, n) = std::polar(1.0, n * phi);
  return r;
}

}  // namespace

TEST_CASE("laguerre base cases and explicit oracle") {
  CHECK(fock::laguerre(0, 5, 3.7) == 1.0);
  CHECK(fock::laguerre(1, 0, 1.0) == 0.0);
  // x^2/2 - (k+2)x + (k+1)(k+2)/2 at (2, 1, 2.0)
  CHECK(fock::laguerre(2, 1, 2.0) == doctest::Approx(-1.0).epsilon(1e-14));

  for (int n : {0, 1, 2, 3, 5, 8, 12}) {
    for (int k : {0, 1, 3, 10}) {
      for (double x : {-10.0, -2.5, -0.5, 0.0, 0.7, 3.0, 25.0}) {
        const double expect = static_cast<double>(laguerre_explicit(n, k, x));
        const double got = fock::laguerre(n, k, x);
        CHECK(std::abs(got - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
      }
    }
  }
}

TEST_CASE("laguerre recurrence residual up to n=50") {
  for (int k : {0, 1, 4, 10}) {
    for (double x : {-25.0, -6.0, -0.5, 0.0, 1.5, 10.0, 25.0}) {
      for (int n = 1; n < 50; ++n) {
        const double lm1 = fock::laguerre(n - 1, k, x);
        const double l = fock::laguerre(n, k, x);
        const double lp1 = fock::laguerre(n + 1, k, x);
        const double lhs = (n + 1.0) * lp1;
        const double rhs = (2.0 * n + k + 1.0 - x) * l - (n + static_cast<double>(k)) * lm1;
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        CHECK(std::abs(lhs - rhs) / scale < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(fock::laguerre(-1, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fock::laguerre(2, -1, 1.0), std::invalid_argument);
}

TEST_CASE("displacement matrix: identity at alpha=0, vacuum column") {
  const FockCutoff cutoff(12);
  const Matrix d0 = fock::displacement_matrix(Complex(0.0, 0.0), cutoff);
  CHECK((d0 - Matrix::Identity(13, 13)).cwiseAbs().maxCoeff() == 0.0);

  const Matrix d1 = fock::displacement_matrix(Complex(1.0, 0.0), cutoff);
  CHECK(d1(0, 0).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  // coherent-state column: <n|D(alpha)|0> = e^{-|a|^2/2} alpha^n / sqrt(n!)
  double fact = 1.0;
  for (int n = 0; n <= 12; ++n) {
    if (n > 0) fact *= n;
    CHECK(d1(n, 0).real() == doctest::Approx(std::exp(-0.5) / std::sqrt(fact)).epsilon(1e-12));
    CHECK(std::abs(d1(n, 0).imag()) < 1e-15);
  }
}

TEST_CASE("displacement matrix matches the operator-exponential oracle") {
  const Complex alpha(0.7, 0.2);
  const Matrix direct = fock::displacement_matrix(alpha, FockCutoff(12));
  const Matrix oracle = expm_displacement(alpha, 41);
  for (int n = 0; n < 8; ++n)
    for (int m = 0; m < 8; ++m)
      CHECK(std::abs(direct(n, m) - oracle(n, m)) < 1e-8);
}

TEST_CASE("displacement matrix is unitary away from the truncation edge") {
  // Column m of the truncated D keeps its mass below the cutoff only while
  // the displaced-state turning point (sqrt(m) + |alpha|)^2 sits safely
  // inside d, so the reliably unitary block scales as (sqrt(d) - |alpha|)^2
  // minus a fixed buffer (measured: 7 rows suffice at 1e-6 for these
  // amplitudes and cutoffs).
  for (double amp : {0.5, 1.0, 2.0}) {
    for (int d : {30, 40}) {
      const Matrix dm = fock::displacement_matrix(Complex(amp, 0.3), FockCutoff(d));
      const Matrix gram = dm.adjoint() * dm;
      const double alpha_abs = std::abs(Complex(amp, 0.3));
      const double turning = std::pow(std::sqrt(static_cast<double>(d)) - alpha_abs, 2.0);
      const int safe = std::max(1, static_cast<int>(std::floor(turning)) - 7);
      const Matrix block = gram.topLeftCorner(safe, safe) - Matrix::Identity(safe, safe);
      CHECK(block.cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("thermal state: geometric diagonal and exact tail") {
  const DensityMatrix rho = fock::thermal_state(ThermalParams(1.0), FockCutoff(4));
  for (int n = 0; n <= 4; ++n)
    CHECK(rho.entries()(n, n).real() == doctest::Approx(std::pow(0.5, n + 1)).epsilon(1e-15));
  CHECK(rho.trace_deficit() == doctest::Approx(1.0 / 32.0).epsilon(1e-15));

  const DensityMatrix vac = fock::thermal_state(ThermalParams(0.0), FockCutoff(4));
  CHECK(vac.entries()(0, 0).real() == 1.0);
  CHECK(vac.trace_deficit() == 0.0);
  CHECK(vac.entries().cwiseAbs().sum() == 1.0);

  const DensityMatrix big = fock::thermal_state(ThermalParams(1.0), FockCutoff(30));
  CHECK(big.trace_deficit() == doctest::Approx(std::pow(2.0, -31.0)).epsilon(1e-12));
}

TEST_CASE("displaced thermal state") {
  const FockCutoff cutoff(30);
  const ThermalParams nbar(1.0);

  SUBCASE("zero displacement reproduces the thermal state") {
    const DensityMatrix a = fock::displaced_thermal_state(nbar, SignalParams(0.0, 0.3), cutoff);
    const DensityMatrix b = fock::thermal_state(nbar, cutoff);
    CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("displaced vacuum is a coherent state") {
    const DensityMatrix c =
        fock::displaced_thermal_state(ThermalParams(0.0), SignalParams(1.0, 0.0), cutoff);
    double fact = 1.0;
    for (int n = 0; n <= 20; ++n) {
      if (n > 0) fact *= n;
      CHECK(c.entries()(n, n).real() ==
            doctest::Approx(std::exp(-1.0) / fact).epsilon(1e-10));
    }
  }

  SUBCASE("mean photon number is nbar + |alpha|^2") {
    const DensityMatrix rho = fock::displaced_thermal_state(nbar, SignalParams(1.0, 0.0), cutoff);
    double mean = 0.0;
    for (int n = 0; n <= 30; ++n) mean += n * rho.entries()(n, n).real();
    // the truncated tail carries ~3e-6 of the mean at this cutoff
    CHECK(std::abs(mean - 2.0) < 1e-5);
  }

  SUBCASE("overloaded cutoff is a hard error") {
    CHECK_THROWS_AS(fock::displaced_thermal_state(nbar, SignalParams(5.0, 0.0), cutoff),
                    NumericalError);
  }

  SUBCASE("phase covariance under number rotation") {
    const DensityMatrix base = fock::displaced_thermal_state(nbar, SignalParams(1.0, 0.0), cutoff);
    for (double phi : {kPi / 3.0, kPi, 2.1}) {
      const DensityMatrix rotated =
          fock::displaced_thermal_state(nbar, SignalParams(1.0, phi), cutoff);
      const Matrix r = phase_rotation(phi, cutoff.dim());
      const Matrix expected = r * base.entries() * r.adjoint();
      CHECK((rotated.entries() - expected).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  SUBCASE("construction invariants across the parameter grid") {
    for (double nb : {0.0, 0.5, 1.0, 2.0}) {
      for (double ns : {0.0, 0.25, 1.0, 4.0}) {
        for (double phi : {0.0, kPi / 3.0, kPi}) {
          const DensityMatrix rho = fock::displaced_thermal_state(
              ThermalParams(nb), SignalParams(std::sqrt(ns), phi), FockCutoff(30));
          // Hermiticity and PSD are enforced by the constructor; the trace
          // bookkeeping is what is left to check.
          CHECK(std::abs(rho.trace() + rho.trace_deficit() - 1.0) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("dephased signal state") {
  const FockCutoff cutoff(30);

  SUBCASE("amplitude zero reproduces the thermal state") {
    const DensityMatrix a = fock::dephased_signal_state(ThermalParams(1.0), 0.0, cutoff);
    const DensityMatrix b = fock::thermal_state(ThermalParams(1.0), cutoff);
    CHECK((a.entries() - b.entries()).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("closed-form entry at n=0") {
    const DensityMatrix rho = fock::dephased_signal_state(ThermalParams(1.0), 1.0, cutoff);
    CHECK(rho.entries()(0, 0).real() ==
          doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-14));
    CHECK(rho.entries()(0, 0).real() == doctest::Approx(0.30327).epsilon(1e-4));
  }

  SUBCASE("exactly diagonal, mass accounted") {
    const DensityMatrix rho = fock::dephased_signal_state(ThermalParams(0.5), 2.0, cutoff);
    for (int n = 0; n < rho.dim(); ++n)
      for (int m = 0; m < rho.dim(); ++m)
        if (n != m) CHECK(rho.entries()(n, m) == Complex(0.0, 0.0));
    CHECK(std::abs(rho.trace() + rho.trace_deficit() - 1.0) < 1e-9);
  }

  SUBCASE("matches the numerical phase average") {
    const int K = 256;
    const double amplitude = 1.5;
    Matrix avg = Matrix::Zero(cutoff.dim(), cutoff.dim());
    for (int k = 0; k < K; ++k) {
      const double phi = 2.0 * kPi * k / K;
      avg += fock::displaced_thermal_state(ThermalParams(1.0), SignalParams(amplitude, phi),
                                           cutoff)
                 .entries();
    }
    avg /= static_cast<double>(K);
    const DensityMatrix dephased =
        fock::dephased_signal_state(ThermalParams(1.0), amplitude, cutoff);
    CHECK((avg - dephased.entries()).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("nbar=0 limit is Poisson") {
    const DensityMatrix rho = fock::dephased_signal_state(ThermalParams(0.0), 1.2, cutoff);
    double fact = 1.0;
    for (int n = 0; n <= 10; ++n) {
      if (n > 0) fact *= n;
      CHECK(rho.entries()(n, n).real() ==
            doctest::Approx(std::exp(-1.44) * std::pow(1.44, n) / fact).epsilon(1e-12));
    }
  }
}

TEST_CASE("diagonal_distribution") {
  const auto thermal = fock::thermal_state(ThermalParams(1.0), FockCutoff(4));
  const auto dist = fock::diagonal_distribution(thermal);
  REQUIRE(dist.probs.size() == 5);
  for (int n = 0; n <= 4; ++n)
    CHECK(dist.probs[n] == doctest::Approx(std::pow(0.5, n + 1)).epsilon(1e-15));
  CHECK(dist.deficit == doctest::Approx(1.0 / 32.0).epsilon(1e-15));

  const auto vac =
      fock::diagonal_distribution(fock::thermal_state(ThermalParams(0.0), FockCutoff(4)));
  CHECK(vac.probs[0] == 1.0);
  CHECK(vac.probs[3] == 0.0);

  // Congruence oracle: diagonal of D rho_th D^dag via direct summation
  // sum_k q_k |D_{nk}|^2.
  const FockCutoff cutoff(30);
  const auto rho =
      fock::displaced_thermal_state(ThermalParams(1.0), SignalParams(1.0, 0.0), cutoff);
  const auto diag = fock::diagonal_distribution(rho);
  const Matrix d = fock::displacement_matrix(Complex(1.0, 0.0), cutoff);
  const auto q = fock::diagonal_distribution(fock::thermal_state(ThermalParams(1.0), cutoff));
  for (int n = 0; n <= 30; ++n) {
    double expect = 0.0;
    for (int k = 0; k <= 30; ++k) expect += q.probs[k] * std::norm(d(n, k));
    CHECK(std::abs(diag.probs[n] - expect) < 1e-9);
  }
}

TEST_CASE("detector response") {
  using Eigen::MatrixXd;
  fock::PhotonDistribution dist;
  dist.probs = {0.5, 0.3, 0.2};
  dist.deficit = 0.0;

  SUBCASE("identity leaves the distribution unchanged") {
    const fock::DetectorResponse resp(MatrixXd::Identity(3, 3));
    const auto out = fock::apply_detector_response(dist, resp);
    CHECK(out.probs == dist.probs);
    CHECK(out.deficit == dist.deficit);
  }

  SUBCASE("collapse to zero counts") {
    MatrixXd m = MatrixXd::Zero(3, 3);
    m.row(0).setOnes();
    const fock::DetectorResponse resp(m);
    const auto out = fock::apply_detector_response(dist, resp);
    CHECK(out.probs[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.probs[1] == 0.0);
  }

  SUBCASE("worked 3x3 example") {
    MatrixXd m(3, 3);
    m << 0.9, 0.1, 0.0,
         0.1, 0.8, 0.2,
         0.0, 0.1, 0.8;
    const fock::DetectorResponse resp(m);
    const auto out = fock::apply_detector_response(dist, resp);
    CHECK(out.probs[0] == doctest::Approx(0.48).epsilon(1e-14));
    CHECK(out.probs[1] == doctest::Approx(0.33).epsilon(1e-14));
    CHECK(out.probs[2] == doctest::Approx(0.19).epsilon(1e-14));
  }

  SUBCASE("validation") {
    MatrixXd bad(2, 2);
    bad << 0.5, 0.0, 0.4, 1.0;  // first column sums to 0.9
    CHECK_THROWS_AS(fock::DetectorResponse{bad}, std::invalid_argument);
    const fock::DetectorResponse resp(MatrixXd::Identity(4, 4));
    CHECK_THROWS_AS(fock::apply_detector_response(dist, resp), std::invalid_argument);
  }
}

TEST_CASE("density matrix validation") {
  Matrix ok(2, 2);
  ok << Complex(0.5, 0.0), Complex(0.1, 0.2), Complex(0.1, -0.2), Complex(0.5, 0.0);
  CHECK_NOTHROW(DensityMatrix(ok, 0.0));

  Matrix skew(2, 2);
  skew << Complex(0.5, 0.0), Complex(0.1, 0.2), Complex(0.3, -0.2), Complex(0.5, 0.0);
  CHECK_THROWS_AS(DensityMatrix(skew, 0.0), std::invalid_argument);

  Matrix indefinite(2, 2);
  indefinite << Complex(0.5, 0.0), Complex(0.9, 0.0), Complex(0.9, 0.0), Complex(0.5, 0.0);
  CHECK_THROWS_AS(DensityMatrix(indefinite, 0.0), NumericalError);

  // Eigenvalues in [-1e-10, 0) are truncation noise and get clipped.
  Matrix noisy(2, 2);
  noisy << Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(-5e-11, 0.0);
  const DensityMatrix repaired(noisy, 0.0);
  CHECK(repaired.entries()(1, 1).real() >= 0.0);

  CHECK_THROWS_AS(FockCutoff(0), std::invalid_argument);
  CHECK_THROWS_AS(ThermalParams(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(SignalParams(-1.0, 0.0), std::invalid_argument);
  CHECK(SignalParams(1.0, -kPi).phase == doctest::Approx(kPi).epsilon(1e-15));
}
