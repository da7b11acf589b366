#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "rangekit/bounds.hpp"
#include "rangekit/prng.hpp"
#include "rangekit/receiver.hpp"

namespace rangekit::mc {

using bounds::AsymmetricResult;
using bounds::BinaryTest;
using bounds::ErrorReport;
using fock::PhotonDistribution;
using receiver::DecisionRule;

/// Sampled count landed beyond the cutoff (probability = deficit).
inline constexpr int kOverflowCount = -1;

/// Deterministic-simulation parameters. Identical configs produce
/// bit-identical results regardless of threading; each trial draws from
/// its own counter stream keyed by (seed, purpose, substream, trial).
struct SimConfig {
  long long trials = 100000;
  std::uint64_t seed = 1;
  std::uint64_t substream = 0;
};

/// Inverse-CDF sampler over counts 0..d_max plus the overflow bin.
class CountSampler {
 public:
  explicit CountSampler(const PhotonDistribution& dist);

  /// Consumes exactly one uniform draw.
  int sample(CounterRng& rng) const;

 private:
  std::vector<double> cdf_;
};

/// One-off sampling entry point; loops should hold a CountSampler.
int sample_count(const PhotonDistribution& dist, CounterRng& rng);

/// Symmetric-error frequency under equal priors: each trial draws the
/// hypothesis, a count from the matching distribution, and the rule's
/// randomized decision (three uniforms per trial).
ErrorReport estimate_symmetric_error(const DecisionRule& rule, const PhotonDistribution& p_s,
                                     const PhotonDistribution& p_th, const SimConfig& cfg);

/// (Type-I, Type-II) frequencies of a classical stochastic test, each from
/// cfg.trials draws of the corresponding hypothesis.
std::pair<ErrorReport, ErrorReport> estimate_type_errors(const BinaryTest& test,
                                                         const PhotonDistribution& p_s,
                                                         const PhotonDistribution& p_th,
                                                         const SimConfig& cfg);

/// Time-of-flight demo over discrete range slots. Slots listed in
/// `targets` return the given mean signal photons on top of the thermal
/// background; all light is phase-averaged. One acceptance test is built
/// from the background alone and reused for every slot.
struct RangingConfig {
  int slots = 20;
  std::map<int, double> targets = {{5, 3.0}, {15, 1.0}};  // slot (1-based) -> mean signal photons
  double background_nbar = 1.0;
  double epsilon = 0.01;
  long long trials = 10000;
  std::uint64_t seed = 1;
  int cutoff = 30;
  double rule_reference_ns = 1.0;  // alternative used to order the likelihood ratios
};

struct SlotResult {
  int slot = 0;
  double detection_rate = 0.0;
  double rate_stderr = 0.0;
  double mean_intensity = 0.0;
  double intensity_stderr = 0.0;
  double target_ns = 0.0;
};

struct RangingResult {
  std::vector<SlotResult> slots;
  double pooled_empty_rate = 0.0;  // detection rate pooled over target-free slots
  double pooled_empty_stderr = 0.0;
  double pooled_empty_intensity = 0.0;
  AsymmetricResult rule;           // the test applied to every slot

  /// Target-to-background contrast of a slot's detection rate and of its
  /// mean intensity.
  double detection_contrast(int slot) const;
  double intensity_contrast(int slot) const;
};

RangingResult run_ranging_demo(const RangingConfig& cfg);

/// Reference implementations: plain loops, no OpenMP. Kept for testing the
/// parallel kernels and for the benchmark; results are bit-identical.
namespace serial {
ErrorReport estimate_symmetric_error(const DecisionRule& rule, const PhotonDistribution& p_s,
                                     const PhotonDistribution& p_th, const SimConfig& cfg);
std::pair<ErrorReport, ErrorReport> estimate_type_errors(const BinaryTest& test,
                                                         const PhotonDistribution& p_s,
                                                         const PhotonDistribution& p_th,
                                                         const SimConfig& cfg);
RangingResult run_ranging_demo(const RangingConfig& cfg);
}  // namespace serial

}  // namespace rangekit::mc
