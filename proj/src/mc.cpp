#include "rangekit/mc.hpp"

#include <algorithm>
#include <cmath>

#include "rangekit/parallel.hpp"

namespace rangekit::mc {

namespace {

// Purpose tags separating the counter streams of the different kernels.
constexpr std::uint64_t kTagSymmetric = 0x53594d4dULL;
constexpr std::uint64_t kTagType1 = 0x54595031ULL;
constexpr std::uint64_t kTagType2 = 0x54595032ULL;
constexpr std::uint64_t kTagRanging = 0x524e4745ULL;

double binomial_stderr(double rate, long long trials) {
  return std::sqrt(std::max(0.0, rate * (1.0 - rate)) / static_cast<double>(trials));
}

}  // namespace

double RangingResult::detection_contrast(int slot) const {
  for (const auto& s : slots)
    if (s.slot == slot)
      return pooled_empty_rate > 0.0 ? s.detection_rate / pooled_empty_rate : 0.0;
  throw std::invalid_argument("detection_contrast: no such slot");
}

double RangingResult::intensity_contrast(int slot) const {
  for (const auto& s : slots)
    if (s.slot == slot)
      return pooled_empty_intensity > 0.0 ? s.mean_intensity / pooled_empty_intensity : 0.0;
  throw std::invalid_argument("intensity_contrast: no such slot");
}

CountSampler::CountSampler(const PhotonDistribution& dist) {
  cdf_.resize(dist.probs.size());
  double acc = 0.0;
  for (size_t n = 0; n < dist.probs.size(); ++n) {
    if (dist.probs[n] < 0.0)
      throw std::invalid_argument("CountSampler: negative probability");
    acc += dist.probs[n];
    cdf_[n] = acc;
  }
  if (acc > 1.0 + 1e-9) throw std::invalid_argument("CountSampler: mass exceeds 1");
}

int CountSampler::sample(CounterRng& rng) const {
  const double u = rng.next_unit();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return kOverflowCount;  // the deficit bin
  return static_cast<int>(it - cdf_.begin());
}

int sample_count(const PhotonDistribution& dist, CounterRng& rng) {
  return CountSampler(dist).sample(rng);
}

namespace {

ErrorReport symmetric_impl(const DecisionRule& rule, const PhotonDistribution& p_s,
                           const PhotonDistribution& p_th, const SimConfig& cfg,
                           bool parallel) {
  if (cfg.trials < 1) throw std::invalid_argument("estimate_symmetric_error: trials must be >= 1");
  if (rule.accept_present.size() != p_s.probs.size() ||
      rule.accept_present.size() != p_th.probs.size())
    throw std::invalid_argument("estimate_symmetric_error: length mismatch");

  const CountSampler signal(p_s), background(p_th);
  const auto accept = [&](int count) {
    return count == kOverflowCount ? rule.accept_overflow
                                   : rule.accept_present[static_cast<size_t>(count)];
  };

  long long wrong = 0;
  const long long trials = cfg.trials;
#pragma omp parallel for schedule(static) reduction(+ : wrong) num_threads(thread_cap()) \
    if (parallel && !in_parallel_region())
  for (long long i = 0; i < trials; ++i) {
    CounterRng rng(cfg.seed, kTagSymmetric, cfg.substream, static_cast<std::uint64_t>(i));
    const bool present = rng.next_unit() < 0.5;
    const int count = present ? signal.sample(rng) : background.sample(rng);
    const bool declared = rng.next_unit() < accept(count);
    wrong += (declared != present) ? 1 : 0;
  }

  ErrorReport rep;
  rep.value = static_cast<double>(wrong) / static_cast<double>(trials);
  rep.std_error = binomial_stderr(rep.value, trials);
  rep.kind = bounds::ErrorKind::symmetric;
  return rep;
}

std::pair<ErrorReport, ErrorReport> type_errors_impl(const BinaryTest& test,
                                                     const PhotonDistribution& p_s,
                                                     const PhotonDistribution& p_th,
                                                     const SimConfig& cfg, bool parallel) {
  if (test.kind != bounds::TestKind::classical_stochastic)
    throw std::invalid_argument("estimate_type_errors: quantum tests are not samplable here");
  if (cfg.trials < 1) throw std::invalid_argument("estimate_type_errors: trials must be >= 1");
  if (test.omega.size() != p_s.probs.size() || test.omega.size() != p_th.probs.size())
    throw std::invalid_argument("estimate_type_errors: length mismatch");

  const CountSampler signal(p_s), background(p_th);
  const auto omega = [&](int count) {
    return count == kOverflowCount ? test.omega_overflow
                                   : test.omega[static_cast<size_t>(count)];
  };
  const long long trials = cfg.trials;

  long long false_alarm = 0;
#pragma omp parallel for schedule(static) reduction(+ : false_alarm) num_threads(thread_cap()) \
    if (parallel && !in_parallel_region())
  for (long long i = 0; i < trials; ++i) {
    CounterRng rng(cfg.seed, kTagType1, cfg.substream, static_cast<std::uint64_t>(i));
    const int count = background.sample(rng);
    const bool absent = rng.next_unit() < omega(count);
    false_alarm += absent ? 0 : 1;
  }

  long long missed = 0;
#pragma omp parallel for schedule(static) reduction(+ : missed) num_threads(thread_cap()) \
    if (parallel && !in_parallel_region())
  for (long long i = 0; i < trials; ++i) {
    CounterRng rng(cfg.seed, kTagType2, cfg.substream, static_cast<std::uint64_t>(i));
    const int count = signal.sample(rng);
    const bool absent = rng.next_unit() < omega(count);
    missed += absent ? 1 : 0;
  }

  ErrorReport t1, t2;
  t1.value = static_cast<double>(false_alarm) / static_cast<double>(trials);
  t1.std_error = binomial_stderr(t1.value, trials);
  t1.kind = bounds::ErrorKind::type1;
  t2.value = static_cast<double>(missed) / static_cast<double>(trials);
  t2.std_error = binomial_stderr(t2.value, trials);
  t2.kind = bounds::ErrorKind::type2;
  return {t1, t2};
}

RangingResult ranging_impl(const RangingConfig& cfg, bool parallel) {
  if (cfg.slots < 1) throw std::invalid_argument("run_ranging_demo: slots must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("run_ranging_demo: trials must be >= 1");
  for (const auto& [slot, mean] : cfg.targets) {
    if (slot < 1 || slot > cfg.slots)
      throw std::invalid_argument("run_ranging_demo: target slot outside [1, slots]");
    if (!(mean >= 0.0)) throw std::invalid_argument("run_ranging_demo: target mean must be >= 0");
  }

  const fock::FockCutoff cutoff(cfg.cutoff);
  const fock::ThermalParams nbar(cfg.background_nbar);
  const PhotonDistribution p_bg = fock::diagonal_distribution(fock::thermal_state(nbar, cutoff));
  const PhotonDistribution p_ref = fock::diagonal_distribution(
      fock::dephased_signal_state(nbar, std::sqrt(cfg.rule_reference_ns), cutoff));

  RangingResult result;
  // One acceptance test for every slot; the false-alarm constraint pins it
  // to the background, and the phase-averaged family shares one
  // likelihood-ratio ordering, so it is intensity-independent.
  result.rule = bounds::classical_beta(p_ref, p_bg, cfg.epsilon);
  const auto& test = result.rule.test;
  const auto omega = [&](int count) {
    return count == kOverflowCount ? test.omega_overflow
                                   : test.omega[static_cast<size_t>(count)];
  };

  const long long trials = cfg.trials;
  long long empty_detections = 0;
  long long empty_trials = 0;
  long long empty_count_sum = 0;

  for (int slot = 1; slot <= cfg.slots; ++slot) {
    const auto target = cfg.targets.find(slot);
    const double ns = target == cfg.targets.end() ? 0.0 : target->second;
    const PhotonDistribution dist =
        ns == 0.0 ? p_bg
                  : fock::diagonal_distribution(
                        fock::dephased_signal_state(nbar, std::sqrt(ns), cutoff));
    const CountSampler sampler(dist);

    long long detected = 0, count_sum = 0, count_sq = 0;
#pragma omp parallel for schedule(static) reduction(+ : detected, count_sum, count_sq) \
    num_threads(thread_cap()) if (parallel && !in_parallel_region())
    for (long long i = 0; i < trials; ++i) {
      CounterRng rng(cfg.seed, kTagRanging, static_cast<std::uint64_t>(slot),
                     static_cast<std::uint64_t>(i));
      const int count = sampler.sample(rng);
      const bool absent = rng.next_unit() < omega(count);
      const long long intensity = count == kOverflowCount ? cfg.cutoff + 1 : count;
      detected += absent ? 0 : 1;
      count_sum += intensity;
      count_sq += intensity * intensity;
    }

    SlotResult sr;
    sr.slot = slot;
    sr.target_ns = ns;
    sr.detection_rate = static_cast<double>(detected) / static_cast<double>(trials);
    sr.rate_stderr = binomial_stderr(sr.detection_rate, trials);
    sr.mean_intensity = static_cast<double>(count_sum) / static_cast<double>(trials);
    const double second_moment = static_cast<double>(count_sq) / static_cast<double>(trials);
    sr.intensity_stderr = std::sqrt(
        std::max(0.0, second_moment - sr.mean_intensity * sr.mean_intensity) /
        static_cast<double>(trials));
    result.slots.push_back(sr);

    if (ns == 0.0) {
      empty_detections += detected;
      empty_trials += trials;
      empty_count_sum += count_sum;
    }
  }

  if (empty_trials > 0) {
    result.pooled_empty_rate =
        static_cast<double>(empty_detections) / static_cast<double>(empty_trials);
    result.pooled_empty_stderr = binomial_stderr(result.pooled_empty_rate, empty_trials);
    result.pooled_empty_intensity =
        static_cast<double>(empty_count_sum) / static_cast<double>(empty_trials);
  }
  return result;
}

}  // namespace

ErrorReport estimate_symmetric_error(const DecisionRule& rule, const PhotonDistribution& p_s,
                                     const PhotonDistribution& p_th, const SimConfig& cfg) {
  return symmetric_impl(rule, p_s, p_th, cfg, true);
}

std::pair<ErrorReport, ErrorReport> estimate_type_errors(const BinaryTest& test,
                                                         const PhotonDistribution& p_s,
                                                         const PhotonDistribution& p_th,
                                                         const SimConfig& cfg) {
  return type_errors_impl(test, p_s, p_th, cfg, true);
}

RangingResult run_ranging_demo(const RangingConfig& cfg) { return ranging_impl(cfg, true); }

namespace serial {

ErrorReport estimate_symmetric_error(const DecisionRule& rule, const PhotonDistribution& p_s,
                                     const PhotonDistribution& p_th, const SimConfig& cfg) {
  return symmetric_impl(rule, p_s, p_th, cfg, false);
}

std::pair<ErrorReport, ErrorReport> estimate_type_errors(const BinaryTest& test,
                                                         const PhotonDistribution& p_s,
                                                         const PhotonDistribution& p_th,
                                                         const SimConfig& cfg) {
  return type_errors_impl(test, p_s, p_th, cfg, false);
}

RangingResult run_ranging_demo(const RangingConfig& cfg) { return ranging_impl(cfg, false); }

}  // namespace serial

}  // namespace rangekit::mc
