#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rangekit/mc.hpp"

using namespace rangekit;
using fock::FockCutoff;
using fock::PhotonDistribution;
using fock::ThermalParams;

namespace {

// Stateful reference SplitMix64 (Steele, Lea & Flood).
struct RefSplitMix {
  std::uint64_t x;
  std::uint64_t next() {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

PhotonDistribution make_dist(std::vector<double> probs, double deficit = 0.0) {
  PhotonDistribution d;
  d.probs = std::move(probs);
  d.deficit = deficit;
  return d;
}

receiver::DecisionRule constant_rule(size_t n, double accept) {
  receiver::DecisionRule rule;
  rule.accept_present.assign(n, accept);
  rule.accept_overflow = 0.0;
  return rule;
}

}  // namespace

TEST_CASE("counter generator reproduces the SplitMix64 stream") {
  // Frozen vectors, also listed in docs/prng.md.
  CounterRng key0(std::uint64_t{0});
  CHECK(key0.next_u64() == 0xE220A8397B1DCDAFULL);
  CHECK(key0.next_u64() == 0x6E789E6AA1B965F4ULL);
  CHECK(key0.next_u64() == 0x06C45D188009454FULL);

  CounterRng key42(std::uint64_t{42});
  CHECK(key42.next_u64() == 0xBDD732262FEB6E95ULL);
  CHECK(key42.next_u64() == 0x28EFE333B266F103ULL);

  // Counter form matches the stateful reference for any key.
  for (std::uint64_t key : {std::uint64_t{7}, std::uint64_t{0xDEADBEEF}, ~std::uint64_t{0}}) {
    RefSplitMix ref{key};
    CounterRng rng(key);
    for (int i = 0; i < 64; ++i) CHECK(rng.next_u64() == ref.next());
  }

  // Units lie in [0,1) and differ across streams.
  CounterRng a(1, 2, 3, 4), b(1, 2, 3, 5);
  CHECK(a.key() != b.key());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("sample_count") {
  SUBCASE("point mass always returns its atom") {
    const auto dist = make_dist({0.0, 0.0, 0.0, 1.0});
    CounterRng rng(123);
    for (int i = 0; i < 100; ++i) CHECK(mc::sample_count(dist, rng) == 3);
  }

  SUBCASE("identical seeds give identical sequences") {
    const auto dist =
        fock::diagonal_distribution(fock::thermal_state(ThermalParams(1.0), FockCutoff(20)));
    CounterRng r1(9, 1, 2, 3), r2(9, 1, 2, 3);
    const mc::CountSampler sampler(dist);
    for (int i = 0; i < 500; ++i) CHECK(sampler.sample(r1) == sampler.sample(r2));
  }

  SUBCASE("empirical frequencies match the thermal law") {
    const auto dist =
        fock::diagonal_distribution(fock::thermal_state(ThermalParams(1.0), FockCutoff(30)));
    const mc::CountSampler sampler(dist);
    CounterRng rng(2718);
    const int trials = 1000000;
    std::vector<int> hits(31, 0);
    for (int i = 0; i < trials; ++i) {
      const int n = sampler.sample(rng);
      if (n >= 0) ++hits[static_cast<size_t>(n)];
    }
    for (int n = 0; n <= 10; ++n) {
      const double p = std::pow(2.0, -(n + 1.0));
      const double freq = static_cast<double>(hits[n]) / trials;
      const double se = std::sqrt(p * (1.0 - p) / trials);
      CHECK(std::abs(freq - p) < 4.0 * se);
    }
  }

  SUBCASE("overflow bin is hit with the deficit probability") {
    const auto dist = make_dist({0.5, 0.3}, 0.2);
    const mc::CountSampler sampler(dist);
    CounterRng rng(55);
    int overflow = 0;
    const int trials = 200000;
    for (int i = 0; i < trials; ++i)
      if (sampler.sample(rng) == mc::kOverflowCount) ++overflow;
    const double freq = static_cast<double>(overflow) / trials;
    CHECK(std::abs(freq - 0.2) < 4.0 * std::sqrt(0.2 * 0.8 / trials));
  }
}

TEST_CASE("estimate_symmetric_error") {
  const FockCutoff cutoff(30);
  const ThermalParams nbar(1.0);
  const auto p_th = fock::diagonal_distribution(fock::thermal_state(nbar, cutoff));
  const auto p_s = fock::diagonal_distribution(fock::dephased_signal_state(nbar, 1.0, cutoff));

  SUBCASE("always-absent rule errs on half the trials") {
    const auto rep = mc::estimate_symmetric_error(constant_rule(31, 0.0), p_s, p_th,
                                                  {100000, 7, 0});
    CHECK(std::abs(rep.value - 0.5) < 4.0 * rep.std_error);
  }

  SUBCASE("accept-everything rule on identical distributions") {
    const auto rep = mc::estimate_symmetric_error(constant_rule(31, 1.0), p_th, p_th,
                                                  {100000, 8, 0});
    CHECK(std::abs(rep.value - 0.5) < 4.0 * rep.std_error);
  }

  SUBCASE("matched rule agrees with the exact finite sum") {
    const auto rule = receiver::np_rule(p_s, p_th);
    const double exact = receiver::symmetric_rule_error(rule, p_s, p_th);
    const auto rep = mc::estimate_symmetric_error(rule, p_s, p_th, {100000, 9, 0});
    CHECK(std::abs(rep.value - exact) < 4.0 * rep.std_error);
    CHECK(rep.std_error ==
          doctest::Approx(std::sqrt(rep.value * (1.0 - rep.value) / 100000)).epsilon(1e-12));
  }

  SUBCASE("trials must be positive") {
    CHECK_THROWS_AS(mc::estimate_symmetric_error(constant_rule(31, 0.0), p_s, p_th, {0, 1, 0}),
                    std::invalid_argument);
  }
}

TEST_CASE("estimate_type_errors") {
  const FockCutoff cutoff(30);
  const ThermalParams nbar(1.0);
  const auto p_th = fock::diagonal_distribution(fock::thermal_state(nbar, cutoff));
  const auto p_s = fock::diagonal_distribution(fock::dephased_signal_state(nbar, 1.0, cutoff));

  SUBCASE("degenerate tests are exact") {
    const auto all_absent = bounds::BinaryTest::classical(std::vector<double>(31, 1.0), 1.0);
    const auto [t1, t2] = mc::estimate_type_errors(all_absent, p_s, p_th, {20000, 3, 0});
    CHECK(t1.value == 0.0);
    CHECK(t2.value == 1.0);
    const auto all_present = bounds::BinaryTest::classical(std::vector<double>(31, 0.0), 0.0);
    const auto [u1, u2] = mc::estimate_type_errors(all_present, p_s, p_th, {20000, 3, 1});
    CHECK(u1.value == 1.0);
    CHECK(u2.value == 0.0);
  }

  SUBCASE("optimal test reproduces the constrained bound") {
    const auto res = bounds::classical_beta(p_s, p_th, 0.01);
    const auto [t1, t2] = mc::estimate_type_errors(res.test, p_s, p_th, {100000, 11, 0});
    CHECK(std::abs(t1.value - 0.01) < 4.0 * t1.std_error);
    CHECK(std::abs(t2.value - 0.943) < 4.0 * t2.std_error);
    // exact counterparts
    const auto [e1, e2] = bounds::stochastic_type_errors(res.test, p_s, p_th);
    CHECK(std::abs(t1.value - e1) < 4.0 * t1.std_error);
    CHECK(std::abs(t2.value - e2) < 4.0 * t2.std_error);
  }

  SUBCASE("quantum tests are not samplable") {
    const auto op = bounds::BinaryTest::quantum(fock::Matrix::Identity(31, 31));
    CHECK_THROWS_AS(mc::estimate_type_errors(op, p_s, p_th, {100, 1, 0}), std::invalid_argument);
  }
}

TEST_CASE("estimators are deterministic and schedule independent") {
  const FockCutoff cutoff(30);
  const ThermalParams nbar(1.0);
  const auto p_th = fock::diagonal_distribution(fock::thermal_state(nbar, cutoff));
  const auto p_s = fock::diagonal_distribution(fock::dephased_signal_state(nbar, 1.5, cutoff));
  const auto rule = receiver::np_rule(p_s, p_th);
  const mc::SimConfig cfg{200000, 31337, 5};

  const auto a = mc::estimate_symmetric_error(rule, p_s, p_th, cfg);
  const auto b = mc::estimate_symmetric_error(rule, p_s, p_th, cfg);
  const auto c = mc::serial::estimate_symmetric_error(rule, p_s, p_th, cfg);
  CHECK(a.value == b.value);
  CHECK(a.value == c.value);

  const auto test = bounds::classical_beta(p_s, p_th, 0.05).test;
  const auto [p1, p2] = mc::estimate_type_errors(test, p_s, p_th, cfg);
  const auto [s1, s2] = mc::serial::estimate_type_errors(test, p_s, p_th, cfg);
  CHECK(p1.value == s1.value);
  CHECK(p2.value == s2.value);
}

TEST_CASE("ranging demo") {
  SUBCASE("defaults reproduce the expected slot statistics") {
    const mc::RangingConfig cfg;
    const auto result = mc::run_ranging_demo(cfg);
    REQUIRE(result.slots.size() == 20);

    // background-only slots stay at the false-alarm budget
    CHECK(result.pooled_empty_rate > 0.006);
    CHECK(result.pooled_empty_rate < 0.014);

    const auto& slot5 = result.slots[4];
    const auto& slot15 = result.slots[14];
    CHECK(std::abs(slot5.detection_rate - 0.2106) < 0.017);
    CHECK(std::abs(slot15.detection_rate - 0.0573) < 0.010);

    // mean detected intensity is nbar + target mean
    for (const auto& s : result.slots) {
      const double expected = 1.0 + s.target_ns;
      CHECK(std::abs(s.mean_intensity - expected) < 4.0 * s.intensity_stderr);
      CHECK(s.rate_stderr ==
            doctest::Approx(std::sqrt(s.detection_rate * (1.0 - s.detection_rate) / cfg.trials))
                .epsilon(1e-12));
    }

    // the optimized detection separates targets from background far more
    // strongly than raw intensity does
    CHECK(result.detection_contrast(5) >= 15.0);
    CHECK(result.detection_contrast(15) >= 5.0);
    CHECK(result.detection_contrast(15) <= 25.0);
    CHECK(result.intensity_contrast(5) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(result.intensity_contrast(15) == doctest::Approx(2.0).epsilon(0.05));
  }

  SUBCASE("no targets means every slot sits at epsilon") {
    mc::RangingConfig cfg;
    cfg.targets.clear();
    cfg.trials = 20000;
    const auto result = mc::run_ranging_demo(cfg);
    for (const auto& s : result.slots)
      CHECK(std::abs(s.detection_rate - cfg.epsilon) < 4.0 * std::max(s.rate_stderr, 1e-3));
  }

  SUBCASE("deterministic across schedules") {
    mc::RangingConfig cfg;
    cfg.trials = 50000;
    cfg.seed = 99;
    const auto a = mc::run_ranging_demo(cfg);
    const auto b = mc::serial::run_ranging_demo(cfg);
    REQUIRE(a.slots.size() == b.slots.size());
    for (size_t i = 0; i < a.slots.size(); ++i) {
      CHECK(a.slots[i].detection_rate == b.slots[i].detection_rate);
      CHECK(a.slots[i].mean_intensity == b.slots[i].mean_intensity);
    }
    CHECK(a.pooled_empty_rate == b.pooled_empty_rate);
  }

  SUBCASE("validation") {
    mc::RangingConfig bad;
    bad.targets = {{25, 1.0}};
    CHECK_THROWS_AS(mc::run_ranging_demo(bad), std::invalid_argument);
    bad.targets = {{5, -1.0}};
    CHECK_THROWS_AS(mc::run_ranging_demo(bad), std::invalid_argument);
    bad = {};
    bad.trials = 0;
    CHECK_THROWS_AS(mc::run_ranging_demo(bad), std::invalid_argument);
  }
}
