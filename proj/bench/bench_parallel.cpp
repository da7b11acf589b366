// Times the OpenMP kernels against their serial reference implementations
// and verifies that both produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "rangekit/mc.hpp"
#include "rangekit/parallel.hpp"

using namespace rangekit;

namespace {

template <typename F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", thread_cap());

  const fock::FockCutoff cutoff(30);
  const fock::ThermalParams nbar(1.0);
  const auto p_th = fock::diagonal_distribution(fock::thermal_state(nbar, cutoff));
  const auto p_s =
      fock::diagonal_distribution(fock::dephased_signal_state(nbar, 1.0, cutoff));

  {
    const auto rule = receiver::np_rule(p_s, p_th);
    const mc::SimConfig cfg{4000000, 42, 0};
    bounds::ErrorReport a, b;
    const double ts = time_ms([&] { a = mc::serial::estimate_symmetric_error(rule, p_s, p_th, cfg); });
    const double tp = time_ms([&] { b = mc::estimate_symmetric_error(rule, p_s, p_th, cfg); });
    report("estimate_symmetric_error", ts, tp, a.value == b.value);
  }

  {
    const auto test = bounds::classical_beta(p_s, p_th, 0.01).test;
    const mc::SimConfig cfg{4000000, 42, 0};
    std::pair<bounds::ErrorReport, bounds::ErrorReport> a, b;
    const double ts = time_ms([&] { a = mc::serial::estimate_type_errors(test, p_s, p_th, cfg); });
    const double tp = time_ms([&] { b = mc::estimate_type_errors(test, p_s, p_th, cfg); });
    report("estimate_type_errors", ts, tp,
           a.first.value == b.first.value && a.second.value == b.second.value);
  }

  {
    mc::RangingConfig cfg;
    cfg.trials = 200000;
    mc::RangingResult a, b;
    const double ts = time_ms([&] { a = mc::serial::run_ranging_demo(cfg); });
    const double tp = time_ms([&] { b = mc::run_ranging_demo(cfg); });
    bool same = a.pooled_empty_rate == b.pooled_empty_rate && a.slots.size() == b.slots.size();
    for (size_t i = 0; same && i < a.slots.size(); ++i)
      same = a.slots[i].detection_rate == b.slots[i].detection_rate &&
             a.slots[i].mean_intensity == b.slots[i].mean_intensity;
    report("run_ranging_demo", ts, tp, same);
  }

  {
    const auto opt = receiver::optimize_displacement(nbar, fock::SignalParams(1.0, 0.0), cutoff);
    const receiver::ReceiverConfig recv(opt.displacement, cutoff);
    bounds::ErrorReport a, b;
    const double ts = time_ms([&] {
      a = receiver::serial::phase_averaged_error(nbar, 1.0, recv, fock::SignalParams(1.0, 0.0), 512);
    });
    const double tp = time_ms([&] {
      b = receiver::phase_averaged_error(nbar, 1.0, recv, fock::SignalParams(1.0, 0.0), 512);
    });
    report("phase_averaged_error", ts, tp, a.value == b.value);
  }

  return 0;
}
