#include "rangekit/sweeps.hpp"

#include <cmath>
#include <optional>

#include "rangekit/parallel.hpp"

namespace rangekit::cli {

namespace {

using bounds::classical_beta;
using bounds::helstrom_error;
using bounds::measured_helstrom_error;
using bounds::mismatched_symmetric_error;
using bounds::quantum_beta;
using bounds::stochastic_type_errors;
using fock::DensityMatrix;
using fock::FockCutoff;
using fock::PhotonDistribution;
using fock::SignalParams;
using fock::ThermalParams;
using receiver::np_rule;
using receiver::optimize_displacement;
using receiver::receiver_distribution;
using receiver::ReceiverConfig;
using receiver::symmetric_rule_error;

std::vector<double> grid_of(const ScenarioConfig& cfg) {
  return cfg.ns_grid.empty() ? default_ns_grid() : cfg.ns_grid;
}

// Measurement front end shared by the sweeps: post-displacement counting
// in fixed-phase mode, plain counting of the diagonal states when
// dephased.
struct Frontend {
  const ScenarioConfig& cfg;
  FockCutoff cutoff;
  ThermalParams nbar;
  std::optional<ReceiverConfig> recv;  // engaged in fixed-phase mode

  explicit Frontend(const ScenarioConfig& c)
      : cfg(c), cutoff(c.cutoff), nbar(c.nbar) {
    if (!cfg.dephased) {
      const auto opt = optimize_displacement(
          nbar, SignalParams(std::sqrt(cfg.rule_reference_ns), cfg.phi), cutoff);
      recv.emplace(opt.displacement, cutoff);
    }
  }

  DensityMatrix signal_state(double ns) const {
    return cfg.dephased
               ? fock::dephased_signal_state(nbar, std::sqrt(ns), cutoff)
               : fock::displaced_thermal_state(nbar, SignalParams(std::sqrt(ns), cfg.phi),
                                               cutoff);
  }

  DensityMatrix thermal() const { return fock::thermal_state(nbar, cutoff); }

  PhotonDistribution measure(const DensityMatrix& state) const {
    return recv ? receiver_distribution(state, *recv) : fock::diagonal_distribution(state);
  }
};

}  // namespace

io::Table sweep_symmetric(const ScenarioConfig& cfg, std::vector<SymmetricRowDetail>* details) {
  cfg.validate();
  const std::vector<double> grid = grid_of(cfg);
  const Frontend fe(cfg);

  const DensityMatrix rho_th = fe.thermal();
  const PhotonDistribution p_th = fe.measure(rho_th);
  const PhotonDistribution p_rule = fe.measure(fe.signal_state(cfg.rule_reference_ns));
  const receiver::DecisionRule fixed_rule = np_rule(p_rule, p_th);

  io::Table table;
  table.schema = "sweep-symmetric.v1";
  table.columns = {"ns",         "helstrom",          "kennedy_limit",
                   "mismatched_theory", "mc_matched",  "mc_matched_stderr",
                   "mc_mismatched",     "mc_mismatched_stderr"};
  table.rows.resize(grid.size());
  if (details) details->resize(grid.size());

#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
  for (size_t i = 0; i < grid.size(); ++i) {
    const double ns = grid[i];
    const DensityMatrix rho_s = fe.signal_state(ns);
    const PhotonDistribution p_s = fe.measure(rho_s);

    const double helstrom = helstrom_error(rho_s, rho_th).value;
    const double kennedy = measured_helstrom_error(p_s, p_th).value;
    const double mismatched = mismatched_symmetric_error(p_s, p_th, p_rule).value;

    const receiver::DecisionRule matched_rule = np_rule(p_s, p_th);
    const double exact_matched = symmetric_rule_error(matched_rule, p_s, p_th);

    mc::SimConfig sim{cfg.trials, cfg.seed, 2 * static_cast<std::uint64_t>(i)};
    const auto mc_matched = mc::estimate_symmetric_error(matched_rule, p_s, p_th, sim);
    sim.substream = 2 * static_cast<std::uint64_t>(i) + 1;
    const auto mc_mismatched = mc::estimate_symmetric_error(fixed_rule, p_s, p_th, sim);

    table.rows[i] = {ns,
                     helstrom,
                     kennedy,
                     mismatched,
                     mc_matched.value,
                     mc_matched.std_error,
                     mc_mismatched.value,
                     mc_mismatched.std_error};
    if (details) (*details)[i] = {exact_matched, mismatched};
  }
  return table;
}

io::Table sweep_asymmetric(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::vector<double> grid = grid_of(cfg);
  const Frontend fe(cfg);

  const DensityMatrix rho_th = fe.thermal();
  const PhotonDistribution p_th = fe.measure(rho_th);
  // One acceptance test for the whole sweep: the constraint pins it to the
  // background, the reference signal only orders the likelihood ratios.
  const auto fixed_test =
      classical_beta(fe.measure(fe.signal_state(cfg.rule_reference_ns)), p_th, cfg.epsilon);

  io::Table table;
  table.schema = "sweep-asymmetric.v1";
  table.columns = {"ns", "quantum_beta", "measured_beta", "mc_type2", "mc_type2_stderr",
                   "achieved_type1"};
  table.rows.resize(grid.size());

#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
  for (size_t i = 0; i < grid.size(); ++i) {
    const double ns = grid[i];
    const DensityMatrix rho_s = fe.signal_state(ns);
    const PhotonDistribution p_s = fe.measure(rho_s);

    const double qbeta = quantum_beta(rho_s, rho_th, cfg.epsilon).beta;
    const auto [type1, measured_beta] = stochastic_type_errors(fixed_test.test, p_s, p_th);

    const mc::SimConfig sim{cfg.trials, cfg.seed, static_cast<std::uint64_t>(i)};
    const auto [mc_t1, mc_t2] = mc::estimate_type_errors(fixed_test.test, p_s, p_th, sim);
    (void)mc_t1;

    table.rows[i] = {ns, qbeta, measured_beta, mc_t2.value, mc_t2.std_error, type1};
  }
  return table;
}

io::Table cutoff_study(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.dephased)
    throw std::invalid_argument("cutoff-study runs in fixed-phase mode");

  const ThermalParams nbar(cfg.nbar);
  const SignalParams signal(std::sqrt(cfg.rule_reference_ns), cfg.phi);

  const FockCutoff largest(cfg.cutoffs.back());
  const double helstrom_ref =
      helstrom_error(fock::displaced_thermal_state(nbar, signal, largest),
                     fock::thermal_state(nbar, largest))
          .value;

  io::Table table;
  table.schema = "cutoff-study.v1";
  table.columns = {"cutoff", "beta_opt_abs", "kennedy_limit", "helstrom_ref"};
  for (int c : cfg.cutoffs) {
    const FockCutoff cut(c);
    const auto opt = optimize_displacement(nbar, signal, cut);
    table.rows.push_back(
        {static_cast<double>(c), std::abs(opt.displacement), opt.objective, helstrom_ref});
  }
  return table;
}

io::Table phase_study(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.dephased)
    throw std::invalid_argument("phase-study uses a fixed-phase receiver");
  const std::vector<double> grid = grid_of(cfg);
  const FockCutoff cutoff(cfg.cutoff);
  const ThermalParams nbar(cfg.nbar);
  const SignalParams reference(std::sqrt(cfg.rule_reference_ns), cfg.phi);

  const auto opt = optimize_displacement(nbar, reference, cutoff);
  const ReceiverConfig recv(opt.displacement, cutoff);
  const DensityMatrix rho_th = fock::thermal_state(nbar, cutoff);
  const PhotonDistribution p_th = receiver_distribution(rho_th, recv);
  const receiver::DecisionRule rule =
      np_rule(receiver_distribution(fock::displaced_thermal_state(nbar, reference, cutoff), recv),
              p_th);
  const PhotonDistribution p_th_diag = fock::diagonal_distribution(rho_th);

  io::Table table;
  table.schema = "phase-study.v1";
  table.columns = {"ns", "phase_averaged_error", "fixed_phase_error", "dephased_optimal_error"};
  table.rows.resize(grid.size());

  for (size_t i = 0; i < grid.size(); ++i) {
    const double ns = grid[i];
    const double amplitude = std::sqrt(ns);
    const double averaged =
        receiver::phase_averaged_error(nbar, amplitude, recv, reference, cfg.k_phases).value;
    const PhotonDistribution p_s_fixed = receiver_distribution(
        fock::displaced_thermal_state(nbar, SignalParams(amplitude, cfg.phi), cutoff), recv);
    const double fixed_phase = symmetric_rule_error(rule, p_s_fixed, p_th);
    const double dephased_optimal =
        measured_helstrom_error(
            fock::diagonal_distribution(fock::dephased_signal_state(nbar, amplitude, cutoff)),
            p_th_diag)
            .value;
    table.rows[i] = {ns, averaged, fixed_phase, dephased_optimal};
  }
  return table;
}

io::Table acceptance_profile(const ScenarioConfig& cfg, nlohmann::json* extra) {
  cfg.validate();
  const FockCutoff cutoff(cfg.cutoff);
  const ThermalParams nbar(cfg.nbar);
  const SignalParams reference(std::sqrt(cfg.rule_reference_ns), cfg.phi);

  const auto opt = optimize_displacement(nbar, reference, cutoff);
  const ReceiverConfig recv(opt.displacement, cutoff);
  const DensityMatrix rho_th = fock::thermal_state(nbar, cutoff);
  const auto fixed = classical_beta(
      receiver_distribution(fock::displaced_thermal_state(nbar, reference, cutoff), recv),
      receiver_distribution(rho_th, recv), cfg.epsilon);
  const auto dephased = classical_beta(
      fock::diagonal_distribution(
          fock::dephased_signal_state(nbar, reference.amplitude, cutoff)),
      fock::diagonal_distribution(rho_th), cfg.epsilon);

  io::Table table;
  table.schema = "acceptance-profile.v1";
  table.columns = {"n", "omega_fixed", "omega_dephased"};
  for (int n = 0; n < cutoff.dim(); ++n)
    table.rows.push_back({static_cast<double>(n), fixed.test.omega[static_cast<size_t>(n)],
                          dephased.test.omega[static_cast<size_t>(n)]});
  if (extra)
    *extra = {{"fixed", io::asymmetric_result_json(fixed)},
              {"dephased", io::asymmetric_result_json(dephased)}};
  return table;
}

mc::RangingConfig make_ranging_config(const ScenarioConfig& cfg) {
  mc::RangingConfig rc;
  rc.slots = cfg.slots;
  rc.targets = cfg.targets;
  rc.background_nbar = cfg.nbar;
  rc.epsilon = cfg.epsilon;
  rc.trials = cfg.trials;
  rc.seed = cfg.seed;
  rc.cutoff = cfg.cutoff;
  rc.rule_reference_ns = cfg.rule_reference_ns;
  return rc;
}

io::Table ranging_table(const mc::RangingResult& result) {
  io::Table table;
  table.schema = "ranging-demo.v1";
  table.columns = {"slot", "detection_rate", "stderr", "mean_intensity"};
  for (const auto& s : result.slots)
    table.rows.push_back(
        {static_cast<double>(s.slot), s.detection_rate, s.rate_stderr, s.mean_intensity});
  return table;
}

}  // namespace rangekit::cli
