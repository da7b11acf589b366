#pragma once

#include <json.hpp>

#include "rangekit/io.hpp"
#include "rangekit/mc.hpp"
#include "rangekit/scenario.hpp"

namespace rangekit::cli {

/// Exact finite-sum values backing the Monte Carlo columns of the
/// symmetric sweep, one entry per grid row.
struct SymmetricRowDetail {
  double exact_matched = 0.0;
  double exact_mismatched = 0.0;
};

/// Symmetric-error sweep over the intensity grid: quantum limit, fixed
/// receiver limit, fixed-rule theory, and seeded Monte Carlo for matched
/// and mismatched rules.
io::Table sweep_symmetric(const ScenarioConfig& cfg,
                          std::vector<SymmetricRowDetail>* details = nullptr);

/// Asymmetric sweep: quantum and measured Type-II bounds plus Monte Carlo
/// for one acceptance test built from the background and reused on every
/// row.
io::Table sweep_asymmetric(const ScenarioConfig& cfg);

/// Receiver-limit dependence on the photon-number cutoff at fixed
/// parameters; the quantum limit at the largest cutoff serves as the
/// reference line.
io::Table cutoff_study(const ScenarioConfig& cfg);

/// Phase-sensitive receiver averaged over the signal phase versus the
/// fixed-phase value and the phase-insensitive optimum.
io::Table phase_study(const ScenarioConfig& cfg);

/// Acceptance profiles omega(n) for the fixed-phase (post-displacement)
/// and dephased tests; `extra`, when given, receives the full test
/// serializations.
io::Table acceptance_profile(const ScenarioConfig& cfg, nlohmann::json* extra = nullptr);

mc::RangingConfig make_ranging_config(const ScenarioConfig& cfg);
io::Table ranging_table(const mc::RangingResult& result);

}  // namespace rangekit::cli
