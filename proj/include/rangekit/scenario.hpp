#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace rangekit::cli {

/// Physical and numerical parameters shared by the study subcommands.
/// Defaults: unit-mean thermal background, cutoff 30, false-alarm budget
/// 0.01, decision rule referenced to signal intensity 1.
struct ScenarioConfig {
  double nbar = 1.0;
  std::vector<double> ns_grid;   // defaults to default_ns_grid() when empty
  bool dephased = false;         // fixed-phase mode otherwise
  double phi = 0.0;              // signal phase in fixed-phase mode
  int cutoff = 30;
  double epsilon = 0.01;
  double rule_reference_ns = 1.0;
  std::uint64_t seed = 1;
  long long trials = 100000;
  int k_phases = 128;
  std::vector<int> cutoffs = {5, 10, 15, 20, 25, 30};
  // ranging-demo extras
  int slots = 20;
  std::map<int, double> targets = {{5, 3.0}, {15, 1.0}};

  void validate() const;  // throws std::invalid_argument
};

/// 25 logarithmically spaced intensities in [0.01, 10].
std::vector<double> default_ns_grid();

std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
/// "fixed:<phi>" or "dephased" -> (dephased?, phi)
std::pair<bool, double> parse_phase_mode(const std::string& text);
/// "5:3,15:1" -> {slot: mean}
std::map<int, double> parse_targets(const std::string& text);

/// Flat `key = value` file with '#' comments; returns pairs in file order.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace rangekit::cli
