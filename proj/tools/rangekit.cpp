#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "rangekit/io.hpp"
#include "rangekit/scenario.hpp"
#include "rangekit/sweeps.hpp"

namespace {

using rangekit::cli::ScenarioConfig;

struct Options {
  ScenarioConfig cfg;
  std::string ns_grid_str;
  std::string phase_mode_str;
  std::string cutoffs_str;
  std::string targets_str;
  std::string out_path;
  std::string format = "csv";
  std::string svg_path;
  bool trials_set = false;
};

// Config-file keys mirror the CLI flags; command-line values win.
void apply_config_key(Options& opt, const std::string& key, const std::string& value) {
  if (key == "nbar")
    opt.cfg.nbar = std::stod(value);
  else if (key == "ns-grid")
    opt.ns_grid_str = value;
  else if (key == "phase-mode")
    opt.phase_mode_str = value;
  else if (key == "cutoff")
    opt.cfg.cutoff = std::stoi(value);
  else if (key == "epsilon")
    opt.cfg.epsilon = std::stod(value);
  else if (key == "rule-reference-ns")
    opt.cfg.rule_reference_ns = std::stod(value);
  else if (key == "seed")
    opt.cfg.seed = std::stoull(value);
  else if (key == "trials") {
    opt.cfg.trials = std::stoll(value);
    opt.trials_set = true;
  } else if (key == "k-phases")
    opt.cfg.k_phases = std::stoi(value);
  else if (key == "cutoffs")
    opt.cutoffs_str = value;
  else if (key == "slots")
    opt.cfg.slots = std::stoi(value);
  else if (key == "targets")
    opt.targets_str = value;
  else if (key == "out")
    opt.out_path = value;
  else if (key == "format")
    opt.format = value;
  else if (key == "svg")
    opt.svg_path = value;
  else
    throw std::invalid_argument("unknown config key '" + key + "'");
}

void add_common_options(CLI::App* sub, Options& opt) {
  // the value is consumed by the pre-parse scan; declared here so the flag
  // is accepted in subcommand position too
  static std::string config_sink;
  sub->add_option("--config", config_sink, "key = value config file (flags override it)");
  sub->add_option("--nbar", opt.cfg.nbar, "Background mean photon number");
  sub->add_option("--ns-grid", opt.ns_grid_str, "Comma-separated signal intensities");
  sub->add_option("--phase-mode", opt.phase_mode_str, "fixed:<phi> or dephased");
  sub->add_option("--cutoff", opt.cfg.cutoff, "Photon-number cutoff (keeps counts 0..cutoff)");
  sub->add_option("--epsilon", opt.cfg.epsilon, "False-alarm probability budget");
  sub->add_option("--rule-reference-ns", opt.cfg.rule_reference_ns,
                  "Signal intensity the fixed rule is built for");
  sub->add_option("--seed", opt.cfg.seed, "PRNG seed");
  sub->add_option("--trials", opt.cfg.trials, "Monte Carlo trials")
      ->each([&opt](const std::string&) { opt.trials_set = true; });
  sub->add_option("--out", opt.out_path, "Output path (stdout when omitted)");
  sub->add_option("--format", opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--svg", opt.svg_path, "Also write an SVG plot to this path");
}

void finalize(Options& opt) {
  if (!opt.ns_grid_str.empty()) opt.cfg.ns_grid = rangekit::cli::parse_double_list(opt.ns_grid_str);
  if (!opt.phase_mode_str.empty()) {
    const auto [dephased, phi] = rangekit::cli::parse_phase_mode(opt.phase_mode_str);
    opt.cfg.dephased = dephased;
    opt.cfg.phi = phi;
  }
  if (!opt.cutoffs_str.empty()) opt.cfg.cutoffs = rangekit::cli::parse_int_list(opt.cutoffs_str);
  if (!opt.targets_str.empty()) opt.cfg.targets = rangekit::cli::parse_targets(opt.targets_str);
}

void emit(const rangekit::io::Table& table, const nlohmann::json* extra, const Options& opt) {
  std::string payload;
  if (opt.format == "json") {
    nlohmann::json doc = rangekit::io::table_json(table);
    if (extra) doc["detail"] = *extra;
    payload = doc.dump(2) + "\n";
  } else {
    payload = rangekit::io::to_csv(table);
  }
  if (opt.out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(opt.out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output path '" + opt.out_path + "'");
    f << payload;
  }
}

rangekit::io::SvgPlot plot_from_columns(const rangekit::io::Table& table, size_t x_col,
                                        const std::vector<size_t>& y_cols,
                                        const std::vector<int>& axes, bool log_x,
                                        const std::string& title, const std::string& x_label) {
  static const char* kColors[] = {"#1f77b4", "#2ca02c", "#d62728", "#ff7f0e", "#9467bd"};
  rangekit::io::SvgPlot plot;
  plot.title = title;
  plot.x_label = x_label;
  plot.log_x = log_x;
  for (size_t k = 0; k < y_cols.size(); ++k) {
    rangekit::io::SvgSeries series;
    series.label = table.columns[y_cols[k]];
    series.color = kColors[k % 5];
    series.axis = axes.empty() ? 0 : axes[k];
    for (const auto& row : table.rows) series.points.emplace_back(row[x_col], row[y_cols[k]]);
    plot.series.push_back(std::move(series));
  }
  if (!plot.series.empty()) plot.y_label = plot.series.front().label;
  return plot;
}

int run(int argc, char** argv) {
  Options opt;

  // --config is applied before the regular parse so flags override it.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      path = arg.substr(9);
    if (!path.empty())
      for (const auto& [key, value] : rangekit::cli::read_config_file(path))
        apply_config_key(opt, key, value);
  }

  CLI::App app{"Single-shot error bounds and ranging simulations for a thermal background "
               "versus an unknown-return displaced-thermal signal"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file (flags override it)");

  auto* sym = app.add_subcommand("sweep-symmetric", "Symmetric error vs signal intensity");
  add_common_options(sym, opt);
  auto* asym = app.add_subcommand("sweep-asymmetric", "Constrained Type-II error vs intensity");
  add_common_options(asym, opt);
  auto* cut = app.add_subcommand("cutoff-study", "Receiver limit vs photon-number cutoff");
  add_common_options(cut, opt);
  cut->add_option("--cutoffs", opt.cutoffs_str, "Ascending comma-separated cutoffs");
  auto* phs = app.add_subcommand("phase-study", "Phase-averaged receiver performance");
  add_common_options(phs, opt);
  phs->add_option("--k-phases", opt.cfg.k_phases, "Phase samples in the average");
  auto* prof = app.add_subcommand("acceptance-profile", "Acceptance probabilities omega(n)");
  add_common_options(prof, opt);
  auto* rng = app.add_subcommand("ranging-demo", "Time-of-flight demo over range slots");
  add_common_options(rng, opt);
  rng->add_option("--slots", opt.cfg.slots, "Number of range slots");
  rng->add_option("--targets", opt.targets_str, "slot:mean pairs, e.g. 5:3,15:1 ('none' clears)");
  auto* check = app.add_subcommand("schema-check", "Validate an emitted CSV file");
  std::string check_path;
  check->add_option("file", check_path, "CSV file to validate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0, parse problems exit 1
  }
  finalize(opt);

  if (check->parsed()) {
    const auto result = rangekit::io::check_csv_file(check_path);
    std::cout << (result.ok ? "ok" : "invalid") << ": " << result.message << "\n";
    return result.ok ? 0 : 1;
  }

  rangekit::io::Table table;
  nlohmann::json extra;
  const nlohmann::json* extra_ptr = nullptr;
  rangekit::io::SvgPlot plot;

  if (sym->parsed()) {
    table = rangekit::cli::sweep_symmetric(opt.cfg);
    plot = plot_from_columns(table, 0, {1, 2, 3, 4, 6}, {}, true, "Symmetric error", "ns");
  } else if (asym->parsed()) {
    table = rangekit::cli::sweep_asymmetric(opt.cfg);
    plot = plot_from_columns(table, 0, {1, 2, 3}, {}, true, "Type-II error at fixed type-I", "ns");
  } else if (cut->parsed()) {
    table = rangekit::cli::cutoff_study(opt.cfg);
    plot = plot_from_columns(table, 0, {2, 3, 1}, {0, 0, 1}, false, "Cutoff dependence", "cutoff");
    plot.y2_label = "beta_opt_abs";
  } else if (phs->parsed()) {
    table = rangekit::cli::phase_study(opt.cfg);
    plot = plot_from_columns(table, 0, {1, 2, 3}, {}, true, "Phase-averaged error", "ns");
  } else if (prof->parsed()) {
    table = rangekit::cli::acceptance_profile(opt.cfg, &extra);
    extra_ptr = &extra;
    plot = plot_from_columns(table, 0, {1, 2}, {}, false, "Acceptance profile", "n");
  } else if (rng->parsed()) {
    if (!opt.trials_set) opt.cfg.trials = 10000;
    opt.cfg.validate();
    const auto rc = rangekit::cli::make_ranging_config(opt.cfg);
    const auto result = rangekit::mc::run_ranging_demo(rc);
    table = rangekit::cli::ranging_table(result);
    extra = rangekit::io::ranging_result_json(result, rc);
    extra_ptr = &extra;
    plot = plot_from_columns(table, 0, {1, 3}, {0, 1}, false, "Ranging demo", "slot");
    plot.y2_label = "mean_intensity";
  }

  emit(table, extra_ptr, opt);
  if (!opt.svg_path.empty()) rangekit::io::write_svg(plot, opt.svg_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const rangekit::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
