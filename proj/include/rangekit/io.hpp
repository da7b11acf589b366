#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rangekit/bounds.hpp"
#include "rangekit/fock.hpp"
#include "rangekit/mc.hpp"
#include "rangekit/receiver.hpp"

namespace rangekit::io {

/// Rectangular numeric result set with a versioned schema id. CSV output
/// is deterministic: shortest round-trip number formatting, LF endings.
struct Table {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);

std::string to_csv(const Table& table);
void write_csv(const Table& table, const std::string& path);

struct SchemaCheck {
  bool ok = false;
  std::string message;
};

/// Validates the version line, schema id, header row, field counts and
/// probability-column ranges of an emitted CSV.
SchemaCheck check_csv(std::istream& in);
SchemaCheck check_csv_file(const std::string& path);

nlohmann::json table_json(const Table& table);
nlohmann::json density_matrix_json(const fock::DensityMatrix& m);
nlohmann::json distribution_json(const fock::PhotonDistribution& d);
nlohmann::json binary_test_json(const bounds::BinaryTest& t);
nlohmann::json asymmetric_result_json(const bounds::AsymmetricResult& r);
nlohmann::json decision_rule_json(const receiver::DecisionRule& r);
nlohmann::json ranging_result_json(const mc::RangingResult& r, const mc::RangingConfig& cfg);

/// Minimal line-plot SVG: fixed 800x600 viewBox, optional log-x, optional
/// secondary y axis (series with axis = 1).
struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<std::pair<double, double>> points;
  int axis = 0;
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string y2_label;
  bool log_x = false;
  std::vector<SvgSeries> series;
};

std::string render_svg(const SvgPlot& plot);
void write_svg(const SvgPlot& plot, const std::string& path);

}  // namespace rangekit::io
