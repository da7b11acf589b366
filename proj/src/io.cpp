#include "rangekit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace rangekit::io {

namespace {

struct SchemaInfo {
  std::string id;
  std::vector<std::string> columns;
  std::vector<size_t> probability_columns;  // values required to lie in [0,1]
};

const std::vector<SchemaInfo>& known_schemas() {
  static const std::vector<SchemaInfo> schemas = {
      {"sweep-symmetric.v1",
       {"ns", "helstrom", "kennedy_limit", "mismatched_theory", "mc_matched",
        "mc_matched_stderr", "mc_mismatched", "mc_mismatched_stderr"},
       {1, 2, 3, 4, 5, 6, 7}},
      {"sweep-asymmetric.v1",
       {"ns", "quantum_beta", "measured_beta", "mc_type2", "mc_type2_stderr", "achieved_type1"},
       {1, 2, 3, 4, 5}},
      {"cutoff-study.v1", {"cutoff", "beta_opt_abs", "kennedy_limit", "helstrom_ref"}, {2, 3}},
      {"phase-study.v1",
       {"ns", "phase_averaged_error", "fixed_phase_error", "dephased_optimal_error"},
       {1, 2, 3}},
      {"acceptance-profile.v1", {"n", "omega_fixed", "omega_dephased"}, {1, 2}},
      {"ranging-demo.v1", {"slot", "detection_rate", "stderr", "mean_intensity"}, {1, 2}},
  };
  return schemas;
}

const SchemaInfo* find_schema(const std::string& id) {
  for (const auto& s : known_schemas())
    if (s.id == id) return &s;
  return nullptr;
}

constexpr char kVersionPrefix[] = "# rangekit-csv v1 schema=";
constexpr char kConventionLine[] =
    "# cutoff convention: cutoff D keeps photon numbers 0..D (matrix dimension D+1)";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  out += kVersionPrefix;
  out += table.schema;
  out += '\n';
  out += kConventionLine;
  out += '\n';
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Table& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("write_csv: cannot open " + path);
  f << to_csv(table);
}

SchemaCheck check_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kVersionPrefix, 0) != 0)
    return {false, "missing or malformed version line"};
  const std::string id = line.substr(sizeof(kVersionPrefix) - 1);
  const SchemaInfo* schema = find_schema(id);
  if (!schema) return {false, "unknown schema '" + id + "'"};

  // Any number of further comment lines may precede the header.
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
  }
  std::vector<std::string> header = split(line, ',');
  if (header != schema->columns) return {false, "header does not match schema '" + id + "'"};

  size_t row_no = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row_no;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != schema->columns.size())
      return {false, "row " + std::to_string(row_no) + ": wrong field count"};
    std::vector<double> values(fields.size());
    for (size_t c = 0; c < fields.size(); ++c) {
      const char* b = fields[c].data();
      const char* e = b + fields[c].size();
      auto [ptr, ec] = std::from_chars(b, e, values[c]);
      if (ec != std::errc{} || ptr != e)
        return {false, "row " + std::to_string(row_no) + ": field '" + fields[c] +
                           "' is not a number"};
    }
    for (size_t c : schema->probability_columns) {
      if (values[c] < -1e-12 || values[c] > 1.0 + 1e-12)
        return {false, "row " + std::to_string(row_no) + ": column '" + schema->columns[c] +
                           "' outside [0,1]"};
    }
  }
  return {true, "schema " + id + ", " + std::to_string(row_no) + " rows"};
}

SchemaCheck check_csv_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return {false, "cannot open " + path};
  return check_csv(f);
}

nlohmann::json table_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj;
    for (size_t c = 0; c < table.columns.size() && c < row.size(); ++c)
      obj[table.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  return {{"schema", table.schema}, {"rows", std::move(rows)}};
}

nlohmann::json density_matrix_json(const fock::DensityMatrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.dim(); ++c)
      entries.push_back({m.entries()(r, c).real(), m.entries()(r, c).imag()});
  return {{"dim", m.dim()},
          {"trace_deficit", m.trace_deficit()},
          {"layout", "row-major [re, im] pairs"},
          {"entries", std::move(entries)}};
}

nlohmann::json distribution_json(const fock::PhotonDistribution& d) {
  return {{"probs", d.probs}, {"deficit", d.deficit}};
}

nlohmann::json binary_test_json(const bounds::BinaryTest& t) {
  if (t.kind == bounds::TestKind::classical_stochastic)
    return {{"kind", "classical-stochastic"},
            {"omega", t.omega},
            {"omega_overflow", t.omega_overflow}};
  nlohmann::json entries = nlohmann::json::array();
  for (int r = 0; r < t.op.rows(); ++r)
    for (int c = 0; c < t.op.cols(); ++c) entries.push_back({t.op(r, c).real(), t.op(r, c).imag()});
  return {{"kind", "quantum-operator"},
          {"dim", t.op.rows()},
          {"layout", "row-major [re, im] pairs"},
          {"operator", std::move(entries)}};
}

nlohmann::json asymmetric_result_json(const bounds::AsymmetricResult& r) {
  return {{"beta", r.beta},
          {"type1", r.type1},
          {"duality_gap", r.duality_gap},
          {"test", binary_test_json(r.test)}};
}

nlohmann::json decision_rule_json(const receiver::DecisionRule& r) {
  return {{"kind", r.deterministic() ? "deterministic" : "stochastic"},
          {"accept_present", r.accept_present},
          {"accept_overflow", r.accept_overflow}};
}

nlohmann::json ranging_result_json(const mc::RangingResult& r, const mc::RangingConfig& cfg) {
  nlohmann::json targets = nlohmann::json::object();
  for (const auto& [slot, mean] : cfg.targets) targets[std::to_string(slot)] = mean;
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : r.slots) {
    nlohmann::json entry = {{"slot", s.slot},
                            {"target_ns", s.target_ns},
                            {"detection_rate", s.detection_rate},
                            {"rate_stderr", s.rate_stderr},
                            {"mean_intensity", s.mean_intensity},
                            {"intensity_stderr", s.intensity_stderr}};
    if (s.target_ns > 0.0) {
      entry["detection_contrast"] = r.detection_contrast(s.slot);
      entry["intensity_contrast"] = r.intensity_contrast(s.slot);
    }
    slots.push_back(std::move(entry));
  }
  return {{"config",
           {{"slots", cfg.slots},
            {"targets", std::move(targets)},
            {"background_nbar", cfg.background_nbar},
            {"epsilon", cfg.epsilon},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"cutoff", cfg.cutoff},
            {"rule_reference_ns", cfg.rule_reference_ns}}},
          {"rule", asymmetric_result_json(r.rule)},
          {"slots", std::move(slots)},
          {"pooled_empty_rate", r.pooled_empty_rate},
          {"pooled_empty_stderr", r.pooled_empty_stderr},
          {"pooled_empty_intensity", r.pooled_empty_intensity}};
}

namespace {

struct AxisScale {
  double lo = 0.0, hi = 1.0;
  double map(double v, double px_lo, double px_hi) const {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return px_lo + t * (px_hi - px_lo);
  }
};

AxisScale fit_axis(const std::vector<double>& values) {
  AxisScale ax;
  if (values.empty()) return ax;
  ax.lo = *std::min_element(values.begin(), values.end());
  ax.hi = *std::max_element(values.begin(), values.end());
  if (ax.hi - ax.lo < 1e-300) {
    ax.lo -= 0.5;
    ax.hi += 0.5;
  } else {
    const double pad = 0.05 * (ax.hi - ax.lo);
    ax.lo -= pad;
    ax.hi += pad;
  }
  return ax;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  constexpr double W = 800, H = 600;
  constexpr double L = 80, R = 720, T = 60, B = 540;  // plot frame

  std::vector<double> xs, y0s, y1s;
  for (const auto& s : plot.series)
    for (const auto& [x, y] : s.points) {
      xs.push_back(plot.log_x ? std::log10(std::max(x, 1e-300)) : x);
      (s.axis == 0 ? y0s : y1s).push_back(y);
    }
  const AxisScale ax = fit_axis(xs);
  const AxisScale ay0 = fit_axis(y0s);
  const AxisScale ay1 = fit_axis(y1s);
  const bool dual = !y1s.empty();

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
         "font-family=\"sans-serif\" font-size=\"14\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">"
      << xml_escape(plot.title) << "</text>\n";
  svg << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << R - L << "\" height=\""
      << B - T << "\" fill=\"none\" stroke=\"black\"/>\n";

  // ticks
  for (int i = 0; i <= 5; ++i) {
    const double fx = L + (R - L) * i / 5.0;
    const double vx = ax.lo + (ax.hi - ax.lo) * i / 5.0;
    svg << "<line x1=\"" << fx << "\" y1=\"" << B << "\" x2=\"" << fx << "\" y2=\"" << B + 6
        << "\" stroke=\"black\"/>\n";
    std::ostringstream lbl;
    lbl.precision(3);
    lbl << (plot.log_x ? std::pow(10.0, vx) : vx);
    svg << "<text x=\"" << fx << "\" y=\"" << B + 22 << "\" text-anchor=\"middle\">" << lbl.str()
        << "</text>\n";

    const double fy = B - (B - T) * i / 5.0;
    std::ostringstream ly;
    ly.precision(3);
    ly << ay0.lo + (ay0.hi - ay0.lo) * i / 5.0;
    svg << "<line x1=\"" << L - 6 << "\" y1=\"" << fy << "\" x2=\"" << L << "\" y2=\"" << fy
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << L - 10 << "\" y=\"" << fy + 5 << "\" text-anchor=\"end\">" << ly.str()
        << "</text>\n";
    if (dual) {
      std::ostringstream ry;
      ry.precision(3);
      ry << ay1.lo + (ay1.hi - ay1.lo) * i / 5.0;
      svg << "<line x1=\"" << R << "\" y1=\"" << fy << "\" x2=\"" << R + 6 << "\" y2=\"" << fy
          << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << R + 10 << "\" y=\"" << fy + 5 << "\" text-anchor=\"start\">"
          << ry.str() << "</text>\n";
    }
  }
  svg << "<text x=\"" << (L + R) / 2 << "\" y=\"" << B + 45 << "\" text-anchor=\"middle\">"
      << xml_escape(plot.x_label) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << (T + B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << (T + B) / 2 << ")\">" << xml_escape(plot.y_label) << "</text>\n";
  if (dual)
    svg << "<text x=\"780\" y=\"" << (T + B) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(90 780 " << (T + B) / 2 << ")\">"
        << xml_escape(plot.y2_label) << "</text>\n";

  double legend_y = T + 18;
  for (const auto& s : plot.series) {
    const AxisScale& ay = s.axis == 0 ? ay0 : ay1;
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : s.points) {
      const double vx = plot.log_x ? std::log10(std::max(x, 1e-300)) : x;
      svg << ax.map(vx, L, R) << ',' << ay.map(y, B, T) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << L + 12 << "\" y=\"" << legend_y << "\" fill=\"" << s.color << "\">"
        << xml_escape(s.label) << "</text>\n";
    legend_y += 18;
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const SvgPlot& plot, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("write_svg: cannot open " + path);
  f << render_svg(plot);
}

}  // namespace rangekit::io
