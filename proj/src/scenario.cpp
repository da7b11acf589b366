#include "rangekit/scenario.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rangekit::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (nbar < 0.0) throw std::invalid_argument("nbar must be >= 0");
  for (double ns : ns_grid)
    if (!(ns >= 0.0)) throw std::invalid_argument("ns-grid values must be >= 0");
  if (cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
  if (rule_reference_ns < 0.0) throw std::invalid_argument("rule-reference-ns must be >= 0");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (k_phases < 1) throw std::invalid_argument("k-phases must be >= 1");
  if (cutoffs.empty()) throw std::invalid_argument("cutoffs must be non-empty");
  for (size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] < 1) throw std::invalid_argument("cutoffs must be >= 1");
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1])
      throw std::invalid_argument("cutoffs must be strictly ascending");
  }
  if (slots < 1) throw std::invalid_argument("slots must be >= 1");
  for (const auto& [slot, mean] : targets) {
    if (slot < 1 || slot > slots) throw std::invalid_argument("target slot outside [1, slots]");
    if (!(mean >= 0.0)) throw std::invalid_argument("target mean must be >= 0");
  }
}

std::vector<double> default_ns_grid() {
  std::vector<double> grid(25);
  for (int i = 0; i < 25; ++i) grid[i] = std::pow(10.0, -2.0 + 3.0 * i / 24.0);
  return grid;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      const std::string item = trim(cur);
      if (!item.empty()) out.push_back(to_double(item));
      cur.clear();
    } else {
      cur += text[i];
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) {
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-9) throw std::invalid_argument("expected integer list: '" + text + "'");
    out.push_back(i);
  }
  return out;
}

std::pair<bool, double> parse_phase_mode(const std::string& text) {
  if (text == "dephased") return {true, 0.0};
  if (text.rfind("fixed:", 0) == 0) return {false, to_double(text.substr(6))};
  if (text == "fixed") return {false, 0.0};
  throw std::invalid_argument("phase-mode must be 'fixed:<phi>' or 'dephased', got '" + text + "'");
}

std::map<int, double> parse_targets(const std::string& text) {
  std::map<int, double> out;
  const std::string t = trim(text);
  if (t.empty() || t == "none") return out;
  std::string cur;
  for (size_t i = 0; i <= t.size(); ++i) {
    if (i == t.size() || t[i] == ',') {
      const std::string item = trim(cur);
      cur.clear();
      if (item.empty()) continue;
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("targets entries take the form slot:mean, got '" + item + "'");
      const int slot = static_cast<int>(to_double(trim(item.substr(0, colon))));
      const double mean = to_double(trim(item.substr(colon + 1)));
      out[slot] = mean;
    } else {
      cur += t[i];
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": empty key");
    entries.emplace_back(key, value);
  }
  return entries;
}

}  // namespace rangekit::cli
