#include "mvtlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mvt {

namespace detail {
const std::map<std::string, std::string>& bundled_preset_texts();
}  // namespace detail

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text) {
  std::string cleaned;
  for (char ch : text) cleaned.push_back(ch == '[' || ch == ']' || ch == ',' ? ' ' : ch);
  std::istringstream in(cleaned);
  std::vector<std::string> items;
  std::string item;
  while (in >> item) items.push_back(item);
  return items;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

std::int64_t parse_integer(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw std::invalid_argument(key + ": expected an integer, got '" + value + "'");
  }
  return static_cast<std::int64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + value + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int precision = 1; precision <= 17; ++precision) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", precision, v);
    if (std::stod(shorter) == v) return shorter;
  }
  return buf;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  return kind == ExperimentKind::kComparison ? "comparison" : "during";
}

std::vector<Count> parse_traffic_list(std::string_view text) {
  std::vector<Count> out;
  for (const auto& item : split_list(text)) out.push_back(parse_integer("traffic", item));
  return out;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw std::invalid_argument("name must not be empty");
  validate_weight_config(weights);
  evolution.validate();
  if (traffic.empty()) throw std::invalid_argument("traffic sweep must not be empty");
  for (std::size_t i = 0; i < traffic.size(); ++i) {
    if (traffic[i] <= 0) throw std::invalid_argument("traffic values must be positive");
    if (i > 0 && traffic[i] <= traffic[i - 1]) {
      throw std::invalid_argument("traffic sweep must be strictly increasing");
    }
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  if (array.empty()) throw std::invalid_argument("array must name a bundled array or a file");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "name = " << name << '\n';
  out << "experiment = " << to_string(kind) << '\n';
  out << "space = " << space.to_string() << '\n';
  out << "mode = " << to_string(mode) << '\n';
  out << "bias = " << format_double(weights.bias) << '\n';
  out << "delta_main = " << format_double(weights.delta_main) << '\n';
  out << "delta_pair = " << format_double(weights.delta_pair) << '\n';
  out << "array = " << array << '\n';
  out << "merge =";
  for (std::size_t i = 0; i < merges.size(); ++i) {
    out << (i ? ", " : " ") << merges[i].first << ':' << merges[i].second;
  }
  out << '\n';
  out << "generations = " << evolution.generations << '\n';
  out << "mutation_rate = " << format_double(evolution.mutation_rate) << '\n';
  out << "elite_fraction = " << format_double(evolution.elite_fraction) << '\n';
  out << "prior_strength = " << format_double(evolution.prior_strength) << '\n';
  out << "unique_children = " << (evolution.unique_children ? "true" : "false") << '\n';
  out << "traffic = [";
  for (std::size_t i = 0; i < traffic.size(); ++i) out << (i ? ", " : "") << traffic[i];
  out << "]\n";
  out << "repetitions = " << repetitions << '\n';
  out << "seed = " << seed << '\n';
  out << "fixed_evaluator = " << (fixed_evaluator ? "true" : "false") << '\n';
  if (!output_dir.empty()) out << "out = " << output_dir << '\n';
  return out.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_text()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!seen.insert(key).second) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    try {
      if (key == "name") {
        cfg.name = value;
      } else if (key == "experiment") {
        if (value == "comparison") {
          cfg.kind = ExperimentKind::kComparison;
        } else if (value == "during") {
          cfg.kind = ExperimentKind::kDuring;
        } else {
          throw std::invalid_argument("experiment must be comparison or during");
        }
      } else if (key == "space") {
        cfg.space = SearchSpace::parse(value);
      } else if (key == "mode") {
        cfg.mode = parse_evaluator_mode(value);
      } else if (key == "bias") {
        cfg.weights.bias = parse_double(key, value);
      } else if (key == "delta_main") {
        cfg.weights.delta_main = parse_double(key, value);
      } else if (key == "delta_pair") {
        cfg.weights.delta_pair = parse_double(key, value);
      } else if (key == "array") {
        cfg.array = value;
      } else if (key == "merge") {
        cfg.merges.clear();
        for (const auto& item : split_list(value)) {
          const auto colon = item.find(':');
          if (colon == std::string::npos) throw std::invalid_argument("merge entries look like 1:2");
          cfg.merges.emplace_back(
              static_cast<std::size_t>(parse_integer(key, item.substr(0, colon))),
              static_cast<std::size_t>(parse_integer(key, item.substr(colon + 1))));
        }
      } else if (key == "generations") {
        cfg.evolution.generations = static_cast<int>(parse_integer(key, value));
      } else if (key == "mutation_rate") {
        cfg.evolution.mutation_rate = parse_double(key, value);
      } else if (key == "elite_fraction") {
        cfg.evolution.elite_fraction = parse_double(key, value);
      } else if (key == "prior_strength") {
        cfg.evolution.prior_strength = parse_double(key, value);
      } else if (key == "unique_children") {
        cfg.evolution.unique_children = parse_bool(key, value);
      } else if (key == "traffic") {
        cfg.traffic = parse_traffic_list(value);
      } else if (key == "repetitions") {
        cfg.repetitions = static_cast<int>(parse_integer(key, value));
      } else if (key == "seed") {
        const auto seed = parse_integer(key, value);
        if (seed < 0) throw std::invalid_argument("seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(seed);
      } else if (key == "fixed_evaluator") {
        cfg.fixed_evaluator = parse_bool(key, value);
      } else if (key == "out") {
        cfg.output_dir = value;
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::vector<std::string> preset_names() {
  // Presentation order follows the experiments, not the map's ordering.
  return {"setting1-linear", "setting2-linear", "setting3-linear",
          "mixed-linear",    "mixed-nonlinear", "during-experiment"};
}

const std::string& preset_text(std::string_view name) {
  const auto& texts = detail::bundled_preset_texts();
  const auto it = texts.find(std::string(name));
  if (it == texts.end()) throw std::out_of_range("no preset named '" + std::string(name) + "'");
  return it->second;
}

ExperimentConfig preset(std::string_view name) { return parse_config(preset_text(name)); }

ExperimentConfig resolve_config(const std::string& preset_or_path) {
  if (detail::bundled_preset_texts().count(preset_or_path)) return preset(preset_or_path);
  return load_config_file(preset_or_path);
}

}  // namespace mvt
