#include "mvtlab/taguchi.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mvt {

namespace detail {
const std::map<std::string, std::string>& bundled_array_texts();
}  // namespace detail

namespace {

void check_scores(const OrthogonalArray& a, std::span<const double> scores) {
  if (scores.size() != a.row_count()) {
    throw std::invalid_argument("expected " + std::to_string(a.row_count()) + " scores, got " +
                                std::to_string(scores.size()));
  }
}

std::string describe(const PropertyCheck& check, bool pairs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < check.offenders.size(); ++i) {
    if (i) out << ", ";
    if (pairs) {
      out << '(' << check.offenders[i].first << ',' << check.offenders[i].second << ')';
    } else {
      out << check.offenders[i].first;
    }
  }
  return out.str();
}

std::vector<int> parse_ints(const std::string& line, std::size_t line_no) {
  std::istringstream in(line);
  std::vector<int> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": bad integer '" + token + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << "range: " << (range.passed ? "pass" : "FAIL columns " + describe(range, false)) << '\n';
  out << "balance: " << (balance.passed ? "pass" : "FAIL columns " + describe(balance, false)) << '\n';
  out << "orthogonality: "
      << (orthogonality.passed ? "pass" : "FAIL column pairs " + describe(orthogonality, true)) << '\n';
  out << "pair balance (informational): "
      << (pair_balance.passed ? "pass" : "not met for pairs " + describe(pair_balance, true)) << '\n';
  return out.str();
}

ValidationReport validate(const OrthogonalArray& a, double tolerance) {
  ValidationReport report;
  const std::size_t cols = a.column_count();
  const std::size_t n = a.row_count();

  for (std::size_t c = 0; c < cols; ++c) {
    bool in_range = a.column_levels[c] >= 1;
    for (const auto& row : a.rows) {
      if (row.size() != cols || row[c] < 0 || row[c] >= a.column_levels[c]) in_range = false;
    }
    if (!in_range) {
      report.range.passed = false;
      report.range.offenders.emplace_back(c, c);
    }
  }
  // Balance and orthogonality are meaningless on out-of-range data.
  if (!report.range.passed || n == 0) {
    report.balance.passed = n > 0 && report.range.passed;
    report.orthogonality.passed = report.balance.passed;
    report.pair_balance.passed = report.balance.passed;
    return report;
  }

  std::vector<std::vector<double>> centred(cols, std::vector<double>(n));
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(a.column_levels[c]), 0);
    double sum = 0.0;
    for (const auto& row : a.rows) {
      ++counts[static_cast<std::size_t>(row[c])];
      sum += row[c];
    }
    for (std::size_t k : counts) {
      if (k != counts.front()) {
        report.balance.passed = false;
        report.balance.offenders.emplace_back(c, c);
        break;
      }
    }
    const double mean = sum / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) centred[c][r] = a.rows[r][c] - mean;
  }

  for (std::size_t c1 = 0; c1 < cols; ++c1) {
    for (std::size_t c2 = c1 + 1; c2 < cols; ++c2) {
      double dot = 0.0;
      for (std::size_t r = 0; r < n; ++r) dot += centred[c1][r] * centred[c2][r];
      if (std::abs(dot) > tolerance) {
        report.orthogonality.passed = false;
        report.orthogonality.offenders.emplace_back(c1, c2);
      }
      const auto l1 = static_cast<std::size_t>(a.column_levels[c1]);
      const auto l2 = static_cast<std::size_t>(a.column_levels[c2]);
      std::vector<std::size_t> cells(l1 * l2, 0);
      for (const auto& row : a.rows) {
        ++cells[static_cast<std::size_t>(row[c1]) * l2 + static_cast<std::size_t>(row[c2])];
      }
      for (std::size_t k : cells) {
        if (k != cells.front()) {
          report.pair_balance.passed = false;
          report.pair_balance.offenders.emplace_back(c1, c2);
          break;
        }
      }
    }
  }
  return report;
}

OrthogonalArray load_array(std::string_view text) {
  OrthogonalArray a;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto values = parse_ints(line, line_no);
    if (values.empty()) continue;
    if (!have_header) {
      a.column_levels = std::move(values);
      have_header = true;
      continue;
    }
    if (values.size() != a.column_levels.size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(a.column_levels.size()) + " values, got " +
                                  std::to_string(values.size()));
    }
    a.rows.push_back(std::move(values));
  }
  if (!have_header) throw std::invalid_argument("array text has no header line");
  if (a.rows.empty()) throw std::invalid_argument("array has no rows");
  const ValidationReport report = validate(a);
  if (!report.valid()) {
    throw std::invalid_argument("array failed validation:\n" + report.summary());
  }
  return a;
}

OrthogonalArray load_array_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open array file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_array(buffer.str());
}

std::string save_array(const OrthogonalArray& a) {
  std::ostringstream out;
  auto emit = [&out](const std::vector<int>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ' ';
      out << values[i];
    }
    out << '\n';
  };
  emit(a.column_levels);
  for (const auto& row : a.rows) emit(row);
  return out.str();
}

std::vector<std::string> bundled_array_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::bundled_array_texts()) names.push_back(name);
  return names;
}

const std::string& bundled_array_text(std::string_view name) {
  const auto& texts = detail::bundled_array_texts();
  const auto it = texts.find(std::string(name));
  if (it == texts.end()) throw std::out_of_range("no bundled array named '" + std::string(name) + "'");
  return it->second;
}

OrthogonalArray bundled_array(std::string_view name) { return load_array(bundled_array_text(name)); }

OrthogonalArray resolve_array(const std::string& name_or_path) {
  if (detail::bundled_array_texts().count(name_or_path)) return bundled_array(name_or_path);
  return load_array_file(name_or_path);
}

double main_effect(const OrthogonalArray& a, std::span<const double> scores, std::size_t var, int value) {
  check_scores(a, scores);
  if (var >= a.column_count()) throw std::out_of_range("variable index out of range");
  if (value < 0 || value >= a.column_levels[var]) throw std::out_of_range("value index out of range");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < a.row_count(); ++r) {
    if (a.rows[r][var] == value) {
      sum += scores[r];
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("value never appears in the array column");
  return sum / static_cast<double>(count);
}

EffectTable effect_table(const OrthogonalArray& a, std::span<const double> scores) {
  check_scores(a, scores);
  EffectTable table;
  for (std::size_t c = 0; c < a.column_count(); ++c) {
    std::vector<EffectCell> cells(static_cast<std::size_t>(a.column_levels[c]));
    for (std::size_t r = 0; r < a.row_count(); ++r) {
      auto& cell = cells[static_cast<std::size_t>(a.rows[r][c])];
      cell.mean += scores[r];
      ++cell.rows;
    }
    for (auto& cell : cells) {
      if (cell.rows > 0) cell.mean /= static_cast<double>(cell.rows);
    }
    table.push_back(std::move(cells));
  }
  return table;
}

Candidate predict_best(const OrthogonalArray& a, std::span<const double> scores) {
  const EffectTable table = effect_table(a, scores);
  std::vector<int> choices;
  choices.reserve(table.size());
  for (const auto& cells : table) {
    std::size_t best = 0;
    for (std::size_t v = 1; v < cells.size(); ++v) {
      if (cells[v].rows > 0 && cells[v].mean > cells[best].mean) best = v;
    }
    choices.push_back(static_cast<int>(best));
  }
  return Candidate(std::move(choices));
}

Candidate best_tested(const OrthogonalArray& a, std::span<const double> scores) {
  check_scores(a, scores);
  std::size_t best = 0;
  for (std::size_t r = 1; r < scores.size(); ++r) {
    if (scores[r] > scores[best]) best = r;
  }
  return a.row_candidate(best);
}

OrthogonalArray merge_columns(const OrthogonalArray& a, std::size_t col2, std::size_t col3) {
  if (col2 >= a.column_count() || col3 >= a.column_count() || col2 == col3) {
    throw std::invalid_argument("merge column indices out of range");
  }
  if (a.column_levels[col2] != 2 || a.column_levels[col3] != 3) {
    throw std::invalid_argument("merge needs a 2-level and a 3-level column");
  }
  const std::size_t keep = std::min(col2, col3);
  const std::size_t drop = std::max(col2, col3);
  OrthogonalArray out;
  out.column_levels = a.column_levels;
  out.column_levels[keep] = 6;
  out.column_levels.erase(out.column_levels.begin() + static_cast<std::ptrdiff_t>(drop));
  std::vector<std::size_t> counts(6, 0);
  for (const auto& row : a.rows) {
    std::vector<int> merged = row;
    merged[keep] = 3 * row[col2] + row[col3];
    ++counts[static_cast<std::size_t>(merged[keep])];
    merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(drop));
    out.rows.push_back(std::move(merged));
  }
  for (std::size_t k : counts) {
    if (k != counts.front()) {
      throw std::invalid_argument("merged column is unbalanced: value pairs of columns " +
                                  std::to_string(col2) + " and " + std::to_string(col3) +
                                  " do not occur equally often");
    }
  }
  return out;
}

void require_matches(const OrthogonalArray& a, const SearchSpace& space) {
  if (a.column_levels != space.cardinalities()) {
    std::ostringstream msg;
    msg << "array column levels do not match search space " << space.to_string();
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace mvt
