#include "vctx/score_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "vctx/types.hpp"

namespace vctx {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? std::string()
                                                : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& text, int row, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DataError("row " + std::to_string(row) + ": column '" + column +
                    "' is not a number ('" + text + "')");
  }
}

std::int64_t parse_int(const std::string& text, int row, const std::string& column) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("row " + std::to_string(row) + ": column '" + column +
                    "' is not an integer ('" + text + "')");
  }
  return v;
}

// Rows holding the extreme value, and rows holding the next distinct value.
void mark_extremes(const std::vector<double>& values, bool higher_is_better,
                   std::vector<bool>& best, std::vector<bool>& second) {
  best.assign(values.size(), false);
  second.assign(values.size(), false);
  if (values.empty()) return;
  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  if (higher_is_better) std::reverse(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const double top = distinct[0];
  for (std::size_t i = 0; i < values.size(); ++i) best[i] = values[i] == top;
  if (distinct.size() > 1) {
    const double runner_up = distinct[1];
    for (std::size_t i = 0; i < values.size(); ++i) second[i] = values[i] == runner_up;
  }
}

}  // namespace

double round2(double value) {
  return std::floor(value * 100.0 + 0.5) / 100.0;
}

ScoreTable parse_score_table_csv(std::istream& in) {
  ScoreTable table;
  std::string line;
  bool have_header = false;
  int col_frames = -1, col_tokens = -1, col_loss = -1;
  std::vector<int> score_cols;
  int ncols = 0;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv(line);
    if (!have_header) {
      for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        if (fields[i] == "frames") col_frames = i;
        else if (fields[i] == "tokens") col_tokens = i;
        else if (fields[i] == "loss") col_loss = i;
        else {
          score_cols.push_back(i);
          table.columns.push_back(fields[i]);
        }
      }
      if (col_frames < 0 || col_tokens < 0) {
        throw DataError("score table header must name frames and tokens columns");
      }
      if (table.columns.empty()) {
        throw DataError("score table has no score columns");
      }
      table.has_loss = col_loss >= 0;
      ncols = static_cast<int>(fields.size());
      have_header = true;
      continue;
    }
    ++row;
    if (static_cast<int>(fields.size()) != ncols) {
      throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(ncols) +
                      " fields, found " + std::to_string(fields.size()));
    }
    ScoreTable::Row r;
    r.frames = parse_int(fields[col_frames], row, "frames");
    r.tokens = parse_int(fields[col_tokens], row, "tokens");
    if (col_loss >= 0) r.loss = parse_real(fields[col_loss], row, "loss");
    for (std::size_t c = 0; c < score_cols.size(); ++c) {
      const double score = parse_real(fields[score_cols[c]], row, table.columns[c]);
      if (!(score >= 0.0) || !(score <= 100.0)) {
        throw DataError("row " + std::to_string(row) + ": score '" + table.columns[c] +
                        "' = " + fields[score_cols[c]] + " is outside [0, 100]");
      }
      r.scores.push_back(score);
    }
    table.rows.push_back(std::move(r));
  }
  if (!have_header) throw DataError("score table has no header line");
  return table;
}

ScoreTable load_score_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open score table: " + path.string());
  try {
    return parse_score_table_csv(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

TableAnalysis analyze_table(const ScoreTable& table) {
  TableAnalysis a;
  const std::size_t ncols = table.columns.size();
  const std::size_t nrows = table.rows.size();
  for (const ScoreTable::Row& row : table.rows) {
    double sum = 0.0;
    for (double s : row.scores) sum += s;
    const double mean = sum / static_cast<double>(ncols);
    a.averages.push_back(mean);
    a.averages_display.push_back(round2(mean));
  }

  a.best.resize(ncols + 1);
  a.second_best.resize(ncols + 1);
  std::vector<double> column(nrows);
  for (std::size_t c = 0; c < ncols; ++c) {
    for (std::size_t r = 0; r < nrows; ++r) column[r] = table.rows[r].scores[c];
    mark_extremes(column, true, a.best[c], a.second_best[c]);
  }
  mark_extremes(a.averages, true, a.best[ncols], a.second_best[ncols]);

  if (table.has_loss && nrows > 0) {
    std::size_t lowest = 0;
    for (std::size_t r = 1; r < nrows; ++r) {
      if (table.rows[r].loss.value() < table.rows[lowest].loss.value()) lowest = r;
    }
    a.lowest_loss_row = lowest;
  }
  return a;
}

}  // namespace vctx
