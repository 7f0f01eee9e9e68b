#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vctx {

// A benchmark result table: one row per (frames, tokens) configuration with
// accuracy percentages per benchmark column and an optional training-loss
// column (header name "loss", lower is better).
struct ScoreTable {
  struct Row {
    std::int64_t frames = 0;
    std::int64_t tokens = 0;
    std::optional<double> loss;
    std::vector<double> scores;  // aligned with `columns`
  };

  std::vector<std::string> columns;  // score column names in file order
  bool has_loss = false;
  std::vector<Row> rows;
};

// CSV schema: header "frames,tokens[,loss],<score columns...>"; '#' lines
// are comments. Scores must lie in [0, 100].
ScoreTable parse_score_table_csv(std::istream& in);
ScoreTable load_score_table(const std::filesystem::path& path);

// Derived view: per-row averages and best / second-best marks per column.
struct TableAnalysis {
  std::vector<double> averages;         // full-precision mean of each row's scores
  std::vector<double> averages_display; // rounded half-up to 2 decimals
  // marks[c][r] for score column c and row r; column index `columns.size()`
  // holds the marks of the average column.
  std::vector<std::vector<bool>> best;
  std::vector<std::vector<bool>> second_best;
  std::optional<std::size_t> lowest_loss_row;
};

TableAnalysis analyze_table(const ScoreTable& table);

// Half-up rounding to two decimals (display convention).
double round2(double value);

}  // namespace vctx
