#include "vctx/loss_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace vctx {
namespace {

using nlohmann::ordered_json;

std::string format_real(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim surrounding whitespace
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

void check_duplicates(const LossLog& log, bool allow_duplicates) {
  if (allow_duplicates) return;
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const LossSample& s = log.rows[i];
    if (!seen.insert({s.frames, s.tokens}).second) {
      throw DataError("row " + std::to_string(i + 1) + ": duplicate configuration (" +
                      std::to_string(s.frames) + " frames, " + std::to_string(s.tokens) +
                      " tokens); pass allow-duplicates to keep it");
    }
  }
}

}  // namespace

LossLog parse_loss_log_csv(std::istream& in, bool allow_duplicates) {
  LossLog log;
  std::string line;
  bool have_header = false;
  int col_frames = -1, col_tokens = -1, col_loss = -1;
  int ncols = 0;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      // "# meta key=value" lines carry the log metadata
      std::istringstream meta(line.substr(1));
      std::string tag;
      if (meta >> tag && tag == "meta") {
        std::string rest;
        std::getline(meta, rest);
        const auto eq = rest.find('=');
        if (eq != std::string::npos) {
          std::string key = rest.substr(0, eq);
          const auto start = key.find_first_not_of(' ');
          key = start == std::string::npos ? std::string() : key.substr(start);
          log.metadata[key] = rest.substr(eq + 1);
        }
      }
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (!have_header) {
      for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        if (fields[i] == "frames") col_frames = i;
        else if (fields[i] == "tokens") col_tokens = i;
        else if (fields[i] == "loss") col_loss = i;
      }
      if (col_frames < 0 || col_tokens < 0 || col_loss < 0) {
        throw DataError("loss log header must name frames, tokens and loss columns");
      }
      ncols = static_cast<int>(fields.size());
      have_header = true;
      continue;
    }
    ++row;
    if (static_cast<int>(fields.size()) != ncols) {
      throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(ncols) +
                      " fields, found " + std::to_string(fields.size()));
    }
    LossSample sample;
    sample.frames = parse_int(fields[col_frames], row, "frames");
    sample.tokens = parse_int(fields[col_tokens], row, "tokens");
    sample.loss = parse_real(fields[col_loss], row, "loss");
    try {
      sample.validate();
    } catch (const DataError& e) {
      throw DataError("row " + std::to_string(row) + ": " + e.what());
    }
    log.rows.push_back(sample);
  }
  if (!have_header) throw DataError("loss log has no header line");
  check_duplicates(log, allow_duplicates);
  return log;
}

void write_loss_log_csv(std::ostream& out, const LossLog& log) {
  for (const auto& [key, value] : log.metadata) {
    out << "# meta " << key << '=' << value << '\n';
  }
  out << "frames,tokens,loss\n";
  for (const LossSample& s : log.rows) {
    out << s.frames << ',' << s.tokens << ',' << format_real(s.loss) << '\n';
  }
}

LossLog parse_loss_log_json(std::istream& in, bool allow_duplicates) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid JSON loss log: ") + e.what());
  }
  LossLog log;
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array()) {
    throw DataError("JSON loss log must be an object with a rows array");
  }
  if (doc.contains("metadata")) {
    for (const auto& [key, value] : doc["metadata"].items()) {
      log.metadata[key] = value.get<std::string>();
    }
  }
  int row = 0;
  for (const auto& item : doc["rows"]) {
    ++row;
    if (!item.is_object() || !item.contains("frames") || !item.contains("tokens") ||
        !item.contains("loss")) {
      throw DataError("row " + std::to_string(row) + ": needs frames, tokens and loss");
    }
    LossSample sample{item["frames"].get<std::int64_t>(), item["tokens"].get<std::int64_t>(),
                      item["loss"].get<double>()};
    try {
      sample.validate();
    } catch (const DataError& e) {
      throw DataError("row " + std::to_string(row) + ": " + e.what());
    }
    log.rows.push_back(sample);
  }
  check_duplicates(log, allow_duplicates);
  return log;
}

void write_loss_log_json(std::ostream& out, const LossLog& log) {
  ordered_json doc;
  doc["version"] = "1";
  doc["metadata"] = ordered_json::object();
  for (const auto& [key, value] : log.metadata) doc["metadata"][key] = value;
  doc["rows"] = ordered_json::array();
  for (const LossSample& s : log.rows) {
    doc["rows"].push_back({{"frames", s.frames}, {"tokens", s.tokens}, {"loss", s.loss}});
  }
  out << doc.dump(2) << '\n';
}

LossLog load_loss_log(const std::filesystem::path& path, bool allow_duplicates) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open loss log: " + path.string());
  try {
    if (path.extension() == ".json") return parse_loss_log_json(in, allow_duplicates);
    return parse_loss_log_csv(in, allow_duplicates);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_loss_log(const std::filesystem::path& path, const LossLog& log) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write loss log: " + path.string());
  if (path.extension() == ".json") {
    write_loss_log_json(out, log);
  } else {
    write_loss_log_csv(out, log);
  }
}

LossLog generate_synthetic(const JointParams& params, const std::vector<GridPoint>& configs,
                           double noise_sigma, std::uint64_t seed) {
  params.validate();
  if (configs.empty()) throw DataError("synthetic log needs at least one configuration");
  if (noise_sigma < 0.0) throw DataError("noise sigma must be >= 0");
  GaussianStream noise(seed);
  LossLog log;
  log.metadata["source"] = "synthetic";
  log.metadata["seed"] = std::to_string(seed);
  log.metadata["sigma"] = format_real(noise_sigma);
  for (const GridPoint& config : configs) {
    LossSample sample;
    sample.frames = config.frames;
    sample.tokens = config.tokens;
    sample.loss = eval_joint(params, static_cast<double>(config.tokens),
                             static_cast<double>(config.frames));
    if (noise_sigma > 0.0) sample.loss += noise_sigma * noise.next();
    log.rows.push_back(sample);
  }
  return log;
}

std::vector<GridPoint> token_scaling_grid() {
  std::vector<GridPoint> grid;
  for (std::int64_t m : {1, 4, 9, 16, 25, 36, 49, 81, 196}) grid.push_back({32, m});
  return grid;
}

std::vector<GridPoint> frame_scaling_grid() {
  std::vector<GridPoint> grid;
  for (std::int64_t t : {1, 8, 16, 32, 64, 96, 128}) grid.push_back({t, 49});
  return grid;
}

std::vector<GridPoint> joint_grid25() {
  std::vector<GridPoint> grid = token_scaling_grid();
  for (std::int64_t t : {1, 8, 16, 32, 48, 64, 96, 128}) grid.push_back({t, 49});
  for (std::int64_t t : {48, 64, 80, 96}) {
    for (std::int64_t m : {25, 81}) grid.push_back({t, m});
  }
  return grid;  // 25 runs; (32, 49) appears in both 1-D sweeps
}

}  // namespace vctx
