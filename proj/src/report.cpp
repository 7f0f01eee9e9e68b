#include "vctx/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace vctx {
namespace {

using nlohmann::ordered_json;

std::string fmt(double value, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

ordered_json params_to_json(const FitResult& result) {
  ordered_json j;
  if (const auto* p = std::get_if<PowerLawParams>(&result.params)) {
    j["floor"] = p->floor;
    j["scale"] = p->scale;
    j["exponent"] = p->exponent;
  } else if (const auto* p = std::get_if<LinearParams>(&result.params)) {
    j["slope"] = p->slope;
    j["intercept"] = p->intercept;
  } else {
    const auto& joint = std::get<JointParams>(result.params);
    j["c_m"] = joint.c_m;
    j["alpha"] = joint.alpha;
    j["c_t"] = joint.c_t;
    j["beta"] = joint.beta;
    j["floor"] = joint.floor;
  }
  return j;
}

ordered_json joint_to_json(const JointParams& p) {
  ordered_json j;
  j["c_m"] = p.c_m;
  j["alpha"] = p.alpha;
  j["c_t"] = p.c_t;
  j["beta"] = p.beta;
  j["floor"] = p.floor;
  return j;
}

std::string params_to_text(const FitResult& result) {
  std::ostringstream out;
  if (const auto* p = std::get_if<PowerLawParams>(&result.params)) {
    out << "floor=" << fmt(p->floor) << " scale=" << fmt(p->scale)
        << " exponent=" << fmt(p->exponent);
  } else if (const auto* p = std::get_if<LinearParams>(&result.params)) {
    out << "slope=" << fmt(p->slope) << " intercept=" << fmt(p->intercept);
  } else {
    const auto& joint = std::get<JointParams>(result.params);
    out << "c_m=" << fmt(joint.c_m) << " alpha=" << fmt(joint.alpha) << " c_t="
        << fmt(joint.c_t) << " beta=" << fmt(joint.beta) << " floor=" << fmt(joint.floor);
  }
  return out.str();
}

}  // namespace

Report fit_report(const LossLog& log, FitFamily family, const FitOptions& options) {
  if (family == FitFamily::kPowerTokens) {
    for (const LossSample& s : log.rows) {
      if (s.frames != log.rows.front().frames) {
        throw UsageError("power-m fits loss vs tokens and needs a constant frame count");
      }
    }
  } else if (family == FitFamily::kPowerFrames || family == FitFamily::kLinearFrames) {
    for (const LossSample& s : log.rows) {
      if (s.tokens != log.rows.front().tokens) {
        throw UsageError(std::string(fit_family_name(family)) +
                         " fits loss vs frames and needs a constant token count");
      }
    }
  }

  const FitResult result = fit(family, log.rows, options);

  Report report;
  report.doc["version"] = "1";
  report.doc["command"] = "fit";
  report.doc["family"] = fit_family_name(family);
  report.doc["sample_count"] = log.rows.size();
  report.doc["params"] = params_to_json(result);
  report.doc["r_squared"] = result.r_squared;
  report.doc["mse"] = result.mse;
  report.doc["iterations"] = result.iterations;
  report.doc["converged"] = result.converged;
  report.doc["residuals"] = result.residuals;
  // per-sample curve data, ready for external plotting
  report.doc["samples"] = ordered_json::array();
  for (const LossSample& s : log.rows) {
    report.doc["samples"].push_back({{"frames", s.frames},
                                     {"tokens", s.tokens},
                                     {"observed", s.loss},
                                     {"predicted", result.predict(s)}});
  }

  std::ostringstream text;
  text << "fit " << fit_family_name(family) << " over " << log.rows.size() << " samples\n";
  text << "  params: " << params_to_text(result) << '\n';
  text << "  r_squared=" << fmt(result.r_squared, "%.8g") << " mse=" << fmt(result.mse, "%.6g")
       << " iterations=" << result.iterations
       << " converged=" << (result.converged ? "yes" : "no") << '\n';
  text << "  residuals:";
  for (double r : result.residuals) text << ' ' << fmt(r, "%.3e");
  text << '\n';
  report.text = text.str();
  return report;
}

Report plan_report(const JointParams& params, const std::vector<std::int64_t>& budgets,
                   const std::vector<std::int64_t>& token_set, std::int64_t max_frames) {
  const std::vector<PlanRow> rows = plan(params, budgets, token_set, max_frames);

  Report report;
  report.doc["version"] = "1";
  report.doc["command"] = "plan";
  report.doc["params"] = joint_to_json(params);
  report.doc["token_set"] = token_set;
  report.doc["max_frames"] = max_frames;
  report.doc["rows"] = ordered_json::array();

  std::ostringstream text;
  text << "plan with " << "c_m=" << fmt(params.c_m) << " alpha=" << fmt(params.alpha)
       << " c_t=" << fmt(params.c_t) << " beta=" << fmt(params.beta)
       << " floor=" << fmt(params.floor) << '\n';
  text << "  budget   frames_opt  tokens_opt  frames  tokens  pred_loss   best_feasible\n";
  for (const PlanRow& row : rows) {
    ordered_json j;
    j["budget"] = row.budget;
    j["frames_opt"] = row.exact.frames;
    j["tokens_opt"] = row.exact.tokens;
    j["frames"] = row.frames;
    j["tokens"] = row.tokens;
    j["predicted_loss"] = row.predicted_loss;
    j["best_feasible"] = {{"frames", row.best_feasible.frames},
                          {"tokens", row.best_feasible.tokens},
                          {"total", row.best_feasible.total},
                          {"predicted_loss", row.best_feasible.predicted_loss.value()}};
    report.doc["rows"].push_back(j);

    std::ostringstream feasible;
    feasible << row.best_feasible.frames << " x " << row.best_feasible.tokens << " = "
             << row.best_feasible.total << " (loss "
             << fmt(row.best_feasible.predicted_loss.value()) << ')';
    text << "  " << std::left << std::setw(9) << row.budget << std::setw(12)
         << fmt(row.exact.frames, "%.4f") << std::setw(12) << fmt(row.exact.tokens, "%.4f")
         << std::setw(8) << row.frames << std::setw(8) << row.tokens << std::setw(12)
         << fmt(row.predicted_loss) << feasible.str() << '\n';
  }
  report.text = text.str();
  return report;
}

Report table_report(const ScoreTable& table) {
  const TableAnalysis analysis = analyze_table(table);
  const std::size_t ncols = table.columns.size();

  Report report;
  report.doc["version"] = "1";
  report.doc["command"] = "table";
  report.doc["columns"] = table.columns;
  report.doc["rows"] = ordered_json::array();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const ScoreTable::Row& row = table.rows[r];
    ordered_json j;
    j["frames"] = row.frames;
    j["tokens"] = row.tokens;
    if (row.loss) j["loss"] = *row.loss;
    j["scores"] = row.scores;
    j["average"] = analysis.averages[r];
    j["average_display"] = analysis.averages_display[r];
    report.doc["rows"].push_back(j);
  }
  ordered_json best = ordered_json::object();
  ordered_json second = ordered_json::object();
  for (std::size_t c = 0; c <= ncols; ++c) {
    const std::string name = c < ncols ? table.columns[c] : "average";
    ordered_json best_rows = ordered_json::array();
    ordered_json second_rows = ordered_json::array();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (analysis.best[c][r]) best_rows.push_back(r);
      if (analysis.second_best[c][r]) second_rows.push_back(r);
    }
    best[name] = best_rows;
    second[name] = second_rows;
  }
  report.doc["best"] = best;
  report.doc["second_best"] = second;
  if (analysis.lowest_loss_row) {
    report.doc["lowest_loss_row"] = *analysis.lowest_loss_row;
  }

  // Text table: '*' marks the best entry of a column, '^' the second best.
  std::ostringstream text;
  text << "  frames  tokens";
  if (table.has_loss) text << "  loss";
  for (const std::string& c : table.columns) text << "  " << c;
  text << "  avg\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const ScoreTable::Row& row = table.rows[r];
    text << "  " << std::left << std::setw(7) << row.frames << ' ' << std::setw(7)
         << row.tokens;
    if (table.has_loss) {
      std::string cell = fmt(*row.loss, "%.3f");
      if (analysis.lowest_loss_row && *analysis.lowest_loss_row == r) cell += '*';
      text << ' ' << std::setw(7) << cell;
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      std::string cell = fmt(row.scores[c], "%.2f");
      if (analysis.best[c][r]) cell += '*';
      else if (analysis.second_best[c][r]) cell += '^';
      text << ' ' << std::setw(table.columns[c].size() + 2) << cell;
    }
    std::string avg = fmt(analysis.averages_display[r], "%.2f");
    if (analysis.best[ncols][r]) avg += '*';
    else if (analysis.second_best[ncols][r]) avg += '^';
    text << ' ' << avg << '\n';
  }
  report.text = text.str();
  return report;
}

Report apply_report(const SelectionSpec& spec, const VisualContext& context) {
  Report report;
  report.doc["version"] = "1";
  report.doc["command"] = "apply";
  report.doc["spatial_mode"] = spec.spatial_mode == SpatialMode::kSample ? "sample" : "pool";
  report.doc["spatial_param"] = spec.spatial_param;
  report.doc["temporal_mode"] = spec.temporal_mode == TemporalMode::kSample ? "sample"
                                : spec.temporal_mode == TemporalMode::kPool ? "pool"
                                                                            : "pool3d";
  report.doc["target_frames"] = spec.target_frames;
  report.doc["max_frames"] = spec.max_frames;
  report.doc["frames"] = context.frames_out;
  report.doc["tokens_per_frame"] = context.tokens_per_frame;
  report.doc["dim"] = context.dim;
  report.doc["total_tokens"] = context.total_tokens();

  std::ostringstream text;
  text << "apply: " << context.frames_out << " x " << context.tokens_per_frame << " = "
       << context.total_tokens() << " total tokens (dim " << context.dim << ")\n";
  report.text = text.str();
  return report;
}

Report synth_report(const LossLog& log, double sigma, std::uint64_t seed) {
  Report report;
  report.doc["version"] = "1";
  report.doc["command"] = "synth";
  report.doc["rows"] = log.rows.size();
  report.doc["sigma"] = sigma;
  report.doc["seed"] = seed;
  std::ostringstream text;
  text << "synth: " << log.rows.size() << " rows (sigma=" << fmt(sigma) << ", seed=" << seed
       << ")\n";
  report.text = text.str();
  return report;
}

JointParams joint_params_from_report(const ordered_json& doc) {
  if (!doc.is_object() || !doc.contains("params")) {
    throw DataError("report document has no params object");
  }
  if (doc.contains("family") && doc["family"] != "joint") {
    throw UsageError("plan needs joint-law parameters; report holds a '" +
                     doc["family"].get<std::string>() + "' fit");
  }
  const auto& p = doc["params"];
  for (const char* key : {"c_m", "alpha", "c_t", "beta", "floor"}) {
    if (!p.contains(key)) {
      throw DataError(std::string("report params are missing '") + key + "'");
    }
  }
  JointParams params{p["c_m"].get<double>(), p["alpha"].get<double>(), p["c_t"].get<double>(),
                     p["beta"].get<double>(), p["floor"].get<double>()};
  params.validate();
  return params;
}

}  // namespace vctx
