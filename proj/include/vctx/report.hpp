#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "vctx/allocator.hpp"
#include "vctx/fit.hpp"
#include "vctx/loss_log.hpp"
#include "vctx/score_table.hpp"
#include "vctx/types.hpp"

namespace vctx {

// A command result in both human and machine form. The structured document
// keeps stable field order and full numeric precision.
struct Report {
  nlohmann::ordered_json doc;
  std::string text;
};

// Fits `family` to the log after checking the log shape supports it
// (1-D families need the other coordinate constant).
Report fit_report(const LossLog& log, FitFamily family, const FitOptions& options = {});

Report plan_report(const JointParams& params, const std::vector<std::int64_t>& budgets,
                   const std::vector<std::int64_t>& token_set, std::int64_t max_frames);

Report table_report(const ScoreTable& table);

Report apply_report(const SelectionSpec& spec, const VisualContext& context);

Report synth_report(const LossLog& log, double sigma, std::uint64_t seed);

// Recover joint parameters from a structured fit report document.
JointParams joint_params_from_report(const nlohmann::ordered_json& doc);

}  // namespace vctx
