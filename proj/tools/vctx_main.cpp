#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vctx/allocator.hpp"
#include "vctx/context_ops.hpp"
#include "vctx/fit.hpp"
#include "vctx/loss_log.hpp"
#include "vctx/report.hpp"
#include "vctx/score_table.hpp"
#include "vctx/tensor_io.hpp"
#include "vctx/types.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDomain = 4;

vctx::JointParams parse_joint_params(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw vctx::UsageError("cannot parse parameter '" + field + "'");
    }
  }
  if (values.size() != 5) {
    throw vctx::UsageError("--params needs 5 comma-separated values: c_m,alpha,c_t,beta,floor");
  }
  vctx::JointParams params{values[0], values[1], values[2], values[3], values[4]};
  params.validate();
  return params;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const char* what) {
  std::vector<std::int64_t> values;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      values.push_back(std::stoll(field));
    } catch (const std::exception&) {
      throw vctx::UsageError(std::string("cannot parse ") + what + " entry '" + field + "'");
    }
  }
  if (values.empty()) throw vctx::UsageError(std::string(what) + " is empty");
  return values;
}

std::vector<vctx::GridPoint> parse_configs(const std::string& text) {
  std::vector<vctx::GridPoint> configs;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    const auto sep = field.find('x');
    if (sep == std::string::npos) {
      throw vctx::UsageError("config '" + field + "' must look like FRAMESxTOKENS, e.g. 32x49");
    }
    try {
      configs.push_back({std::stoll(field.substr(0, sep)), std::stoll(field.substr(sep + 1))});
    } catch (const std::exception&) {
      throw vctx::UsageError("cannot parse config '" + field + "'");
    }
  }
  if (configs.empty()) throw vctx::UsageError("--configs is empty");
  return configs;
}

vctx::FitFamily family_from_name(const std::string& name) {
  if (name == "power-m") return vctx::FitFamily::kPowerTokens;
  if (name == "power-t") return vctx::FitFamily::kPowerFrames;
  if (name == "linear-t") return vctx::FitFamily::kLinearFrames;
  if (name == "joint") return vctx::FitFamily::kJoint;
  throw vctx::UsageError("unknown family '" + name + "'");
}

void emit(const vctx::Report& report, const std::string& format) {
  if (format == "structured") {
    std::cout << report.doc.dump(2) << '\n';
  } else {
    std::cout << report.text;
  }
}

int run(int argc, char** argv) {
  CLI::App app{"visual context budget planner: selection kernels, scaling-law fits, "
               "and optimal frame/token allocation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "text";
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit a scaling-law family to a loss log");
  std::string fit_input, fit_family, fit_out;
  bool allow_duplicates = false;
  std::uint64_t seed = vctx::FitOptions{}.seed;
  int starts = vctx::FitOptions{}.starts;
  fit_cmd->add_option("--input", fit_input, "loss log (.csv or .json)")->required();
  fit_cmd->add_option("--family", fit_family, "power-m | power-t | linear-t | joint")->required();
  fit_cmd->add_option("--seed", seed, "multi-start seed");
  fit_cmd->add_option("--starts", starts, "multi-start count");
  fit_cmd->add_flag("--allow-duplicates", allow_duplicates,
                    "accept repeated (frames, tokens) rows");
  fit_cmd->add_option("--out", fit_out, "also write the structured report here");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "closed-form and snapped allocation per budget");
  std::string plan_params, plan_from_fit, plan_token_set;
  std::vector<std::int64_t> budgets;
  std::int64_t max_frames = vctx::kDefaultMaxFrames;
  plan_cmd->add_option("--params", plan_params, "c_m,alpha,c_t,beta,floor");
  plan_cmd->add_option("--from-fit", plan_from_fit, "structured fit report to take params from");
  plan_cmd->add_option("--budget", budgets, "visual context window in tokens (repeatable)")
      ->required();
  plan_cmd->add_option("--token-set", plan_token_set,
                       "comma-separated realizable token counts (default: pooled 27x27 grid)");
  plan_cmd->add_option("--max-frames", max_frames, "largest allowed frame count");

  // table
  auto* table_cmd = app.add_subcommand("table", "benchmark score table averages and markers");
  std::string table_input;
  table_cmd->add_option("--input", table_input, "score table CSV")->required();

  // apply
  auto* apply_cmd = app.add_subcommand("apply", "run a selection spec over a frame tensor");
  std::string apply_input, apply_out, spatial_mode = "pool", temporal_mode = "sample";
  int spatial_param = 1, target_frames = 1;
  int apply_max_frames = 128;
  apply_cmd->add_option("--input", apply_input, "frame tensor file")->required();
  apply_cmd->add_option("--spatial-mode", spatial_mode, "sample | pool")
      ->check(CLI::IsMember({"sample", "pool"}));
  apply_cmd->add_option("--spatial-param", spatial_param,
                        "samples per side (sample) or stride (pool)")
      ->required();
  apply_cmd->add_option("--temporal-mode", temporal_mode, "sample | pool | pool3d")
      ->check(CLI::IsMember({"sample", "pool", "pool3d"}));
  apply_cmd->add_option("--target-frames", target_frames, "output frame count")->required();
  apply_cmd->add_option("--max-frames", apply_max_frames, "frames sampled before pooling");
  apply_cmd->add_option("--out", apply_out, "write the reduced tensor here");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic loss log from a joint law");
  std::string synth_params, synth_grid, synth_configs, synth_out;
  double sigma = 0.0;
  std::uint64_t synth_seed = 42;
  synth_cmd->add_option("--params", synth_params, "c_m,alpha,c_t,beta,floor")->required();
  synth_cmd->add_option("--grid", synth_grid, "tokens9 | frames7 | joint25")
      ->check(CLI::IsMember({"tokens9", "frames7", "joint25"}));
  synth_cmd->add_option("--configs", synth_configs, "explicit FRAMESxTOKENS list");
  synth_cmd->add_option("--sigma", sigma, "gaussian noise level");
  synth_cmd->add_option("--seed", synth_seed, "noise seed");
  synth_cmd->add_option("--out", synth_out, "loss log to write (.csv or .json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fit_cmd) {
      vctx::FitOptions options;
      options.seed = seed;
      options.starts = starts;
      const vctx::FitFamily family = family_from_name(fit_family);
      const vctx::LossLog log = vctx::load_loss_log(fit_input, allow_duplicates);
      const vctx::Report report = vctx::fit_report(log, family, options);
      emit(report, format);
      if (!fit_out.empty()) {
        std::ofstream out(fit_out);
        if (!out) throw vctx::DataError("cannot write report: " + fit_out);
        out << report.doc.dump(2) << '\n';
      }
    } else if (*plan_cmd) {
      vctx::JointParams params;
      if (!plan_params.empty()) {
        params = parse_joint_params(plan_params);
      } else if (!plan_from_fit.empty()) {
        std::ifstream in(plan_from_fit);
        if (!in) throw vctx::DataError("cannot open report: " + plan_from_fit);
        nlohmann::ordered_json doc;
        try {
          doc = nlohmann::ordered_json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw vctx::DataError(plan_from_fit + ": " + e.what());
        }
        params = vctx::joint_params_from_report(doc);
      } else {
        throw vctx::UsageError("plan needs --params or --from-fit");
      }
      const std::vector<std::int64_t> token_set =
          plan_token_set.empty() ? vctx::default_token_set()
                                 : parse_int_list(plan_token_set, "--token-set");
      emit(vctx::plan_report(params, budgets, token_set, max_frames), format);
    } else if (*table_cmd) {
      emit(vctx::table_report(vctx::load_score_table(table_input)), format);
    } else if (*apply_cmd) {
      vctx::SelectionSpec spec;
      spec.spatial_mode =
          spatial_mode == "sample" ? vctx::SpatialMode::kSample : vctx::SpatialMode::kPool;
      spec.spatial_param = spatial_param;
      spec.temporal_mode = temporal_mode == "sample" ? vctx::TemporalMode::kSample
                           : temporal_mode == "pool" ? vctx::TemporalMode::kPool
                                                     : vctx::TemporalMode::kPool3d;
      spec.target_frames = target_frames;
      spec.max_frames = apply_max_frames;
      const vctx::FrameSequence source = vctx::read_frame_sequence(apply_input);
      const vctx::VisualContext context = vctx::apply_selection(source, spec);
      emit(vctx::apply_report(spec, context), format);
      if (!apply_out.empty()) {
        vctx::write_frame_sequence(apply_out, vctx::to_frame_sequence(context));
      }
    } else if (*synth_cmd) {
      const vctx::JointParams params = parse_joint_params(synth_params);
      std::vector<vctx::GridPoint> configs;
      if (!synth_configs.empty()) {
        configs = parse_configs(synth_configs);
      } else if (synth_grid == "tokens9") {
        configs = vctx::token_scaling_grid();
      } else if (synth_grid == "frames7") {
        configs = vctx::frame_scaling_grid();
      } else if (synth_grid == "joint25") {
        configs = vctx::joint_grid25();
      } else {
        throw vctx::UsageError("synth needs --configs or --grid");
      }
      const vctx::LossLog log = vctx::generate_synthetic(params, configs, sigma, synth_seed);
      vctx::save_loss_log(synth_out, log);
      emit(vctx::synth_report(log, sigma, synth_seed), format);
    }
  } catch (const vctx::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const vctx::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const vctx::InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const vctx::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const vctx::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 1;
  }
}
