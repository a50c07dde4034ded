// wirepick: experiment runner and utilities for the wire-harness picking simulator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "wirepick/config.hpp"
#include "wirepick/errors.hpp"
#include "wirepick/event_log.hpp"
#include "wirepick/grasp.hpp"
#include "wirepick/harness.hpp"
#include "wirepick/pgm_io.hpp"
#include "wirepick/trace_io.hpp"
#include "wirepick/world_io.hpp"

namespace fs = std::filesystem;
using namespace wirepick;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  return out;
}

// Controller keys plus "sim."-prefixed world keys from one file.
void load_config(const std::string& path, ControllerConfig& controller, sim::WorldConfig& world) {
  if (path.empty()) return;
  auto raw = read_config_file(path);
  const auto sim_raw = take_prefixed(raw, "sim.");
  controller = validate_config(raw);
  world = sim::world_config_from_raw(sim_raw, world);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw ConfigError("empty list '" + text + "'");
  return out;
}

struct RunArgs {
  std::string task = "Standard";
  std::string policy = "OursA";
  int objects = 40;
  std::string profile = "Medium74cm";
  int episodes = 1;
  std::uint64_t seed = 1;
  std::string config;
  std::string out_dir = ".";
  int max_attempts = 0;
  bool no_events = false;
};

harness::TaskSpec make_spec(const RunArgs& a) {
  harness::TaskSpec spec;
  const auto task = harness::task_from_string(a.task);
  if (!task) throw ConfigError("unknown task '" + a.task + "'");
  const auto policy = policy_from_string(a.policy);
  if (!policy) throw ConfigError("unknown policy '" + a.policy + "'");
  const auto profile = sim::profile_from_string(a.profile);
  if (!profile) throw ConfigError("unknown profile '" + a.profile + "'");
  spec.task = *task;
  spec.policy = *policy;
  load_config(a.config, spec.controller, spec.world);
  spec.world.object_profile = *profile;
  spec.world.n_objects = a.objects;
  spec.world.rng_seed = a.seed;
  spec.episodes = a.episodes;
  spec.max_attempts = a.max_attempts;
  spec.validate();
  return spec;
}

int cmd_run(const RunArgs& a) {
  const auto spec = make_spec(a);
  fs::create_directories(a.out_dir);
  auto jsonl = open_out(fs::path(a.out_dir) / "attempts.jsonl");
  harness::RunOptions opts;
  opts.jsonl = &jsonl;
  opts.log_events = !a.no_events;
  const auto result = harness::run_task(spec, opts);
  auto summary = open_out(fs::path(a.out_dir) / "summary.csv");
  harness::write_summary_csv(summary, spec, result.summary);
  auto thresholds = open_out(fs::path(a.out_dir) / "thresholds.csv");
  harness::write_thresholds_csv(thresholds, result.summary);
  std::printf("%s %s: %d/%d successes (%.3f)\n", std::string(harness::to_string(spec.task)).c_str(),
              std::string(to_string(spec.policy)).c_str(), result.summary.successes,
              result.summary.attempts, result.summary.success_rate);
  return 0;
}

int cmd_analyze(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw FormatError("cannot open '" + in_path + "'");
  const auto logged = read_attempt_log(in);
  if (logged.empty()) throw FormatError("no attempt lines in '" + in_path + "'");
  std::map<std::string, std::vector<AttemptRecord>> by_policy;
  for (const auto& l : logged) by_policy[l.policy].push_back(l.record);

  std::ostringstream csv;
  csv << "policy,attempts,successes,failures,success_rate,lift,swing,spin,regrasp,transport,"
         "grasp_failure,swing_failure,regrasp_failure,recovery_failure,aborted,delivered,ejected\n";
  for (const auto& [policy, records] : by_policy) {
    const auto s = harness::summarize(records);
    auto h = [&](const char* k) {
      const auto it = s.failure_histogram.find(k);
      return it == s.failure_histogram.end() ? 0 : it->second;
    };
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.6f", s.success_rate);
    const auto& c = s.attempts_by_primitive;
    csv << policy << ',' << s.attempts << ',' << s.successes << ',' << s.failures << ',' << rate
        << ',' << c.lift << ',' << c.swing << ',' << c.spin << ',' << c.regrasp << ','
        << c.transport << ',' << h("GraspFailure") << ',' << h("SwingFailure") << ','
        << h("RegraspFailure") << ',' << h("RecoveryFailure") << ',' << h("Aborted") << ','
        << s.objects_delivered << ',' << s.objects_ejected << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    auto out = open_out(out_path);
    out << csv.str();
  }
  return 0;
}

int cmd_scenario(const std::string& file, const std::string& out_dir) {
  const auto scenario = sim::load_scenario(file);
  fs::create_directories(out_dir);
  auto jsonl = open_out(fs::path(out_dir) / "attempts.jsonl");
  const auto result = harness::run_scenario(scenario, &jsonl);
  for (const auto& rec : result.records) {
    int k = 0;
    for (const auto& tr : rec.traces) {
      const auto name = scenario.name + "_a" + std::to_string(rec.attempt_id) + "_" +
                        std::to_string(k++) + "_" + std::string(to_string(tr.phase)) + ".jsonl";
      save_trace((fs::path(out_dir) / name).string(), tr);
    }
    std::printf("%s attempt %d: %s\n", scenario.name.c_str(), rec.attempt_id,
                std::string(to_string(rec.outcome)).c_str());
  }
  sim::save_snapshot((fs::path(out_dir) / "world.json").string(), result.final_world);
  return 0;
}

int cmd_calibrate(const RunArgs& a, const std::string& break_gains, const std::string& slip_gains,
                  const std::string& out_path) {
  const auto spec = make_spec(a);
  const auto points = harness::calibrate(spec, parse_list(break_gains), parse_list(slip_gains));
  std::ostringstream report;
  harness::write_calibration_report(report, spec, points);
  if (out_path.empty()) {
    std::cout << report.str();
  } else {
    auto out = open_out(out_path);
    out << report.str();
  }
  return 0;
}

int cmd_detect(const std::string& depth_path, const std::string& contact, const std::string& collision,
               const std::string& policy_name, const std::string& config, const std::string& out_path) {
  ControllerConfig cfg;
  sim::WorldConfig unused;
  load_config(config, cfg, unused);
  const auto depth = grasp::load_depth(depth_path);
  const auto tmpl = contact.empty() ? grasp::make_parallel_jaw_template(depth.resolution)
                                    : grasp::load_template(contact, collision);
  const auto policy = policy_from_string(policy_name);
  if (!policy) throw ConfigError("unknown policy '" + policy_name + "'");
  grasp::DetectOptions opts{cfg.grasp.n_rotations, cfg.grasp.n_heights, cfg.grasp.top_k,
                            cfg.grasp.nms_radius};
  auto candidates = grasp::detect_grasps(depth, tmpl, opts);
  if (*policy == Policy::OursA)
    candidates = grasp::rank_with_mid_bias(std::move(candidates), depth, cfg.grasp.mid_bias_alpha);
  if (out_path.empty()) {
    grasp::write_candidates_csv(std::cout, candidates);
  } else {
    auto out = open_out(out_path);
    grasp::write_candidates_csv(out, candidates);
  }
  return 0;
}

int cmd_render(const RunArgs& a) {
  auto spec = make_spec(a);
  const auto world = sim::init_world(spec.world);
  fs::create_directories(a.out_dir);
  sim::save_snapshot((fs::path(a.out_dir) / "world.json").string(), world);
  const int px = spec.world.camera_pixels;
  grasp::save_depth((fs::path(a.out_dir) / "depth.pgm").string(),
                    sim::render_depth(world, px, px, spec.world.camera_resolution()));
  std::printf("%d objects, %zu entanglement edges\n", world.objects_in_bin(), world.graph.edges.size());
  return 0;
}

void add_world_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--objects", a.objects, "objects in the bin")->capture_default_str();
  cmd->add_option("--profile", a.profile, "Medium74cm or Long120cm")->capture_default_str();
  cmd->add_option("--seed", a.seed, "base seed")->capture_default_str();
  cmd->add_option("--config", a.config, "key=value file; sim.* keys configure the world");
}

void add_task_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--task", a.task, "Emptying or Standard")->capture_default_str();
  cmd->add_option("--episodes", a.episodes)->capture_default_str();
  cmd->add_option("--max-attempts", a.max_attempts, "per episode; 0 means 3 x objects")
      ->capture_default_str();
}

void add_run_options(CLI::App* cmd, RunArgs& a) {
  add_world_options(cmd, a);
  add_task_options(cmd, a);
  cmd->add_option("--policy", a.policy, "LiftG, OursG or OursA")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wire-harness bin picking: controller, simulator and experiment runner"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run a task and write attempts.jsonl, summary.csv, thresholds.csv");
  add_run_options(run, run_args);
  run->add_option("--out-dir", run_args.out_dir)->capture_default_str();
  run->add_flag("--no-events", run_args.no_events, "log attempt lines only");

  std::string analyze_in, analyze_out;
  auto* analyze = app.add_subcommand("analyze", "summarize an attempts.jsonl per policy as CSV");
  analyze->add_option("input", analyze_in, "attempts.jsonl")->required();
  analyze->add_option("--out", analyze_out, "CSV path (stdout when omitted)");

  std::string scenario_file, scenario_out = ".";
  auto* scenario = app.add_subcommand("scenario", "run a scripted scenario file");
  scenario->add_option("file", scenario_file, "scenario JSON")->required();
  scenario->add_option("--out-dir", scenario_out)->capture_default_str();

  RunArgs cal_args;
  cal_args.episodes = 20;
  cal_args.max_attempts = 5;
  std::string break_gains = "0.05,0.1,0.2,0.4", slip_gains = "0.002,0.005,0.01", cal_out;
  auto* cal = app.add_subcommand("calibrate", "sweep swing gains over the three policies");
  add_world_options(cal, cal_args);
  add_task_options(cal, cal_args);
  cal->add_option("--break-gains", break_gains)->capture_default_str();
  cal->add_option("--slip-gains", slip_gains)->capture_default_str();
  cal->add_option("--out", cal_out, "markdown report path (stdout when omitted)");

  std::string depth_path, contact, collision, detect_policy = "OursG", detect_config, detect_out;
  auto* detect = app.add_subcommand("detect", "grasp candidates for a depth PGM as CSV");
  detect->add_option("depth", depth_path, "depth map (P2 PGM)")->required();
  auto* c1 = detect->add_option("--contact", contact, "contact mask PGM");
  auto* c2 = detect->add_option("--collision", collision, "collision mask PGM");
  c1->needs(c2);
  c2->needs(c1);
  detect->add_option("--policy", detect_policy, "OursG (graspability) or OursA (mid-bias)")
      ->capture_default_str();
  detect->add_option("--config", detect_config);
  detect->add_option("--out", detect_out, "CSV path (stdout when omitted)");

  RunArgs render_args;
  auto* rend = app.add_subcommand("render", "write an initial world snapshot and its depth map");
  add_world_options(rend, render_args);
  rend->add_option("--out-dir", render_args.out_dir)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args);
    if (*analyze) return cmd_analyze(analyze_in, analyze_out);
    if (*scenario) return cmd_scenario(scenario_file, scenario_out);
    if (*cal) return cmd_calibrate(cal_args, break_gains, slip_gains, cal_out);
    if (*detect) return cmd_detect(depth_path, contact, collision, detect_policy, detect_config, detect_out);
    if (*rend) return cmd_render(render_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "wirepick: %s\n", e.what());
    return 1;
  }
  return 0;
}
