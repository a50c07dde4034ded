#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wirepick/config.hpp"
#include "wirepick/controller.hpp"
#include "wirepick/simulator.hpp"
#include "wirepick/world_io.hpp"

namespace wirepick::harness {

enum class Task { Emptying, Standard };

std::string_view to_string(Task t);
std::optional<Task> task_from_string(std::string_view s);

struct TaskSpec {
  Task task = Task::Emptying;
  Policy policy = Policy::OursG;
  sim::WorldConfig world;   // rng_seed is the base seed of the run
  ControllerConfig controller;
  int episodes = 1;
  int max_attempts = 0;     // per episode; 0 means 3 * n_objects

  int attempt_budget() const;
  // Throws ConfigError.
  void validate() const;
};

// Independent but reproducible per-episode seed.
std::uint64_t episode_seed(std::uint64_t base_seed, int episode);

struct ThresholdPoint {
  int episode = 0;
  int attempt = 0;
  double f_stop = 0.0;
  double f_fail = 0.0;
  bool converged = false;
};

struct RunSummary {
  int attempts = 0;
  int successes = 0;
  int failures = 0;            // every non-success record, Aborted included
  double success_rate = 0.0;   // successes / attempts
  PrimitiveCounts attempts_by_primitive;
  std::map<std::string, int> failure_histogram;  // failure mode name or "Aborted"
  std::vector<ThresholdPoint> threshold_trajectories;
  int objects_delivered = 0;
  int objects_ejected = 0;
};

// Throws ParameterError on an empty list. Threshold points are numbered by position.
RunSummary summarize(const std::vector<AttemptRecord>& records);

struct EpisodeResult {
  int episode = 0;
  std::uint64_t seed = 0;
  std::vector<AttemptRecord> records;
  int objects_remaining = 0;
  bool emptied = false;
};

struct RunResult {
  RunSummary summary;
  std::vector<EpisodeResult> episodes;
};

struct RunOptions {
  std::ostream* jsonl = nullptr;  // event and attempt lines
  bool log_events = true;
  // Called after every primitive with the live world; used for invariant checks.
  std::function<void(const sim::BinState&)> on_step;
};

// Validates the spec before any episode runs.
RunResult run_task(const TaskSpec& spec, const RunOptions& options = {});

// summary.csv: one header row and one data row.
void write_summary_csv(std::ostream& out, const TaskSpec& spec, const RunSummary& summary);
// thresholds.csv: episode,attempt,f_stop,f_fail,converged
void write_thresholds_csv(std::ostream& out, const RunSummary& summary);

struct ScenarioResult {
  std::vector<AttemptRecord> records;  // traces kept
  sim::BinState final_world;
};

ScenarioResult run_scenario(const sim::Scenario& scenario, std::ostream* jsonl = nullptr);

struct CalibrationPoint {
  double swing_break_gain = 0.0;
  double slip_gain = 0.0;
  double rate_liftg = 0.0;
  double rate_oursg = 0.0;
  double rate_oursa = 0.0;
  bool ordering_holds = false;  // OursA >= OursG >= LiftG + 0.2
};

// Runs the three policies on `base` for every gain pair.
std::vector<CalibrationPoint> calibrate(const TaskSpec& base, const std::vector<double>& break_gains,
                                        const std::vector<double>& slip_gains);

// Reference closed-loop success rates the sweep is matched against.
inline constexpr double kReferenceRateOursG = 0.833;
inline constexpr double kReferenceRateOursA = 0.867;

// Among points where the ordering holds, the one whose (OursG, OursA) rates lie
// closest to the reference rates; first in sweep order on ties. nullopt if none holds.
std::optional<CalibrationPoint> select_calibration(const std::vector<CalibrationPoint>& points);

void write_calibration_report(std::ostream& out, const TaskSpec& base,
                              const std::vector<CalibrationPoint>& points);

}  // namespace wirepick::harness
