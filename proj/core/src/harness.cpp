#include "wirepick/harness.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "wirepick/errors.hpp"
#include "wirepick/event_log.hpp"
#include "wirepick/sim_world.hpp"

namespace wirepick::harness {

std::string_view to_string(Task t) { return t == Task::Emptying ? "Emptying" : "Standard"; }

std::optional<Task> task_from_string(std::string_view s) {
  if (s == "Emptying" || s == "emptying") return Task::Emptying;
  if (s == "Standard" || s == "standard") return Task::Standard;
  return std::nullopt;
}

int TaskSpec::attempt_budget() const { return max_attempts > 0 ? max_attempts : 3 * world.n_objects; }

void TaskSpec::validate() const {
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  if (max_attempts < 0) throw ConfigError("max_attempts must be >= 0");
  world.validate();
  check_config(controller);
  if (attempt_budget() < 1) throw ConfigError("attempt budget is zero (no objects and no max_attempts)");
}

std::uint64_t episode_seed(std::uint64_t base_seed, int episode) {
  // splitmix64 finalizer of the episode index
  std::uint64_t z = static_cast<std::uint64_t>(episode) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return base_seed ^ (z ^ (z >> 31));
}

RunSummary summarize(const std::vector<AttemptRecord>& records) {
  if (records.empty()) throw ParameterError("summarize needs at least one attempt record");
  RunSummary s;
  int index = 0;
  for (const auto& r : records) {
    ++s.attempts;
    if (r.outcome == Outcome::SuccessSingle) {
      ++s.successes;
    } else {
      ++s.failures;
      const std::string key = r.failure_mode ? std::string(to_string(*r.failure_mode)) : "Aborted";
      ++s.failure_histogram[key];
    }
    s.attempts_by_primitive += r.counts;
    s.objects_delivered += r.objects_delivered;
    s.objects_ejected += r.objects_ejected;
    s.threshold_trajectories.push_back({0, index++, r.thresholds_after.f_stop, r.thresholds_after.f_fail,
                                        r.thresholds_after.f_fail_converged});
  }
  s.success_rate = static_cast<double>(s.successes) / s.attempts;
  return s;
}

namespace {

// Forwards to the simulated world and reports after every primitive.
class ObservedWorld : public PickingWorld {
 public:
  ObservedWorld(sim::SimulatedWorld& inner, const std::function<void(const sim::BinState&)>& hook)
      : inner_(inner), hook_(hook) {}

  grasp::DepthMap capture_depth() override { return inner_.capture_depth(); }
  const grasp::GripperTemplate& gripper() const override { return inner_.gripper(); }
  bool execute_grasp(const grasp::GraspCandidate& c) override { return step(inner_.execute_grasp(c)); }
  bool holding() const override { return inner_.holding(); }
  ForceTrace lift() override { return step(inner_.lift()); }
  SwingReport swing(const SwingParams& p) override { return step(inner_.swing(p)); }
  RegraspReport regrasp() override { return step(inner_.regrasp()); }
  ForceTrace transport() override { return step(inner_.transport()); }
  int release_to_goal() override { return step(inner_.release_to_goal()); }
  void release_to_bin() override {
    inner_.release_to_bin();
    if (hook_) hook_(inner_.state());
  }

 private:
  template <typename T>
  T step(T value) {
    if (hook_) hook_(inner_.state());
    return value;
  }

  sim::SimulatedWorld& inner_;
  const std::function<void(const sim::BinState&)>& hook_;
};

}  // namespace

RunResult run_task(const TaskSpec& spec, const RunOptions& options) {
  spec.validate();
  RunResult result;
  std::vector<AttemptRecord> all;
  std::vector<ThresholdPoint> trajectory;
  const int budget = spec.attempt_budget();

  for (int e = 0; e < spec.episodes; ++e) {
    EpisodeResult ep;
    ep.episode = e;
    ep.seed = episode_seed(spec.world.rng_seed, e);
    auto wc = spec.world;
    wc.rng_seed = ep.seed;
    sim::SimulatedWorld sim_world(wc);
    ObservedWorld world(sim_world, options.on_step);
    if (options.on_step) options.on_step(sim_world.state());
    PickingController controller(spec.controller, spec.policy);

    EventSink sink;
    if (options.jsonl && options.log_events)
      sink = [&](const PrimitiveEvent& ev) { *options.jsonl << event_line(e, ev) << '\n'; };

    for (int a = 0; a < budget; ++a) {
      auto& state = sim_world.state();
      if (state.objects_in_bin() == 0) {
        if (spec.task == Task::Emptying) break;
        sim::reshuffle(state);
      }
      auto rec = controller.run_attempt(world, a, sink);
      if (sim_world.holding()) world.release_to_bin();
      if (options.jsonl) *options.jsonl << attempt_line(e, spec.policy, rec) << '\n';
      trajectory.push_back({e, a, rec.thresholds_after.f_stop, rec.thresholds_after.f_fail,
                            rec.thresholds_after.f_fail_converged});
      if (spec.task == Task::Standard && rec.outcome == Outcome::SuccessSingle) {
        sim::reshuffle(state);
        if (options.on_step) options.on_step(state);
      }
      rec.traces.clear();
      ep.records.push_back(std::move(rec));
    }
    ep.objects_remaining = sim_world.state().objects_in_bin();
    ep.emptied = ep.objects_remaining == 0;
    all.insert(all.end(), ep.records.begin(), ep.records.end());
    result.episodes.push_back(std::move(ep));
  }
  if (!all.empty()) {
    result.summary = summarize(all);
    result.summary.threshold_trajectories = std::move(trajectory);
  }
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int hist(const RunSummary& s, const char* key) {
  const auto it = s.failure_histogram.find(key);
  return it == s.failure_histogram.end() ? 0 : it->second;
}

}  // namespace

void write_summary_csv(std::ostream& out, const TaskSpec& spec, const RunSummary& s) {
  out << "task,policy,profile,n_objects,episodes,attempts,successes,failures,success_rate,"
         "lift,swing,spin,regrasp,transport,"
         "grasp_failure,swing_failure,regrasp_failure,recovery_failure,aborted,"
         "delivered,ejected\n";
  const auto& c = s.attempts_by_primitive;
  out << to_string(spec.task) << ',' << to_string(spec.policy) << ','
      << sim::to_string(spec.world.object_profile) << ',' << spec.world.n_objects << ','
      << spec.episodes << ',' << s.attempts << ',' << s.successes << ',' << s.failures << ','
      << fmt(s.success_rate) << ',' << c.lift << ',' << c.swing << ',' << c.spin << ','
      << c.regrasp << ',' << c.transport << ',' << hist(s, "GraspFailure") << ','
      << hist(s, "SwingFailure") << ',' << hist(s, "RegraspFailure") << ','
      << hist(s, "RecoveryFailure") << ',' << hist(s, "Aborted") << ',' << s.objects_delivered
      << ',' << s.objects_ejected << '\n';
}

void write_thresholds_csv(std::ostream& out, const RunSummary& s) {
  out << "episode,attempt,f_stop,f_fail,converged\n";
  for (const auto& p : s.threshold_trajectories)
    out << p.episode << ',' << p.attempt << ',' << format_number(p.f_stop) << ','
        << format_number(p.f_fail) << ',' << (p.converged ? 1 : 0) << '\n';
}

ScenarioResult run_scenario(const sim::Scenario& scenario, std::ostream* jsonl) {
  const auto policy = policy_from_string(scenario.policy);
  if (!policy) throw ConfigError("unknown policy '" + scenario.policy + "'");
  const auto cfg = validate_config(scenario.controller);
  sim::SimulatedWorld world(sim::scenario_world(scenario));
  if (scenario.grasp) world.force_next_grasp(scenario.grasp->first, scenario.grasp->second);
  PickingController controller(cfg, *policy);
  EventSink sink;
  if (jsonl) sink = [&](const PrimitiveEvent& ev) { *jsonl << event_line(0, ev) << '\n'; };
  ScenarioResult out;
  for (int a = 0; a < scenario.attempts; ++a) {
    if (world.state().objects_in_bin() == 0) break;
    auto rec = controller.run_attempt(world, a, sink);
    if (world.holding()) world.release_to_bin();
    if (jsonl) *jsonl << attempt_line(0, *policy, rec) << '\n';
    out.records.push_back(std::move(rec));
  }
  out.final_world = world.state();
  return out;
}

std::vector<CalibrationPoint> calibrate(const TaskSpec& base, const std::vector<double>& break_gains,
                                        const std::vector<double>& slip_gains) {
  base.validate();
  std::vector<CalibrationPoint> points;
  for (double bg : break_gains)
    for (double sg : slip_gains) {
      CalibrationPoint p;
      p.swing_break_gain = bg;
      p.slip_gain = sg;
      auto spec = base;
      spec.world.swing_break_gain = bg;
      spec.world.slip_gain = sg;
      for (Policy pol : {Policy::LiftG, Policy::OursG, Policy::OursA}) {
        spec.policy = pol;
        const double rate = run_task(spec).summary.success_rate;
        (pol == Policy::LiftG ? p.rate_liftg : pol == Policy::OursG ? p.rate_oursg : p.rate_oursa) = rate;
      }
      p.ordering_holds = p.rate_oursa >= p.rate_oursg && p.rate_oursg >= p.rate_liftg + 0.2;
      points.push_back(p);
    }
  return points;
}

std::optional<CalibrationPoint> select_calibration(const std::vector<CalibrationPoint>& points) {
  std::optional<CalibrationPoint> best;
  double best_d = 0.0;
  for (const auto& p : points) {
    if (!p.ordering_holds) continue;
    const double d = std::hypot(p.rate_oursg - kReferenceRateOursG, p.rate_oursa - kReferenceRateOursA);
    if (!best || d < best_d) {
      best = p;
      best_d = d;
    }
  }
  return best;
}

void write_calibration_report(std::ostream& out, const TaskSpec& base,
                              const std::vector<CalibrationPoint>& points) {
  out << "# Calibration sweep\n\n";
  out << "Task " << to_string(base.task) << ", " << base.world.n_objects << " x "
      << sim::to_string(base.world.object_profile) << ", " << base.episodes
      << " episodes, attempt budget " << base.attempt_budget() << ", base seed "
      << base.world.rng_seed << ", eject_gain " << format_number(base.world.eject_gain) << ".\n\n";
  out << "| swing_break_gain | slip_gain | LiftG | OursG | OursA | ordering |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& p : points)
    out << "| " << format_number(p.swing_break_gain) << " | " << format_number(p.slip_gain) << " | "
        << fmt(p.rate_liftg) << " | " << fmt(p.rate_oursg) << " | " << fmt(p.rate_oursa) << " | "
        << (p.ordering_holds ? "holds" : "fails") << " |\n";
  out << "\nOrdering: OursA >= OursG >= LiftG + 0.2. Selection: among rows where it holds, the one\n"
      << "closest (Euclidean) to reference rates OursG " << format_number(kReferenceRateOursG)
      << ", OursA " << format_number(kReferenceRateOursA) << ".\n\n";
  if (const auto sel = select_calibration(points))
    out << "Selected: swing_break_gain " << format_number(sel->swing_break_gain) << ", slip_gain "
        << format_number(sel->slip_gain) << ".\n";
  else
    out << "Selected: none (ordering fails everywhere).\n";
}

}  // namespace wirepick::harness
