#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wirepick/config.hpp"
#include "wirepick/grasp.hpp"
#include "wirepick/signal.hpp"
#include "wirepick/types.hpp"

namespace wirepick {

// Grasp selection / control policy.
//   LiftG  - top graspability candidate, lift and transport with no force monitoring.
//   OursG  - closed loop, top graspability candidate.
//   OursA  - closed loop, candidates re-ranked by the mid-bias heuristic.
enum class Policy { LiftG, OursG, OursA };

std::string_view to_string(Policy p);
std::optional<Policy> policy_from_string(std::string_view s);

enum class ControlPhase {
  Idle,
  Grasping,
  Lifting,
  Swinging,
  Regrasping,
  PreTransportSpin,
  Transporting,
  Done,
};

enum class ControlEvent {
  Start,
  GraspOk,
  GraspFailed,
  LiftStop,           // F_z crossed F_stop while lifting
  LiftNeedsRegrasp,   // end grasp detected, or too many transports
  LiftClean,
  SwingDone,
  RegraspOk,
  RegraspFailed,
  SpinDone,
  Slipped,            // gripper lost the object during a swing or spin
  TransportRetry,     // stopped or multi-object; loop back to lifting
  TransportFinished,
  LoopCapReached,
};

inline constexpr ControlPhase kAllPhases[] = {
    ControlPhase::Idle,         ControlPhase::Grasping,         ControlPhase::Lifting,
    ControlPhase::Swinging,     ControlPhase::Regrasping,       ControlPhase::PreTransportSpin,
    ControlPhase::Transporting, ControlPhase::Done};

inline constexpr ControlEvent kAllEvents[] = {
    ControlEvent::Start,          ControlEvent::GraspOk,          ControlEvent::GraspFailed,
    ControlEvent::LiftStop,       ControlEvent::LiftNeedsRegrasp, ControlEvent::LiftClean,
    ControlEvent::SwingDone,      ControlEvent::RegraspOk,        ControlEvent::RegraspFailed,
    ControlEvent::SpinDone,       ControlEvent::Slipped,          ControlEvent::TransportRetry,
    ControlEvent::TransportFinished, ControlEvent::LoopCapReached};

// Transition table of a picking attempt; nullopt for an illegal (phase, event) pair.
std::optional<ControlPhase> next_phase(ControlPhase phase, ControlEvent event);

std::string_view to_string(ControlPhase p);
std::string_view to_string(ControlEvent e);

// What the robot can do and sense. Implemented by the simulator, and by
// anything that drives hardware.
class PickingWorld {
 public:
  struct SwingReport {
    bool slipped = false;
    int edges_broken = 0;
    int ejected = 0;
  };
  struct RegraspReport {
    double torque_a = 0.0;  // N*m at wrist pose 0
    double torque_b = 0.0;  // N*m at wrist pose pi
    bool handoff_ok = false;
  };

  virtual ~PickingWorld() = default;

  virtual grasp::DepthMap capture_depth() = 0;
  virtual const grasp::GripperTemplate& gripper() const = 0;
  virtual bool execute_grasp(const grasp::GraspCandidate& candidate) = 0;
  virtual bool holding() const = 0;
  virtual ForceTrace lift() = 0;
  virtual SwingReport swing(const SwingParams& params) = 0;
  // Spin check plus support-arm handoff. On failure the object falls back into the bin.
  virtual RegraspReport regrasp() = 0;
  virtual ForceTrace transport() = 0;
  // Opens the gripper over the goal bin; returns how many objects actually landed there.
  virtual int release_to_goal() = 0;
  virtual void release_to_bin() = 0;
};

enum class End { A, B };

struct SpinCheckResult {
  double torque_pose_a = 0.0;
  double torque_pose_b = 0.0;
  End chosen_end = End::A;
};

// Minimal |torque| wins; an exact tie picks A.
SpinCheckResult choose_end(double torque_pose_a, double torque_pose_b);

struct RegraspResult {
  SpinCheckResult spin;
  bool handoff_ok = false;
};

// Throws std::logic_error when nothing is held.
RegraspResult regrasp(PickingWorld& world);

// theta += delta_theta on all three joints, clamped to angle_max. omega and n unchanged.
SwingParams schedule_swing(const SwingParams& current, double delta_theta, double angle_max);

enum class TuningContext { NoStopEither, NoStopLiftStopTransport, Other };

// Online threshold tuning. NoStopEither: once the trailing plateau_window entries of
// history_L have consecutive differences below plateau_eps, F_fail is fixed at their
// mean plus fail_margin and never updated again. NoStopLiftStopTransport: F_stop drops
// by delta_f, floored at F_fail + delta_f. Other: unchanged.
ThresholdState update_thresholds(const ThresholdState& thresholds, TuningContext context,
                                 const TunerParams& params = {});

enum class TransportVerdict { Success, MultiObject, Entangled };

TransportVerdict classify_outcome(const signal::TransportEvent& transport,
                                  const ThresholdState& thresholds);

struct ControllerState {
  ControlPhase phase = ControlPhase::Idle;
  SwingParams swing;
  ThresholdState thresholds;
  int n_transport = 0;
  AttemptRecord attempt_log;
};

// One line of the per-primitive log.
struct PrimitiveEvent {
  int attempt_id = 0;
  int iteration = 0;
  ControlPhase phase = ControlPhase::Idle;
  std::string primitive;    // detect, grasp, lift, swing, regrasp, spin, transport, release
  std::string event;        // classification or result
  std::optional<SwingParams> params;
  std::optional<double> force;  // terminal / stop force where relevant
  ThresholdState thresholds;
};

using EventSink = std::function<void(const PrimitiveEvent&)>;

// Closed-loop picking controller. Thresholds persist across attempts; swing
// angles restart from the configured values at every attempt.
class PickingController {
 public:
  explicit PickingController(ControllerConfig config, Policy policy = Policy::OursG);

  AttemptRecord run_attempt(PickingWorld& world, int attempt_id, const EventSink& sink = {});

  const ControllerConfig& config() const { return config_; }
  Policy policy() const { return policy_; }
  const ThresholdState& thresholds() const { return state_.thresholds; }
  const ControllerState& state() const { return state_; }

  // Every (phase, event) transition taken so far, for coverage checks.
  const std::vector<std::pair<ControlPhase, ControlEvent>>& transitions_taken() const {
    return taken_;
  }

 private:
  AttemptRecord run_closed_loop(PickingWorld& world, const EventSink& sink);
  AttemptRecord run_open_loop(PickingWorld& world, const EventSink& sink);
  std::vector<grasp::GraspCandidate> plan_grasps(PickingWorld& world);
  void fire(ControlEvent event);
  void emit(const EventSink& sink, std::string primitive, std::string event,
            std::optional<SwingParams> params = std::nullopt,
            std::optional<double> force = std::nullopt) const;
  AttemptRecord finish(Outcome outcome, std::optional<FailureMode> mode);
  void settle_delivery(int delivered);

  ControllerConfig config_;
  Policy policy_;
  ControllerState state_;
  int iteration_ = 0;
  std::vector<std::pair<ControlPhase, ControlEvent>> taken_;
};

// Single attempt with fresh thresholds taken from the config.
AttemptRecord run_attempt(PickingWorld& world, const ControllerConfig& config,
                          Policy policy = Policy::OursG);

}  // namespace wirepick
