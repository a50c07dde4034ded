#include "wirepick/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wirepick {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::LiftG: return "LiftG";
    case Policy::OursG: return "OursG";
    case Policy::OursA: return "OursA";
  }
  return "?";
}

std::optional<Policy> policy_from_string(std::string_view s) {
  for (Policy p : {Policy::LiftG, Policy::OursG, Policy::OursA})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

std::optional<ControlPhase> next_phase(ControlPhase phase, ControlEvent event) {
  using P = ControlPhase;
  using E = ControlEvent;
  switch (phase) {
    case P::Idle:
      if (event == E::Start) return P::Grasping;
      break;
    case P::Grasping:
      if (event == E::GraspOk) return P::Lifting;
      if (event == E::GraspFailed) return P::Done;
      break;
    case P::Lifting:
      if (event == E::LiftStop) return P::Swinging;
      if (event == E::LiftNeedsRegrasp) return P::Regrasping;
      if (event == E::LiftClean) return P::PreTransportSpin;
      break;
    case P::Swinging:
      if (event == E::SwingDone) return P::PreTransportSpin;
      if (event == E::Slipped) return P::Done;
      break;
    case P::Regrasping:
      if (event == E::RegraspOk) return P::PreTransportSpin;
      if (event == E::RegraspFailed) return P::Done;
      break;
    case P::PreTransportSpin:
      if (event == E::SpinDone) return P::Transporting;
      if (event == E::Slipped) return P::Done;
      break;
    case P::Transporting:
      if (event == E::TransportRetry) return P::Lifting;
      if (event == E::TransportFinished || event == E::LoopCapReached) return P::Done;
      break;
    case P::Done:
      break;
  }
  return std::nullopt;
}

std::string_view to_string(ControlPhase p) {
  switch (p) {
    case ControlPhase::Idle: return "Idle";
    case ControlPhase::Grasping: return "Grasping";
    case ControlPhase::Lifting: return "Lifting";
    case ControlPhase::Swinging: return "Swinging";
    case ControlPhase::Regrasping: return "Regrasping";
    case ControlPhase::PreTransportSpin: return "PreTransportSpin";
    case ControlPhase::Transporting: return "Transporting";
    case ControlPhase::Done: return "Done";
  }
  return "?";
}

std::string_view to_string(ControlEvent e) {
  switch (e) {
    case ControlEvent::Start: return "Start";
    case ControlEvent::GraspOk: return "GraspOk";
    case ControlEvent::GraspFailed: return "GraspFailed";
    case ControlEvent::LiftStop: return "LiftStop";
    case ControlEvent::LiftNeedsRegrasp: return "LiftNeedsRegrasp";
    case ControlEvent::LiftClean: return "LiftClean";
    case ControlEvent::SwingDone: return "SwingDone";
    case ControlEvent::RegraspOk: return "RegraspOk";
    case ControlEvent::RegraspFailed: return "RegraspFailed";
    case ControlEvent::SpinDone: return "SpinDone";
    case ControlEvent::Slipped: return "Slipped";
    case ControlEvent::TransportRetry: return "TransportRetry";
    case ControlEvent::TransportFinished: return "TransportFinished";
    case ControlEvent::LoopCapReached: return "LoopCapReached";
  }
  return "?";
}

SpinCheckResult choose_end(double torque_pose_a, double torque_pose_b) {
  SpinCheckResult r{torque_pose_a, torque_pose_b, End::A};
  if (std::abs(torque_pose_b) < std::abs(torque_pose_a)) r.chosen_end = End::B;
  return r;
}

RegraspResult regrasp(PickingWorld& world) {
  if (!world.holding()) throw std::logic_error("regrasp requested with an empty gripper");
  const auto report = world.regrasp();
  return {choose_end(report.torque_a, report.torque_b), report.handoff_ok};
}

SwingParams schedule_swing(const SwingParams& current, double delta_theta, double angle_max) {
  SwingParams next = current;
  for (double* a : {&next.theta3, &next.theta4, &next.theta5}) *a = std::min(*a + delta_theta, angle_max);
  return next;
}

ThresholdState update_thresholds(const ThresholdState& thresholds, TuningContext context,
                                 const TunerParams& params) {
  ThresholdState th = thresholds;
  switch (context) {
    case TuningContext::NoStopEither: {
      if (th.f_fail_converged) break;
      const auto m = static_cast<std::size_t>(params.plateau_window);
      const auto& L = th.history_L;
      if (L.size() < m) break;
      const auto first = L.end() - static_cast<std::ptrdiff_t>(m);
      bool flat = true;
      for (auto it = first + 1; it != L.end(); ++it)
        if (std::abs(*it - *(it - 1)) >= params.plateau_eps) flat = false;
      if (!flat) break;
      const double mean = std::accumulate(first, L.end(), 0.0) / static_cast<double>(m);
      const double candidate = std::min(mean + params.fail_margin, th.f_stop - th.delta_f);
      if (candidate > 0.0) {
        th.f_fail = candidate;
        th.f_fail_converged = true;
      }
      break;
    }
    case TuningContext::NoStopLiftStopTransport:
      th.f_stop = std::min(th.f_stop, std::max(th.f_stop - th.delta_f, th.f_fail + th.delta_f));
      break;
    case TuningContext::Other:
      break;
  }
  return th;
}

TransportVerdict classify_outcome(const signal::TransportEvent& transport,
                                  const ThresholdState& thresholds) {
  if (transport.kind == signal::TransportEventKind::StopEntangled) return TransportVerdict::Entangled;
  return transport.terminal_force < thresholds.f_fail ? TransportVerdict::Success
                                                       : TransportVerdict::MultiObject;
}

PickingController::PickingController(ControllerConfig config, Policy policy)
    : config_(std::move(config)), policy_(policy) {
  check_config(config_);
  state_.thresholds = config_.initial_thresholds();
  state_.swing = config_.swing;
}

void PickingController::fire(ControlEvent event) {
  const auto next = next_phase(state_.phase, event);
  if (!next)
    throw std::logic_error("illegal transition " + std::string(to_string(event)) + " from " +
                           std::string(to_string(state_.phase)));
  taken_.emplace_back(state_.phase, event);
  state_.phase = *next;
}

void PickingController::emit(const EventSink& sink, std::string primitive, std::string event,
                             std::optional<SwingParams> params, std::optional<double> force) const {
  if (!sink) return;
  PrimitiveEvent ev;
  ev.attempt_id = state_.attempt_log.attempt_id;
  ev.iteration = iteration_;
  ev.phase = state_.phase;
  ev.primitive = std::move(primitive);
  ev.event = std::move(event);
  ev.params = params;
  ev.force = force;
  ev.thresholds = state_.thresholds;
  sink(ev);
}

AttemptRecord PickingController::finish(Outcome outcome, std::optional<FailureMode> mode) {
  auto& rec = state_.attempt_log;
  rec.outcome = outcome;
  rec.failure_mode = mode;
  rec.n_transport = state_.n_transport;
  rec.thresholds_after = state_.thresholds;
  if (!config_.keep_traces) rec.traces.clear();
  return rec;
}

void PickingController::settle_delivery(int delivered) {
  state_.attempt_log.objects_delivered = delivered;
}

std::vector<grasp::GraspCandidate> PickingController::plan_grasps(PickingWorld& world) {
  const auto depth = world.capture_depth();
  grasp::DetectOptions opts;
  opts.n_rotations = config_.grasp.n_rotations;
  opts.n_heights = config_.grasp.n_heights;
  opts.top_k = config_.grasp.top_k;
  opts.nms_radius = config_.grasp.nms_radius;
  auto candidates = grasp::detect_grasps(depth, world.gripper(), opts);
  if (policy_ == Policy::OursA && !candidates.empty())
    candidates = grasp::rank_with_mid_bias(std::move(candidates), depth, config_.grasp.mid_bias_alpha);
  return candidates;
}

AttemptRecord PickingController::run_attempt(PickingWorld& world, int attempt_id,
                                             const EventSink& sink) {
  state_.phase = ControlPhase::Idle;
  state_.swing = config_.swing;
  state_.n_transport = 0;
  state_.attempt_log = AttemptRecord{};
  state_.attempt_log.attempt_id = attempt_id;
  iteration_ = 0;
  return policy_ == Policy::LiftG ? run_open_loop(world, sink) : run_closed_loop(world, sink);
}

namespace {

Outcome outcome_for_delivery(int delivered, std::optional<FailureMode>& mode) {
  if (delivered == 1) {
    mode.reset();
    return Outcome::SuccessSingle;
  }
  if (delivered == 0) {
    mode = FailureMode::SwingFailure;
    return Outcome::FailNothing;
  }
  mode = FailureMode::RecoveryFailure;
  return Outcome::FailMultiple;
}

}  // namespace

AttemptRecord PickingController::run_closed_loop(PickingWorld& world, const EventSink& sink) {
  auto& rec = state_.attempt_log;
  auto& th = state_.thresholds;
  auto keep = [&](ForceTrace tr) {
    if (config_.keep_traces) rec.traces.push_back(std::move(tr));
  };

  fire(ControlEvent::Start);
  const auto candidates = plan_grasps(world);
  emit(sink, "detect", std::to_string(candidates.size()) + " candidates");
  if (candidates.empty() || !world.execute_grasp(candidates.front())) {
    fire(ControlEvent::GraspFailed);
    emit(sink, "grasp", "GraspFailed");
    return finish(Outcome::FailNothing, FailureMode::GraspFailure);
  }
  fire(ControlEvent::GraspOk);
  emit(sink, "grasp", "GraspOk");

  while (true) {
    // lift with force monitoring
    auto lift_trace = world.lift();
    ++rec.counts.lift;
    const auto lift = signal::detect_lift_event(lift_trace, th, config_.signal);
    keep(std::move(lift_trace));
    const bool lift_stopped = lift.kind == signal::LiftEventKind::StopEntangled;

    if (lift_stopped) {
      fire(ControlEvent::LiftStop);
      emit(sink, "lift", signal::to_string(lift.kind), std::nullopt, lift.terminal_force);
      const auto rep = world.swing(state_.swing);
      ++rec.counts.swing;
      rec.objects_ejected += rep.ejected;
      if (rep.slipped) {
        fire(ControlEvent::Slipped);
        emit(sink, "swing", "Slipped", state_.swing);
        return finish(Outcome::FailNothing, FailureMode::SwingFailure);
      }
      fire(ControlEvent::SwingDone);
      emit(sink, "swing", "broke " + std::to_string(rep.edges_broken), state_.swing);
    } else if (lift.kind == signal::LiftEventKind::GradientNearZero ||
               state_.n_transport > config_.regrasp_after_transports) {
      fire(ControlEvent::LiftNeedsRegrasp);
      emit(sink, "lift", signal::to_string(lift.kind), std::nullopt, lift.terminal_force);
      const auto rr = regrasp(world);
      ++rec.counts.regrasp;
      if (!rr.handoff_ok) {
        fire(ControlEvent::RegraspFailed);
        emit(sink, "regrasp", "HandoffFailed");
        if (world.holding()) world.release_to_bin();
        return finish(Outcome::FailNothing, FailureMode::RegraspFailure);
      }
      fire(ControlEvent::RegraspOk);
      emit(sink, "regrasp", rr.spin.chosen_end == End::A ? "EndA" : "EndB");
    } else {
      fire(ControlEvent::LiftClean);
      emit(sink, "lift", signal::to_string(lift.kind), std::nullopt, lift.terminal_force);
    }

    // mandatory two-way spin before transport
    const SwingParams spin{0.0, 0.0, config_.spin_theta5, config_.spin_omega, 2};
    const auto spin_rep = world.swing(spin);
    ++rec.counts.spin;
    rec.objects_ejected += spin_rep.ejected;
    if (spin_rep.slipped) {
      fire(ControlEvent::Slipped);
      emit(sink, "spin", "Slipped", spin);
      return finish(Outcome::FailNothing, FailureMode::SwingFailure);
    }
    fire(ControlEvent::SpinDone);
    emit(sink, "spin", "ok", spin);

    // transport with force monitoring
    auto transport_trace = world.transport();
    ++state_.n_transport;
    ++rec.counts.transport;
    const auto tev = signal::detect_transport_event(transport_trace, th, config_.signal);
    keep(std::move(transport_trace));
    const auto verdict = classify_outcome(tev, th);

    TuningContext context = TuningContext::Other;
    if (tev.kind == signal::TransportEventKind::Delivered) {
      th.history_L.push_back(std::max(0.0, tev.terminal_force));
      if (!lift_stopped && verdict == TransportVerdict::Success) context = TuningContext::NoStopEither;
    } else if (!lift_stopped) {
      context = TuningContext::NoStopLiftStopTransport;
    }
    th = update_thresholds(th, context, config_.tuner);

    if (verdict == TransportVerdict::Success) {
      fire(ControlEvent::TransportFinished);
      emit(sink, "transport", signal::to_string(tev.kind), std::nullopt, tev.terminal_force);
      const int delivered = world.release_to_goal();
      settle_delivery(delivered);
      std::optional<FailureMode> mode;
      const auto outcome = outcome_for_delivery(delivered, mode);
      emit(sink, "release", std::to_string(delivered) + " delivered");
      return finish(outcome, mode);
    }

    ++iteration_;
    if (iteration_ >= config_.loop_cap) {
      fire(ControlEvent::LoopCapReached);
      emit(sink, "transport", signal::to_string(tev.kind), std::nullopt, tev.terminal_force);
      if (verdict == TransportVerdict::MultiObject) {
        const int delivered = world.release_to_goal();
        settle_delivery(delivered);
        std::optional<FailureMode> mode;
        const auto outcome = outcome_for_delivery(delivered, mode);
        emit(sink, "release", std::to_string(delivered) + " delivered");
        return finish(outcome, mode);
      }
      world.release_to_bin();
      emit(sink, "release", "aborted");
      return finish(Outcome::Aborted, std::nullopt);
    }
    state_.swing = schedule_swing(state_.swing, th.delta_theta, config_.angle_max);
    fire(ControlEvent::TransportRetry);
    emit(sink, "transport", signal::to_string(tev.kind), std::nullopt, tev.terminal_force);
  }
}

// Open-loop baseline: grasp, lift, transport, release. No monitoring, no recovery.
AttemptRecord PickingController::run_open_loop(PickingWorld& world, const EventSink& sink) {
  auto& rec = state_.attempt_log;
  state_.phase = ControlPhase::Grasping;
  const auto candidates = plan_grasps(world);
  emit(sink, "detect", std::to_string(candidates.size()) + " candidates");
  if (candidates.empty() || !world.execute_grasp(candidates.front())) {
    state_.phase = ControlPhase::Done;
    emit(sink, "grasp", "GraspFailed");
    return finish(Outcome::FailNothing, FailureMode::GraspFailure);
  }
  emit(sink, "grasp", "GraspOk");
  state_.phase = ControlPhase::Lifting;
  auto lift_trace = world.lift();
  ++rec.counts.lift;
  if (config_.keep_traces) rec.traces.push_back(std::move(lift_trace));
  emit(sink, "lift", "unmonitored");
  state_.phase = ControlPhase::Transporting;
  auto transport_trace = world.transport();
  ++rec.counts.transport;
  ++state_.n_transport;
  if (config_.keep_traces) rec.traces.push_back(std::move(transport_trace));
  emit(sink, "transport", "unmonitored");
  state_.phase = ControlPhase::Done;
  const int delivered = world.release_to_goal();
  settle_delivery(delivered);
  emit(sink, "release", std::to_string(delivered) + " delivered");
  std::optional<FailureMode> mode;
  const auto outcome = outcome_for_delivery(delivered, mode);
  return finish(outcome, mode);
}

AttemptRecord run_attempt(PickingWorld& world, const ControllerConfig& config, Policy policy) {
  PickingController controller(config, policy);
  return controller.run_attempt(world, 0);
}

}  // namespace wirepick
