#include "wirepick/types.hpp"

#include <cmath>

#include "wirepick/errors.hpp"

namespace wirepick {

std::vector<double> ForceTrace::forces() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.f_z);
  return out;
}

void ForceTrace::validate() const {
  if (samples.empty()) throw ParameterError("force trace is empty");
  const bool has_tau = samples.front().tau.has_value();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.f_z)) throw ParameterError("force sample is not finite");
    if (s.t < 0) throw ParameterError("force sample has negative tick");
    if (i > 0 && s.t <= samples[i - 1].t)
      throw ParameterError("force trace ticks must be strictly increasing");
    if (s.tau.has_value() != has_tau)
      throw ParameterError("force trace mixes samples with and without torque");
    if (s.tau && !std::isfinite(*s.tau)) throw ParameterError("torque sample is not finite");
  }
}

ForceTrace ForceTrace::from_forces(Phase phase, const std::vector<double>& f_z) {
  ForceTrace tr;
  tr.phase = phase;
  tr.samples.reserve(f_z.size());
  for (std::size_t i = 0; i < f_z.size(); ++i)
    tr.samples.push_back({static_cast<std::int64_t>(i), f_z[i], std::nullopt});
  return tr;
}

void SwingParams::validate(double angle_max, double omega_max) const {
  for (double a : {theta3, theta4, theta5}) {
    if (!std::isfinite(a) || a < 0.0 || a > angle_max)
      throw ParameterError("swing angle outside [0, angle_max]");
  }
  if (!std::isfinite(omega) || omega <= 0.0 || omega > omega_max)
    throw ParameterError("swing omega outside (0, omega_max]");
  if (n < 1) throw ParameterError("swing repetition count must be >= 1");
}

void ThresholdState::validate() const {
  if (!(f_fail > 0.0)) throw ParameterError("f_fail must be positive");
  if (!(f_fail < f_stop)) throw ParameterError("f_fail must be < f_stop");
  if (!(delta_f > 0.0)) throw ParameterError("delta_f must be positive");
  if (!(delta_theta > 0.0)) throw ParameterError("delta_theta must be positive");
  for (double v : history_L)
    if (!(v >= 0.0)) throw ParameterError("history_L entries must be >= 0");
}

PrimitiveCounts& PrimitiveCounts::operator+=(const PrimitiveCounts& o) {
  lift += o.lift;
  swing += o.swing;
  spin += o.spin;
  regrasp += o.regrasp;
  transport += o.transport;
  return *this;
}

void AttemptRecord::validate() const {
  switch (outcome) {
    case Outcome::SuccessSingle:
      if (failure_mode) throw ParameterError("successful attempt carries a failure mode");
      break;
    case Outcome::FailNothing:
    case Outcome::FailMultiple:
      if (!failure_mode) throw ParameterError("failed attempt lacks a failure mode");
      break;
    case Outcome::Aborted:
      break;
  }
  if (counts.transport != n_transport)
    throw ParameterError("transport counter disagrees with n_transport");
  thresholds_after.validate();
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Lift: return "Lift";
    case Phase::Transport: return "Transport";
    case Phase::Regrasp: return "Regrasp";
  }
  return "?";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::SuccessSingle: return "SuccessSingle";
    case Outcome::FailNothing: return "FailNothing";
    case Outcome::FailMultiple: return "FailMultiple";
    case Outcome::Aborted: return "Aborted";
  }
  return "?";
}

std::string_view to_string(FailureMode m) {
  switch (m) {
    case FailureMode::GraspFailure: return "GraspFailure";
    case FailureMode::SwingFailure: return "SwingFailure";
    case FailureMode::RegraspFailure: return "RegraspFailure";
    case FailureMode::RecoveryFailure: return "RecoveryFailure";
  }
  return "?";
}

std::optional<Phase> phase_from_string(std::string_view s) {
  for (Phase p : {Phase::Lift, Phase::Transport, Phase::Regrasp})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

std::optional<Outcome> outcome_from_string(std::string_view s) {
  for (Outcome o : {Outcome::SuccessSingle, Outcome::FailNothing, Outcome::FailMultiple,
                    Outcome::Aborted})
    if (to_string(o) == s) return o;
  return std::nullopt;
}

std::optional<FailureMode> failure_mode_from_string(std::string_view s) {
  for (FailureMode m : {FailureMode::GraspFailure, FailureMode::SwingFailure,
                        FailureMode::RegraspFailure, FailureMode::RecoveryFailure})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

char failure_mode_letter(FailureMode m) {
  switch (m) {
    case FailureMode::GraspFailure: return 'A';
    case FailureMode::SwingFailure: return 'B';
    case FailureMode::RegraspFailure: return 'C';
    case FailureMode::RecoveryFailure: return 'D';
  }
  return '?';
}

}  // namespace wirepick
