#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wirepick {

enum class Phase { Lift, Transport, Regrasp };

struct ForceSample {
  std::int64_t t = 0;          // tick index, uniform sampling
  double f_z = 0.0;            // N
  std::optional<double> tau;   // N*m, wrist torque channel
};

struct ForceTrace {
  Phase phase = Phase::Lift;
  std::vector<ForceSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::vector<double> forces() const;

  // Throws ParameterError when the trace breaks its invariants.
  void validate() const;

  // Builds a trace with ticks 0..n-1 from a force sequence.
  static ForceTrace from_forces(Phase phase, const std::vector<double>& f_z);
};

struct SwingParams {
  double theta3 = 0.0;  // rad
  double theta4 = 0.0;
  double theta5 = 0.0;
  double omega = 0.0;   // rad/s
  int n = 1;

  double angle_sum() const { return theta3 + theta4 + theta5; }
  void validate(double angle_max, double omega_max) const;

  friend bool operator==(const SwingParams&, const SwingParams&) = default;
};

struct ThresholdState {
  double f_stop = 3.0;
  double f_fail = 1.0;
  double delta_f = 0.1;
  double delta_theta = 0.0;
  std::vector<double> history_L;
  bool f_fail_converged = false;

  void validate() const;

  friend bool operator==(const ThresholdState&, const ThresholdState&) = default;
};

enum class Outcome { SuccessSingle, FailNothing, FailMultiple, Aborted };

// Failure taxonomy: (A) grasp, (B) swing, (C) regrasp, (D) recovery.
enum class FailureMode { GraspFailure, SwingFailure, RegraspFailure, RecoveryFailure };

struct PrimitiveCounts {
  int lift = 0;
  int swing = 0;      // disentangling swings only
  int spin = 0;       // mandatory pre-transport two-way spins
  int regrasp = 0;
  int transport = 0;

  friend bool operator==(const PrimitiveCounts&, const PrimitiveCounts&) = default;
  PrimitiveCounts& operator+=(const PrimitiveCounts& o);
};

struct AttemptRecord {
  int attempt_id = 0;
  Outcome outcome = Outcome::Aborted;
  std::optional<FailureMode> failure_mode;
  PrimitiveCounts counts;
  int n_transport = 0;
  int objects_delivered = 0;
  int objects_ejected = 0;
  std::vector<ForceTrace> traces;
  ThresholdState thresholds_after;

  void validate() const;
};

std::string_view to_string(Phase p);
std::string_view to_string(Outcome o);
std::string_view to_string(FailureMode m);

std::optional<Phase> phase_from_string(std::string_view s);
std::optional<Outcome> outcome_from_string(std::string_view s);
std::optional<FailureMode> failure_mode_from_string(std::string_view s);

// Single-letter label used in the failure taxonomy (A..D).
char failure_mode_letter(FailureMode m);

}  // namespace wirepick
