#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "wirepick/config.hpp"
#include "wirepick/types.hpp"

namespace wirepick::signal {

enum class LiftEventKind { StopEntangled, GradientNearZero, CleanLift };

struct LiftEvent {
  LiftEventKind kind = LiftEventKind::CleanLift;
  std::optional<std::size_t> stop_index;  // only for StopEntangled
  double terminal_force = 0.0;            // filtered force at stop, else at the last sample
};

enum class TransportEventKind { StopEntangled, Delivered };

struct TransportEvent {
  TransportEventKind kind = TransportEventKind::Delivered;
  std::optional<std::size_t> stop_index;
  double terminal_force = 0.0;  // F_z^t: filtered force at the last sample (or at the stop)
};

// Centered running median. Near the ends the window is truncated to the samples
// that exist ([i-h, i+h] clipped to the trace); an even-sized truncated window
// yields its lower median. Ticks and phase are preserved.
ForceTrace median_filter(const ForceTrace& trace, int window);

// Central differences in the interior, one-sided differences at both ends.
// Units are newtons per tick.
std::vector<double> gradient(const ForceTrace& trace);

// Mean |gradient| over the trailing `tail_fraction` of the samples.
double tail_mean_abs_gradient(const std::vector<double>& grad, double tail_fraction);

// Classifies a lift trace: entanglement stop, end-grasp (force never builds
// up), or a clean lift.
LiftEvent detect_lift_event(const ForceTrace& trace, const ThresholdState& thresholds,
                            const SignalParams& params = {});

// Classifies a transport trace. Traces shorter than the filter window are
// filtered with the largest odd window that fits.
TransportEvent detect_transport_event(const ForceTrace& trace, const ThresholdState& thresholds,
                                      const SignalParams& params = {});

const char* to_string(LiftEventKind k);
const char* to_string(TransportEventKind k);

}  // namespace wirepick::signal
