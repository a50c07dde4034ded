#include "wirepick/signal.hpp"

#include <algorithm>
#include <cmath>

#include "wirepick/errors.hpp"

namespace wirepick::signal {

ForceTrace median_filter(const ForceTrace& trace, int window) {
  const auto n = trace.samples.size();
  if (window < 1 || window % 2 == 0) throw ParameterError("median window must be odd and >= 1");
  if (static_cast<std::size_t>(window) > n) throw ParameterError("median window longer than trace");

  ForceTrace out = trace;
  const std::ptrdiff_t half = window / 2;
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(window));
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - half);
    const auto hi = std::min(last, i + half);
    buf.clear();
    for (auto j = lo; j <= hi; ++j) buf.push_back(trace.samples[static_cast<std::size_t>(j)].f_z);
    const auto mid = buf.begin() + static_cast<std::ptrdiff_t>((buf.size() - 1) / 2);
    std::nth_element(buf.begin(), mid, buf.end());
    out.samples[static_cast<std::size_t>(i)].f_z = *mid;
  }
  return out;
}

std::vector<double> gradient(const ForceTrace& trace) {
  const auto n = trace.samples.size();
  if (n < 2) throw ParameterError("gradient needs at least two samples");
  const auto& s = trace.samples;
  std::vector<double> g(n);
  g.front() = s[1].f_z - s[0].f_z;
  g.back() = s[n - 1].f_z - s[n - 2].f_z;
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (s[i + 1].f_z - s[i - 1].f_z) / 2.0;
  return g;
}

double tail_mean_abs_gradient(const std::vector<double>& grad, double tail_fraction) {
  if (grad.empty()) throw ParameterError("empty gradient");
  auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(grad.size())));
  tail = std::clamp<std::size_t>(tail, 1, grad.size());
  double sum = 0.0;
  for (std::size_t i = grad.size() - tail; i < grad.size(); ++i) sum += std::abs(grad[i]);
  return sum / static_cast<double>(tail);
}

namespace {

std::optional<std::size_t> first_crossing(const ForceTrace& filtered, double level) {
  for (std::size_t i = 0; i < filtered.samples.size(); ++i)
    if (filtered.samples[i].f_z >= level) return i;
  return std::nullopt;
}

}  // namespace

LiftEvent detect_lift_event(const ForceTrace& trace, const ThresholdState& thresholds,
                            const SignalParams& params) {
  if (trace.phase != Phase::Lift) throw ParameterError("lift event detection needs a Lift trace");
  if (trace.size() < 2) throw ParameterError("lift trace too short");
  const ForceTrace filtered = median_filter(trace, params.filter_window);

  LiftEvent ev;
  if (auto idx = first_crossing(filtered, thresholds.f_stop)) {
    ev.kind = LiftEventKind::StopEntangled;
    ev.stop_index = *idx;
    ev.terminal_force = filtered.samples[*idx].f_z;
    return ev;
  }
  ev.terminal_force = filtered.samples.back().f_z;
  const double tail_grad = tail_mean_abs_gradient(gradient(filtered), params.tail_fraction);
  const double near_zero = params.near_zero_ratio * thresholds.f_fail;
  ev.kind = (tail_grad <= params.grad_eps && ev.terminal_force < near_zero)
                ? LiftEventKind::GradientNearZero
                : LiftEventKind::CleanLift;
  return ev;
}

TransportEvent detect_transport_event(const ForceTrace& trace, const ThresholdState& thresholds,
                                      const SignalParams& params) {
  if (trace.phase != Phase::Transport)
    throw ParameterError("transport event detection needs a Transport trace");
  if (trace.empty()) throw ParameterError("transport trace is empty");
  int window = params.filter_window;
  const auto n = static_cast<int>(trace.size());
  if (window > n) window = (n % 2 == 1) ? n : n - 1;
  const ForceTrace filtered = median_filter(trace, window);

  TransportEvent ev;
  if (auto idx = first_crossing(filtered, thresholds.f_stop)) {
    ev.kind = TransportEventKind::StopEntangled;
    ev.stop_index = *idx;
    ev.terminal_force = filtered.samples[*idx].f_z;
  } else {
    ev.kind = TransportEventKind::Delivered;
    ev.terminal_force = filtered.samples.back().f_z;
  }
  return ev;
}

const char* to_string(LiftEventKind k) {
  switch (k) {
    case LiftEventKind::StopEntangled: return "StopEntangled";
    case LiftEventKind::GradientNearZero: return "GradientNearZero";
    case LiftEventKind::CleanLift: return "CleanLift";
  }
  return "?";
}

const char* to_string(TransportEventKind k) {
  switch (k) {
    case TransportEventKind::StopEntangled: return "StopEntangled";
    case TransportEventKind::Delivered: return "Delivered";
  }
  return "?";
}

}  // namespace wirepick::signal
