#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/signal_oracle.hpp"
#include "wirepick/errors.hpp"
#include "wirepick/signal.hpp"

using namespace wirepick;
using namespace wirepick::signal;

namespace {

ForceTrace lift(const std::vector<double>& f) { return ForceTrace::from_forces(Phase::Lift, f); }
ForceTrace transport(const std::vector<double>& f) { return ForceTrace::from_forces(Phase::Transport, f); }

ThresholdState thresholds(double f_stop = 3.0, double f_fail = 1.0) {
  ThresholdState th;
  th.f_stop = f_stop;
  th.f_fail = f_fail;
  th.delta_theta = 0.1;
  return th;
}

std::vector<double> ramp(double to, int n) {
  std::vector<double> f;
  for (int i = 0; i < n; ++i) f.push_back(to * i / (n - 1));
  return f;
}

}  // namespace

TEST(MedianFilter, RemovesSingleSpike) {
  EXPECT_EQ(median_filter(lift({1, 9, 1}), 3).forces(), (std::vector<double>{1, 1, 1}));
}

TEST(MedianFilter, ConstantUnchanged) {
  EXPECT_EQ(median_filter(lift({2, 2, 2, 2, 2}), 3).forces(), (std::vector<double>{2, 2, 2, 2, 2}));
}

TEST(MedianFilter, TruncatedEvenWindowTakesLowerMedian) {
  // first window is {5, 1} -> lower median 1; last is {7, 3} -> 3
  EXPECT_EQ(median_filter(lift({5, 1, 9, 7, 3}), 3).forces(), (std::vector<double>{1, 5, 7, 7, 3}));
}

TEST(MedianFilter, WindowOneIsIdentity) {
  const auto tr = lift({3, 1, 2});
  EXPECT_EQ(median_filter(tr, 1).forces(), tr.forces());
}

TEST(MedianFilter, PreservesTicksAndPhase) {
  auto tr = transport({1, 2, 3, 4});
  for (auto& s : tr.samples) s.t *= 10;
  const auto out = median_filter(tr, 3);
  EXPECT_EQ(out.phase, Phase::Transport);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_EQ(out.samples[i].t, tr.samples[i].t);
}

TEST(MedianFilter, RejectsEvenOrOversizedWindow) {
  EXPECT_THROW(median_filter(lift({1, 2, 3, 4}), 2), ParameterError);
  EXPECT_THROW(median_filter(lift({1, 2, 3}), 5), ParameterError);
  EXPECT_THROW(median_filter(lift({1, 2, 3}), 0), ParameterError);
  EXPECT_THROW(median_filter(lift({1, 2, 3}), -1), ParameterError);
}

TEST(MedianFilter, MatchesSortOracleOnRandomTraces) {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(101);
    for (auto& x : f) x = n(rng);
    for (int w : {1, 3, 5, 7, 21}) {
      EXPECT_EQ(median_filter(lift(f), w).forces(), oracle::median(f, w)) << "trial " << trial << " w " << w;
    }
  }
}

TEST(MedianFilterProperty, IdempotentOnPiecewiseConstant) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> f;
    while (f.size() < 60) {
      const double level = static_cast<double>(rng() % 5);
      const auto run = 2 + rng() % 8;
      for (std::size_t k = 0; k < run; ++k) f.push_back(level);
    }
    const auto once = median_filter(lift(f), 3);
    EXPECT_EQ(median_filter(once, 3).forces(), once.forces()) << "trial " << trial;
  }
}

TEST(Gradient, LinearRamp) {
  EXPECT_EQ(gradient(lift({0, 1, 2, 3})), (std::vector<double>{1, 1, 1, 1}));
}

TEST(Gradient, ConstantIsZero) {
  for (double g : gradient(lift({4, 4, 4, 4, 4}))) EXPECT_EQ(g, 0.0);
}

TEST(Gradient, StepMatchesFiniteDifferenceOracle) {
  const std::vector<double> f{0, 0, 4, 4};
  EXPECT_EQ(gradient(lift(f)), oracle::finite_difference(f));
  EXPECT_EQ(gradient(lift(f)), (std::vector<double>{0, 2, 2, 0}));
}

TEST(Gradient, TwoSamples) { EXPECT_EQ(gradient(lift({1, 3})), (std::vector<double>{2, 2})); }

TEST(Gradient, SingletonRejected) { EXPECT_THROW(gradient(lift({1})), ParameterError); }

TEST(GradientProperty, AffineTraceHasConstantSlope) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = u(rng), b = u(rng);
    std::vector<double> f;
    for (int t = 0; t < 40; ++t) f.push_back(a + b * t);
    for (double g : gradient(lift(f))) EXPECT_NEAR(g, b, 1e-12);
  }
}

TEST(TailGradient, UsesCeilOfFraction) {
  EXPECT_DOUBLE_EQ(tail_mean_abs_gradient({5, 5, 5, -1, 1}, 0.25), 1.0);  // last 2
  EXPECT_DOUBLE_EQ(tail_mean_abs_gradient({5, 0}, 0.01), 0.0);           // at least 1
  EXPECT_THROW(tail_mean_abs_gradient({}, 0.5), ParameterError);
}

TEST(LiftEvent, SmoothRampIsClean) {
  const auto f = ramp(2.5, 100);
  const auto ev = detect_lift_event(lift(f), thresholds());
  EXPECT_EQ(ev.kind, LiftEventKind::CleanLift);
  EXPECT_FALSE(ev.stop_index);
  EXPECT_EQ(ev.terminal_force, oracle::median(f, 5).back());
  EXPECT_NEAR(ev.terminal_force, 2.5, 0.03);
}

TEST(LiftEvent, HoveringNearZeroNeedsRegrasp) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.01);
  std::vector<double> f(100);
  for (auto& x : f) x = 0.05 + n(rng);
  const auto ev = detect_lift_event(lift(f), thresholds());
  EXPECT_EQ(ev.kind, LiftEventKind::GradientNearZero);
  EXPECT_FALSE(ev.stop_index);
}

TEST(LiftEvent, FlatHeavyObjectIsNotAnEndGrasp) {
  const auto ev = detect_lift_event(lift(std::vector<double>(100, 1.2)), thresholds());
  EXPECT_EQ(ev.kind, LiftEventKind::CleanLift);
}

TEST(LiftEvent, SpikeStopsAtFirstFilteredCrossing) {
  auto f = ramp(1.0, 100);
  for (int i = 35; i <= 45; ++i) f[static_cast<std::size_t>(i)] = 3.4;
  const auto ev = detect_lift_event(lift(f), thresholds());
  ASSERT_EQ(ev.kind, LiftEventKind::StopEntangled);
  const auto filtered = oracle::median(f, 5);
  EXPECT_EQ(ev.stop_index, oracle::first_at_or_above(filtered, 3.0));
  EXPECT_EQ(ev.stop_index, 35u);
  EXPECT_DOUBLE_EQ(ev.terminal_force, 3.4);
}

TEST(LiftEvent, SpikePeakAtIndex37) {
  // a plateau starting at 37 survives the filter exactly there
  auto f = ramp(1.5, 100);
  for (int i = 37; i < 50; ++i) f[static_cast<std::size_t>(i)] = 3.4;
  const auto ev = detect_lift_event(lift(f), thresholds());
  ASSERT_EQ(ev.kind, LiftEventKind::StopEntangled);
  EXPECT_EQ(*ev.stop_index, 37u);
}

TEST(LiftEvent, SingleSampleGlitchIsFilteredOut) {
  auto f = ramp(1.0, 100);
  f[50] = 10.0;
  EXPECT_NE(detect_lift_event(lift(f), thresholds()).kind, LiftEventKind::StopEntangled);
}

TEST(LiftEvent, RejectsWrongPhaseAndShortTrace) {
  EXPECT_THROW(detect_lift_event(transport(ramp(1, 10)), thresholds()), ParameterError);
  EXPECT_THROW(detect_lift_event(lift({1}), thresholds()), ParameterError);
  EXPECT_THROW(detect_lift_event(lift({1, 2, 3}), thresholds()), ParameterError);  // window 5
}

TEST(LiftEventProperty, NoStopBelowThreshold) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> f(30 + rng() % 100);
    for (auto& x : f) x = u(rng);
    const auto filtered = oracle::median(f, 5);
    const double peak = *std::max_element(filtered.begin(), filtered.end());
    const auto ev = detect_lift_event(lift(f), thresholds());
    if (peak < 3.0) EXPECT_NE(ev.kind, LiftEventKind::StopEntangled);
    else EXPECT_EQ(ev.kind, LiftEventKind::StopEntangled);
    if (ev.stop_index) EXPECT_GE(filtered[*ev.stop_index], 3.0);
  }
}

TEST(LiftEventProperty, RaisingStopNeverCreatesAStop) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> f(50);
    for (auto& x : f) x = u(rng);
    const double stop = 1.5 + u(rng);
    if (detect_lift_event(lift(f), thresholds(stop)).kind != LiftEventKind::CleanLift) continue;
    for (double higher : {stop + 0.1, stop + 1.0, stop + 5.0})
      EXPECT_NE(detect_lift_event(lift(f), thresholds(higher)).kind, LiftEventKind::StopEntangled);
  }
}

TEST(TransportEvent, SpikeStops) {
  std::vector<double> f(150, 0.8);
  for (int i = 70; i < 80; ++i) f[static_cast<std::size_t>(i)] = 3.8;
  const auto ev = detect_transport_event(transport(f), thresholds());
  EXPECT_EQ(ev.kind, TransportEventKind::StopEntangled);
  EXPECT_EQ(ev.stop_index, 70u);
}

TEST(TransportEvent, FlatSingleObjectDelivered) {
  const auto ev = detect_transport_event(transport(std::vector<double>(150, 0.8)), thresholds());
  EXPECT_EQ(ev.kind, TransportEventKind::Delivered);
  EXPECT_DOUBLE_EQ(ev.terminal_force, 0.8);
}

TEST(TransportEvent, FlatTwoObjectsDelivered) {
  const auto ev = detect_transport_event(transport(std::vector<double>(150, 1.6)), thresholds());
  EXPECT_EQ(ev.kind, TransportEventKind::Delivered);
  EXPECT_DOUBLE_EQ(ev.terminal_force, 1.6);
}

TEST(TransportEvent, ShortTraceUsesLargestFittingWindow) {
  EXPECT_DOUBLE_EQ(detect_transport_event(transport({0.7}), thresholds()).terminal_force, 0.7);
  // four samples -> window 3; last window {0.9, 0.1} -> lower median 0.1
  EXPECT_DOUBLE_EQ(detect_transport_event(transport({0.9, 0.9, 0.9, 0.1}), thresholds()).terminal_force, 0.1);
}

TEST(TransportEvent, RejectsEmptyAndWrongPhase) {
  EXPECT_THROW(detect_transport_event(transport({}), thresholds()), ParameterError);
  EXPECT_THROW(detect_transport_event(lift({1, 2, 3, 4, 5}), thresholds()), ParameterError);
}

TEST(Names, EventKinds) {
  EXPECT_STREQ(to_string(LiftEventKind::GradientNearZero), "GradientNearZero");
  EXPECT_STREQ(to_string(TransportEventKind::Delivered), "Delivered");
}
