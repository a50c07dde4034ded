#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "wirepick/errors.hpp"
#include "wirepick/types.hpp"

using namespace wirepick;
using std::numbers::pi;

TEST(ForceTrace, FromForcesNumbersTicksFromZero) {
  const auto tr = ForceTrace::from_forces(Phase::Transport, {0.5, 0.6, 0.7});
  ASSERT_EQ(tr.size(), 3u);
  EXPECT_EQ(tr.phase, Phase::Transport);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_EQ(tr.samples[i].t, static_cast<std::int64_t>(i));
  EXPECT_EQ(tr.forces(), (std::vector<double>{0.5, 0.6, 0.7}));
  EXPECT_NO_THROW(tr.validate());
}

TEST(ForceTrace, RejectsEmpty) {
  ForceTrace tr;
  EXPECT_THROW(tr.validate(), ParameterError);
}

TEST(ForceTrace, RejectsNonIncreasingTicks) {
  auto tr = ForceTrace::from_forces(Phase::Lift, {1, 2, 3});
  tr.samples[2].t = 1;
  EXPECT_THROW(tr.validate(), ParameterError);
}

TEST(ForceTrace, RejectsNegativeTick) {
  auto tr = ForceTrace::from_forces(Phase::Lift, {1});
  tr.samples[0].t = -1;
  EXPECT_THROW(tr.validate(), ParameterError);
}

TEST(ForceTrace, RejectsNonFiniteForce) {
  auto tr = ForceTrace::from_forces(Phase::Lift, {1, std::numeric_limits<double>::quiet_NaN()});
  EXPECT_THROW(tr.validate(), ParameterError);
  tr.samples[1].f_z = std::numeric_limits<double>::infinity();
  EXPECT_THROW(tr.validate(), ParameterError);
}

TEST(ForceTrace, RejectsMixedTorqueChannel) {
  auto tr = ForceTrace::from_forces(Phase::Regrasp, {1, 2});
  tr.samples[0].tau = 0.1;
  EXPECT_THROW(tr.validate(), ParameterError);
  tr.samples[1].tau = 0.2;
  EXPECT_NO_THROW(tr.validate());
}

TEST(SwingParams, AcceptsDefaults) {
  const SwingParams p{pi / 4, pi / 3, pi / 3, pi / 2, 2};
  EXPECT_NO_THROW(p.validate(pi, pi));
  EXPECT_DOUBLE_EQ(p.angle_sum(), pi / 4 + 2 * pi / 3);
}

TEST(SwingParams, RejectsOutOfRange) {
  EXPECT_THROW((SwingParams{-0.1, 0, 0, 1, 1}.validate(pi, pi)), ParameterError);
  EXPECT_THROW((SwingParams{0, 0, 3.5, 1, 1}.validate(pi, pi)), ParameterError);
  EXPECT_THROW((SwingParams{0, 0, 0, 0, 1}.validate(pi, pi)), ParameterError);
  EXPECT_THROW((SwingParams{0, 0, 0, 4, 1}.validate(pi, pi)), ParameterError);
  EXPECT_THROW((SwingParams{0, 0, 0, 1, 0}.validate(pi, pi)), ParameterError);
}

TEST(ThresholdState, DefaultsAreValid) {
  ThresholdState th;
  th.delta_theta = pi / 18;
  EXPECT_NO_THROW(th.validate());
}

TEST(ThresholdState, RejectsBrokenInvariants) {
  ThresholdState th;
  th.delta_theta = 0.1;
  auto bad = th;
  bad.f_fail = 3.0;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = th;
  bad.f_fail = 0.0;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = th;
  bad.delta_f = 0.0;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = th;
  bad.delta_theta = 0.0;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = th;
  bad.history_L = {0.8, -0.1};
  EXPECT_THROW(bad.validate(), ParameterError);
}

TEST(AttemptRecord, OutcomeAndModeMustAgree) {
  AttemptRecord r;
  r.thresholds_after.delta_theta = 0.1;
  r.outcome = Outcome::SuccessSingle;
  EXPECT_NO_THROW(r.validate());
  r.failure_mode = FailureMode::GraspFailure;
  EXPECT_THROW(r.validate(), ParameterError);
  r.outcome = Outcome::FailMultiple;
  EXPECT_NO_THROW(r.validate());
  r.failure_mode.reset();
  EXPECT_THROW(r.validate(), ParameterError);
  r.outcome = Outcome::Aborted;
  EXPECT_NO_THROW(r.validate());
}

TEST(AttemptRecord, TransportCounterMatchesNTransport) {
  AttemptRecord r;
  r.thresholds_after.delta_theta = 0.1;
  r.outcome = Outcome::SuccessSingle;
  r.counts.transport = 2;
  r.n_transport = 1;
  EXPECT_THROW(r.validate(), ParameterError);
  r.n_transport = 2;
  EXPECT_NO_THROW(r.validate());
}

TEST(Names, RoundTrip) {
  for (Phase p : {Phase::Lift, Phase::Transport, Phase::Regrasp})
    EXPECT_EQ(phase_from_string(to_string(p)), p);
  for (Outcome o : {Outcome::SuccessSingle, Outcome::FailNothing, Outcome::FailMultiple, Outcome::Aborted})
    EXPECT_EQ(outcome_from_string(to_string(o)), o);
  for (FailureMode m : {FailureMode::GraspFailure, FailureMode::SwingFailure, FailureMode::RegraspFailure,
                        FailureMode::RecoveryFailure})
    EXPECT_EQ(failure_mode_from_string(to_string(m)), m);
  EXPECT_FALSE(phase_from_string("lift"));
  EXPECT_FALSE(outcome_from_string(""));
  EXPECT_EQ(failure_mode_letter(FailureMode::GraspFailure), 'A');
  EXPECT_EQ(failure_mode_letter(FailureMode::RecoveryFailure), 'D');
}

TEST(PrimitiveCounts, Accumulate) {
  PrimitiveCounts a{1, 2, 3, 4, 5};
  a += PrimitiveCounts{1, 1, 1, 1, 1};
  EXPECT_EQ(a, (PrimitiveCounts{2, 3, 4, 5, 6}));
}

// Random traces with a single corrupted field never validate.
TEST(ForceTraceProperty, FuzzedCorruptionAlwaysRejected) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> f(-5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> xs(2 + rng() % 30);
    for (auto& x : xs) x = f(rng);
    auto tr = ForceTrace::from_forces(Phase::Lift, xs);
    ASSERT_NO_THROW(tr.validate());
    const auto i = static_cast<std::size_t>(rng() % tr.size());
    switch (rng() % 3) {
      case 0: tr.samples[i].f_z = std::numeric_limits<double>::quiet_NaN(); break;
      case 1: tr.samples[i].t = i == 0 ? -1 : tr.samples[i - 1].t; break;
      default: tr.samples[i].tau = 0.0; break;
    }
    EXPECT_THROW(tr.validate(), ParameterError) << "trial " << trial;
  }
}
