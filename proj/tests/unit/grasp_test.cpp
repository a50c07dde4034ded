#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles/grasp_oracle.hpp"
#include "oracles/synthetic.hpp"
#include "wirepick/errors.hpp"
#include "wirepick/grasp.hpp"

using namespace wirepick;
using namespace wirepick::grasp;
using std::numbers::pi;

namespace {

const GripperTemplate& gripper() {
  static const auto t = make_parallel_jaw_template(0.005);
  return t;
}

// One cable along the image x axis from u0 to u1 at row v.
DepthMap straight_cable(int u0 = 10, int u1 = 54, int v = 32, double h = 0.012) {
  auto d = DepthMap::zeros(64, 64, 0.005);
  synthetic::draw_cable(d, u0, v, u1, v, 1.0, h);
  return d;
}

}  // namespace

TEST(Template, ParallelJawShape) {
  const auto& t = gripper();
  EXPECT_NO_THROW(t.validate());
  EXPECT_EQ(t.contact.width, 11);
  EXPECT_EQ(t.contact.height, 11);
  EXPECT_EQ(t.contact.count(), 7 * 3);
  EXPECT_EQ(t.collision.count(), 4 * 3);
  for (std::size_t i = 0; i < t.contact.bits.size(); ++i) EXPECT_FALSE(t.contact.bits[i] && t.collision.bits[i]);
  EXPECT_THROW(make_parallel_jaw_template(0.0), ParameterError);
}

TEST(Template, ValidateRejectsBrokenMasks) {
  auto t = gripper();
  t.collision.bits[static_cast<std::size_t>(5 * 11 + 5)] = 1;  // center is contact
  EXPECT_THROW(t.validate(), ParameterError);
  t = gripper();
  t.collision.width = 9;
  EXPECT_THROW(t.validate(), ParameterError);
  t = gripper();
  std::fill(t.contact.bits.begin(), t.contact.bits.end(), 0);
  EXPECT_THROW(t.validate(), ParameterError);
}

TEST(Template, RotationKeepsFootprintsDisjoint) {
  for (int r = 0; r < 16; ++r) {
    const auto rt = rotate_template(gripper(), rotation_angle(r, 16));
    EXPECT_FALSE(rt.contact.empty());
    for (const auto& o : rt.contact)
      EXPECT_EQ(std::count(rt.collision.begin(), rt.collision.end(), o), 0);
  }
  const auto zero = rotate_template(gripper(), 0.0);
  EXPECT_EQ(zero.contact.size(), 21u);
  EXPECT_EQ(zero.collision.size(), 12u);
}

TEST(Template, RotationMatchesOracleFootprint) {
  for (int r = 0; r < 8; ++r) {
    const double a = rotation_angle(r, 8);
    const auto rt = rotate_template(gripper(), a);
    const auto fp = oracle::footprint(gripper(), a);
    ASSERT_EQ(rt.contact.size(), fp.contact.size());
    for (std::size_t i = 0; i < fp.contact.size(); ++i)
      EXPECT_EQ(rt.contact[i], (Offset{fp.contact[i].first, fp.contact[i].second}));
  }
}

TEST(Slices, LevelsAndRotations) {
  EXPECT_EQ(slice_levels(1.0, 4), (std::vector<double>{0.8, 0.6, 0.4, 0.2}));
  EXPECT_DOUBLE_EQ(rotation_angle(4, 8), pi / 2);
  EXPECT_DOUBLE_EQ(rotation_angle(0, 8), 0.0);
}

TEST(Ranking, TotalOrder) {
  GraspCandidate a, b;
  a.score = 0.5;
  b.score = 0.4;
  EXPECT_TRUE(ranks_before(a, b));
  b.score = 0.5;
  a.grasp_height = 0.02;
  b.grasp_height = 0.01;
  EXPECT_TRUE(ranks_before(a, b));
  b.grasp_height = 0.02;
  a.u = 1;
  b.u = 2;
  EXPECT_TRUE(ranks_before(a, b));
  b.u = 1;
  a.v = 3;
  b.v = 4;
  EXPECT_TRUE(ranks_before(a, b));
  b.v = 3;
  b.rotation_index = 1;
  EXPECT_TRUE(ranks_before(a, b));
  EXPECT_FALSE(ranks_before(b, a));
  EXPECT_FALSE(ranks_before(a, a));
}

TEST(DetectGrasps, EmptyBinHasNoCandidates) {
  EXPECT_TRUE(detect_grasps(DepthMap::zeros(64, 64, 0.005), gripper()).empty());
}

TEST(DetectGrasps, IsolatedCableTopCandidateOnBodyAndCollisionFree) {
  const auto d = straight_cable();
  const auto c = detect_grasps(d, gripper());
  ASSERT_FALSE(c.empty());
  const auto& top = c.front();
  EXPECT_GT(d.at(top.u, top.v), 0.0);
  EXPECT_EQ(oracle::collision_response(d, gripper(), top.u, top.v, top.rotation, top.grasp_height), 0);
  EXPECT_NE(top.rotation_index, 0);  // jaws never close along the cable
  const auto best = oracle::best_grasp(d, gripper(), 8, 4);
  ASSERT_TRUE(best);
  EXPECT_EQ(top.u, best->u);
  EXPECT_EQ(top.v, best->v);
  EXPECT_EQ(top.rotation_index, best->rotation_index);
}

TEST(DetectGrasps, NoCandidateBetweenCablesCloserThanTheJaws) {
  auto d = DepthMap::zeros(64, 64, 0.005);
  synthetic::draw_cable(d, 8, 29, 56, 29, 1.0, 0.012);
  synthetic::draw_cable(d, 8, 35, 56, 35, 1.0, 0.012);
  const auto c = detect_grasps(d, gripper(), 8, 4, 50);
  for (const auto& g : c) EXPECT_TRUE(g.v <= 30 || g.v >= 34) << g.u << "," << g.v;
  // centred in the gap, a grasp either hits a neighbour or has nothing between the jaws
  const double level = oracle::slices(d, 4).front().level;
  for (int u = 12; u < 52; ++u)
    for (int r = 0; r < 8; ++r) {
      const double a = rotation_angle(r, 8);
      int touched = 0;
      for (const auto& [dx, dy] : oracle::footprint(gripper(), a).contact)
        if (d.at(u + dx, 32 + dy) >= level) ++touched;
      EXPECT_TRUE(touched == 0 || oracle::collision_response(d, gripper(), u, 32, a, level) > 0)
          << "u " << u << " rotation " << r;
    }
}

TEST(DetectGrasps, Errors) {
  EXPECT_THROW(detect_grasps(DepthMap::zeros(8, 8, 0.005), gripper()), ParameterError);
  const auto d = straight_cable();
  EXPECT_THROW(detect_grasps(d, gripper(), 0, 4, 20), ParameterError);
  EXPECT_THROW(detect_grasps(d, gripper(), 8, 0, 20), ParameterError);
  EXPECT_THROW(detect_grasps(d, gripper(), 8, 4, 0), ParameterError);
  auto bad = d;
  bad.data[0] = -0.1;
  EXPECT_THROW(detect_grasps(bad, gripper()), ParameterError);
}

TEST(DetectGrasps, RespectsTopKAndNms) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = synthetic::random_map(rng);
    DetectOptions o;
    o.top_k = 5;
    const auto c = detect_grasps(d, gripper(), o);
    EXPECT_LE(c.size(), 5u);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        EXPECT_TRUE(ranks_before(c[i], c[j]));
        const int du = c[i].u - c[j].u, dv = c[i].v - c[j].v;
        EXPECT_GT(du * du + dv * dv, o.nms_radius * o.nms_radius);
      }
  }
}

TEST(DetectGraspsProperty, EveryCandidateCollisionFreeAndInBounds) {
  std::mt19937_64 rng(22);
  const int margin = template_margin(gripper());
  for (int trial = 0; trial < 15; ++trial) {
    const auto d = synthetic::random_map(rng);
    for (const auto& g : detect_grasps(d, gripper())) {
      EXPECT_EQ(oracle::collision_response(d, gripper(), g.u, g.v, g.rotation, g.grasp_height - *std::min_element(d.data.begin(), d.data.end())), 0);
      EXPECT_GE(g.score, 0.0);
      EXPECT_LE(g.score, 1.0);
      EXPECT_GE(g.u, margin);
      EXPECT_LT(g.u, d.width - margin);
      EXPECT_GE(g.rotation, 0.0);
      EXPECT_LT(g.rotation, pi);
    }
  }
}

TEST(DetectGraspsProperty, TopMatchesExhaustiveOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const auto d = synthetic::random_map(rng);
    const auto c = detect_grasps(d, gripper());
    const auto best = oracle::best_grasp(d, gripper(), 8, 4);
    ASSERT_EQ(c.empty(), !best.has_value());
    if (c.empty()) continue;
    EXPECT_EQ(c.front().u, best->u);
    EXPECT_EQ(c.front().v, best->v);
    EXPECT_EQ(c.front().rotation_index, best->rotation_index);
    EXPECT_DOUBLE_EQ(c.front().score, best->score);
  }
}

TEST(DetectGraspsProperty, DeterministicAndOffsetInvariant) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = synthetic::random_map(rng);
    auto shifted = d;
    for (auto& h : shifted.data) h += 0.05;
    const auto a = detect_grasps(d, gripper());
    const auto b = detect_grasps(d, gripper());
    const auto s = detect_grasps(shifted, gripper());
    ASSERT_EQ(a.size(), b.size());
    ASSERT_EQ(a.size(), s.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].u, b[i].u);
      EXPECT_EQ(a[i].score, b[i].score);
      EXPECT_EQ(a[i].u, s[i].u);
      EXPECT_EQ(a[i].v, s[i].v);
      EXPECT_EQ(a[i].rotation_index, s[i].rotation_index);
      EXPECT_EQ(a[i].slice_index, s[i].slice_index);
    }
  }
}

TEST(MidBias, StraightRidgeFollowsEndDistances) {
  const auto d = straight_cable(10, 54, 32);
  const double level = 0.006;
  // both ends visible: 2 * min(d1, d2) / (d1 + d2)
  EXPECT_NEAR(ridge_mid_bias(d, 32, 32, level), 1.0, 0.05);
  EXPECT_NEAR(ridge_mid_bias(d, 21, 32, level), 2.0 * 11 / 44, 0.05);
  EXPECT_GT(ridge_mid_bias(d, 32, 32, level), ridge_mid_bias(d, 16, 32, level));
  EXPECT_EQ(ridge_mid_bias(d, 32, 20, level), 0.0);  // floor
  EXPECT_EQ(ridge_mid_bias(d, 32, 32, 0.02), 0.0);   // below the slice
}

TEST(MidBias, OccludedRidgeCountsAsMiddle) {
  auto d = straight_cable(0, 63, 32);  // leaves the image on both sides
  EXPECT_DOUBLE_EQ(ridge_mid_bias(d, 32, 32, 0.006), 1.0);
  // one visible end, far away: saturates
  d = straight_cable(0, 54, 32);
  EXPECT_DOUBLE_EQ(ridge_mid_bias(d, 20, 32, 0.006), 1.0);
  EXPECT_LT(ridge_mid_bias(d, 50, 32, 0.006), 0.5);
}

TEST(MidBias, DegenerateRidgeIsZero) {
  auto d = DepthMap::zeros(64, 64, 0.005);
  synthetic::draw_cable(d, 30, 30, 30, 30, 6.0, 0.02);  // round blob
  EXPECT_EQ(ridge_mid_bias(d, 30, 30, 0.01), 0.0);
  d = straight_cable(30, 33, 32);  // too short
  EXPECT_EQ(ridge_mid_bias(d, 31, 32, 0.006), 0.0);
}

TEST(RankWithMidBias, AlphaZeroKeepsOrder) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = synthetic::random_map(rng);
    const auto c = detect_grasps(d, gripper());
    const auto r = rank_with_mid_bias(c, d, 0.0);
    ASSERT_EQ(r.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_EQ(r[i].u, c[i].u);
      EXPECT_EQ(r[i].v, c[i].v);
      EXPECT_EQ(r[i].rotation_index, c[i].rotation_index);
    }
  }
}

TEST(RankWithMidBias, AlphaOnePicksMiddleThirdOfIsolatedCable) {
  const auto d = straight_cable(10, 54, 32);
  const auto r = rank_with_mid_bias(detect_grasps(d, gripper()), d, 1.0);
  ASSERT_FALSE(r.empty());
  const double third = (54 - 10) / 3.0;
  EXPECT_GE(r.front().u, 10 + third);
  EXPECT_LE(r.front().u, 54 - third);
  EXPECT_GT(r.front().mid_bias, 0.6);
}

TEST(RankWithMidBias, FlatBlobKeepsOriginalOrder) {
  auto d = DepthMap::zeros(64, 64, 0.005);
  for (int v = 20; v < 44; ++v)
    for (int u = 20; u < 44; ++u) d.at(u, v) = 0.02;
  const auto c = detect_grasps(d, gripper(), 8, 1, 20);
  const auto r = rank_with_mid_bias(c, d, 0.7);
  ASSERT_EQ(r.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(r[i].mid_bias, r.front().mid_bias);
    EXPECT_EQ(r[i].u, c[i].u);
    EXPECT_EQ(r[i].v, c[i].v);
  }
}

TEST(RankWithMidBias, EmptyInput) { EXPECT_TRUE(rank_with_mid_bias({}, straight_cable(), 0.5).empty()); }
