#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "wirepick/errors.hpp"
#include "wirepick/pgm_io.hpp"
#include "wirepick/trace_io.hpp"

using namespace wirepick;
using namespace wirepick::grasp;

TEST(TraceJsonl, RoundTripIsExact) {
  auto tr = ForceTrace::from_forces(Phase::Transport, {0.1, 1.0 / 3.0, -2.5e-7, 1e300});
  std::stringstream ss;
  write_trace_jsonl(ss, tr);
  const auto back = read_trace_jsonl(ss, Phase::Transport);
  ASSERT_EQ(back.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(back.samples[i].t, tr.samples[i].t);
    EXPECT_EQ(back.samples[i].f_z, tr.samples[i].f_z);
    EXPECT_FALSE(back.samples[i].tau);
  }
}

TEST(TraceJsonl, TorqueChannel) {
  std::stringstream ss("{\"t\":0,\"f_z\":0.5,\"tau\":0.01}\n\n{\"t\":3,\"f_z\":0.6,\"tau\":0.02}\n");
  const auto tr = read_trace_jsonl(ss, Phase::Regrasp);
  ASSERT_EQ(tr.size(), 2u);
  EXPECT_EQ(tr.phase, Phase::Regrasp);
  EXPECT_EQ(tr.samples[1].t, 3);
  EXPECT_DOUBLE_EQ(*tr.samples[1].tau, 0.02);
  std::stringstream out;
  write_trace_jsonl(out, tr);
  EXPECT_EQ(out.str(), "{\"t\":0,\"f_z\":0.5,\"tau\":0.01}\n{\"t\":3,\"f_z\":0.6,\"tau\":0.02}\n");
}

TEST(TraceJsonl, MalformedInputRejected) {
  for (const char* text : {"{\"t\":0}\n", "not json\n", "{\"t\":\"x\",\"f_z\":1}\n", "",
                           "{\"t\":1,\"f_z\":1}\n{\"t\":1,\"f_z\":2}\n"}) {
    std::stringstream ss(text);
    EXPECT_THROW(read_trace_jsonl(ss, Phase::Lift), FormatError) << text;
  }
}

TEST(TraceJsonl, ErrorNamesTheLine) {
  std::stringstream ss("{\"t\":0,\"f_z\":1}\n{bad\n");
  try {
    read_trace_jsonl(ss, Phase::Lift);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(TraceFiles, SaveLoadAndMissingFile) {
  const std::string path = ::testing::TempDir() + "trace_io_test.jsonl";
  const auto tr = ForceTrace::from_forces(Phase::Lift, {0.0, 0.4, 0.8});
  save_trace(path, tr);
  EXPECT_EQ(load_trace(path, Phase::Lift).forces(), tr.forces());
  EXPECT_THROW(load_trace(path + ".missing", Phase::Lift), FormatError);
}

TEST(DepthPgm, RoundTripQuantizesToHeightUnit) {
  auto d = DepthMap::zeros(4, 3, 0.005, 0.5);
  for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] = 0.0123 * static_cast<double>(i);
  std::stringstream ss;
  write_depth_pgm(ss, d, 1e-4);
  const auto back = read_depth_pgm(ss);
  EXPECT_EQ(back.width, 4);
  EXPECT_EQ(back.height, 3);
  EXPECT_DOUBLE_EQ(back.resolution, 0.005);
  EXPECT_DOUBLE_EQ(back.bin_depth, 0.5);
  for (std::size_t i = 0; i < d.data.size(); ++i) EXPECT_NEAR(back.data[i], d.data[i], 0.5e-4);
}

TEST(DepthPgm, HeaderCarriesResolution) {
  auto d = DepthMap::zeros(2, 1, 0.004, 0.3);
  d.data = {0.0, 0.01};
  std::stringstream ss;
  write_depth_pgm(ss, d, 1e-3);
  EXPECT_EQ(ss.str(), "P2\n# resolution 0.004 height_unit 0.001 bin_depth 0.3\n2 1\n10\n0 10\n");
}

TEST(DepthPgm, Errors) {
  auto d = DepthMap::zeros(1, 1, 0.005);
  d.data = {7.0};
  std::stringstream out;
  EXPECT_THROW(write_depth_pgm(out, d, 1e-4), ParameterError);
  EXPECT_THROW(write_depth_pgm(out, d, 0.0), ParameterError);
  for (const char* text : {"P5\n1 1\n1\n0\n", "P2\n2 2\n1\n0 0 0\n", "P2\n1 1\n1\n2\n", "P2\n-1 1\n1\n0\n",
                           "P2\n# resolution x\n1 1\n1\n0\n"}) {
    std::stringstream ss(text);
    EXPECT_THROW(read_depth_pgm(ss), FormatError) << text;
  }
}

TEST(MaskPgm, TemplateRoundTrip) {
  const auto t = make_parallel_jaw_template(0.005);
  const std::string a = ::testing::TempDir() + "contact.pgm", b = ::testing::TempDir() + "collision.pgm";
  save_template(t, a, b);
  const auto back = load_template(a, b);
  EXPECT_EQ(back.contact.bits, t.contact.bits);
  EXPECT_EQ(back.collision.bits, t.collision.bits);
  EXPECT_DOUBLE_EQ(back.open_width, t.open_width);
  EXPECT_DOUBLE_EQ(back.finger_depth, t.finger_depth);
  EXPECT_THROW(load_template(a + ".missing", b), FormatError);
}

TEST(MaskPgm, CommentIsReturned) {
  Mask m{3, 1, {1, 0, 1}};
  std::stringstream ss;
  write_mask_pgm(ss, m, "hello mask");
  std::string comment;
  const auto back = read_mask_pgm(ss, &comment);
  EXPECT_EQ(back.bits, m.bits);
  EXPECT_EQ(comment, "hello mask");
}

TEST(CandidatesCsv, HeaderAndRow) {
  GraspCandidate c;
  c.u = 3;
  c.v = 4;
  c.rotation = 0.5;
  c.grasp_height = 0.02;
  c.score = 0.75;
  c.mid_bias = 0.25;
  std::stringstream ss;
  write_candidates_csv(ss, {c});
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, "u,v,rotation,height,score,mid_bias");
  EXPECT_EQ(row.substr(0, 4), "3,4,");
}
