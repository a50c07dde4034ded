#pragma once

#include <cstdint>
#include <vector>

namespace wirepick::grasp {

// Top-down height map. data[v * width + u] is the height in meters above the bin floor.
struct DepthMap {
  int width = 0;
  int height = 0;
  double resolution = 0.005;  // m per px
  double bin_depth = 0.5;     // m
  std::vector<double> data;

  static DepthMap zeros(int width, int height, double resolution, double bin_depth = 0.5);

  double at(int u, int v) const { return data[static_cast<std::size_t>(v) * width + u]; }
  double& at(int u, int v) { return data[static_cast<std::size_t>(v) * width + u]; }
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }

  void validate() const;
};

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  int count() const;
};

// Binary footprints centered on the grasp point. `contact` is the region
// between the fingertips, `collision` the finger bodies.
struct GripperTemplate {
  Mask contact;
  Mask collision;
  double open_width = 0.03;   // m
  double finger_depth = 0.01; // m the fingertips descend below the grasp level

  void validate() const;
};

// Parallel-jaw gripper rasterized at `resolution`; jaws close along the image x axis at rotation 0.
GripperTemplate make_parallel_jaw_template(double resolution, double open_width = 0.03,
                                           double finger_thickness = 0.01,
                                           double finger_width = 0.015);

struct Offset {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

struct RotatedTemplate {
  std::vector<Offset> contact;
  std::vector<Offset> collision;
};

// Nearest-neighbour inverse mapping of both masks; the two footprints stay disjoint.
RotatedTemplate rotate_template(const GripperTemplate& tmpl, double angle);

// Distance from the center beyond which no rotated offset reaches.
int template_margin(const GripperTemplate& tmpl);

// Relative slice levels (above the map minimum), highest first.
std::vector<double> slice_levels(double height_range, int n_heights);

// Rotation sampled at index i: i * pi / n_rotations.
double rotation_angle(int index, int n_rotations);

struct GraspCandidate {
  int u = 0;
  int v = 0;
  double rotation = 0.0;      // rad in [0, pi)
  double grasp_height = 0.0;  // m, absolute
  double score = 0.0;         // graspability in [0, 1]
  double mid_bias = 0.0;      // [0, 1], filled by rank_with_mid_bias
  int rotation_index = 0;
  int slice_index = 0;
};

// Strict total order used for ranking: score desc, grasp_height desc, u asc, v asc, rotation asc.
bool ranks_before(const GraspCandidate& a, const GraspCandidate& b);

struct DetectOptions {
  int n_rotations = 8;
  int n_heights = 4;
  int top_k = 20;
  int nms_radius = 3;  // px; candidates closer than this to a better one are dropped
};

// Graspability evaluation over rotations and height slices. Returns up to
// top_k local maxima in ranking order. Empty when no collision-free grasp exists.
std::vector<GraspCandidate> detect_grasps(const DepthMap& depth, const GripperTemplate& tmpl,
                                          const DetectOptions& options = {});

inline std::vector<GraspCandidate> detect_grasps(const DepthMap& depth,
                                                 const GripperTemplate& tmpl, int n_rotations,
                                                 int n_heights, int top_k) {
  DetectOptions o;
  o.n_rotations = n_rotations;
  o.n_heights = n_heights;
  o.top_k = top_k;
  return detect_grasps(depth, tmpl, o);
}

struct RidgeOptions {
  int pca_radius = 5;           // px
  double min_elongation = 4.0;  // principal eigenvalue ratio below which the ridge is degenerate
  int min_ridge_length = 6;     // px
  double height_band = 0.003;   // m; neighbours further than this in height belong to another surface
  double end_scale = 24.0;      // px from a visible end at which a one-ended ridge counts as middle
};

// Distance-from-ridge-end heuristic in [0, 1]. The start pixel first climbs to a local
// crest (at most 3 steps uphill); the ridge is the crest through that pixel whose height stays continuous (height_band per pixel) and above `level`; it ends
// visibly where the surface drops away, and is occluded where something covers it.
//   both ends visible: 2 * min(d1, d2) / (d1 + d2)
//   one end visible at distance d: min(1, d / end_scale)
//   no end visible: 1
// 0 when the neighbourhood is not elongated or the ridge is shorter than min_ridge_length.
double ridge_mid_bias(const DepthMap& depth, int u, int v, double level,
                      const RidgeOptions& options = {});

// Stable re-rank by (1 - alpha) * score + alpha * mid_bias * normalized grasp height.
// Stand-in for a learned grasp ranker; prefers high, middle-of-object grasps.
std::vector<GraspCandidate> rank_with_mid_bias(std::vector<GraspCandidate> candidates,
                                               const DepthMap& depth, double alpha,
                                               const RidgeOptions& options = {});

}  // namespace wirepick::grasp
