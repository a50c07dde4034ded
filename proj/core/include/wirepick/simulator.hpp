#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wirepick/grasp.hpp"
#include "wirepick/types.hpp"

namespace wirepick::sim {

enum class ObjectProfile { Medium74cm, Long120cm };

std::string_view to_string(ObjectProfile p);
std::optional<ObjectProfile> profile_from_string(std::string_view s);

// Physical constants of one harness type. Weights include the connectors.
struct ProfileSpec {
  double length;        // m
  double weight;        // N, whole object
  double connector_a;   // N, lumped at s = 0
  double connector_b;   // N, lumped at s = 1
  double hang_sigma;    // rad, spread of the hang angle before a handoff
  double entangle_prob; // per 2D crossing
};

ProfileSpec profile_spec(ObjectProfile p);

struct WorldConfig {
  ObjectProfile object_profile = ObjectProfile::Medium74cm;
  int n_objects = 0;
  std::uint64_t rng_seed = 0;
  double noise_sigma = 0.05;                 // N
  double swing_break_gain = 0.2;
  double slip_gain = 0.01;
  double eject_gain = 0.05;
  double regrasp_vertical_tolerance = 0.2617993877991494;  // 15 deg
  double p_pull = 0.5;
  double grasp_miss_prob = 0.02;
  std::optional<double> entangle_prob;       // overrides the profile default
  std::optional<double> hang_sigma;          // overrides the profile default
  int capacity = 60;

  // geometry
  double bin_size = 0.5;         // m, square
  double cable_radius = 0.006;   // m
  double node_spacing = 0.02;    // m along the polyline
  int camera_pixels = 100;       // square render

  // force synthesis
  double lift_height = 0.40;           // m
  double lifted_fraction_exponent = 2.0;
  double lift_tension_gain = 0.8;      // spike amplitude per (N * crossing weight)
  double transport_tension_gain = 1.6;
  double spike_rate = 1.0;             // spike probability 1 - exp(-rate * crossing weight)
  double dangle_min = 0.15;            // fraction of a dangling partner's weight carried
  double reach = 0.15;                 // m of cable that stays horizontal under the wrist
  int lift_samples = 100;
  int transport_samples = 150;

  // Throws ConfigError on broken invariants.
  void validate() const;
  ProfileSpec profile() const;
  double camera_resolution() const { return bin_size / camera_pixels; }
  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

struct Point3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

struct HarnessBody {
  int id = 0;
  std::vector<Point3> polyline;
  double length = 0.0;       // m
  double weight = 0.0;       // N
  double connector_a = 0.0;  // N at s = 0
  double connector_b = 0.0;  // N at s = 1
  std::optional<double> grasp_point;

  double cable_weight() const { return weight - connector_a - connector_b; }
  double polyline_length() const;
  Point3 point_at(double s) const;
  void validate() const;
  friend bool operator==(const HarnessBody&, const HarnessBody&) = default;
};

struct Edge {
  int a = 0;
  int b = 0;
  int weight = 1;  // number of entangled crossings
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct EntanglementGraph {
  std::vector<int> nodes;   // sorted ids
  std::vector<Edge> edges;  // a < b, at most one edge per pair

  bool has_node(int id) const;
  void add_node(int id);
  void add_crossing(int a, int b, int weight = 1);
  // Drops the node and every incident edge.
  void remove_node(int id);
  int remove_edges_of(int id);
  std::vector<std::size_t> incident(int id) const;
  int degree(int id) const;             // number of incident edges
  int crossing_weight(int id) const;    // sum of incident edge weights
  std::vector<int> component(int id) const;  // sorted, includes id
  int component_crossing_weight(int id) const;
  void validate() const;
  friend bool operator==(const EntanglementGraph&, const EntanglementGraph&) = default;
};

// Seeded stream with a replayable cursor: (seed, number of 64-bit draws).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}
  static Rng at_cursor(std::uint64_t seed, std::uint64_t draws);

  double uniform();                    // [0, 1), one draw
  double uniform(double lo, double hi);
  double normal(double mean, double sigma);  // Box-Muller, two draws
  bool bernoulli(double p);            // one draw

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

// Scripted overrides consumed in order, one per RNG-backed decision at the named site.
// Sites: grasp_miss, lift_spike, transport_spike, swing_break, slip, eject,
// hang_angle, pull_free, dangle. Booleans are 0/1.
struct ForcedOutcomes {
  std::map<std::string, std::deque<double>, std::less<>> queues;

  void push(const std::string& site, double value);
  std::optional<double> take(std::string_view site);
  bool empty() const;
  friend bool operator==(const ForcedOutcomes&, const ForcedOutcomes&) = default;
};

bool is_known_site(std::string_view site);

struct BinState {
  WorldConfig config;
  std::vector<HarnessBody> bodies;  // objects in the bin or in the gripper
  EntanglementGraph graph;
  Rng rng;
  ForcedOutcomes forced;
  std::optional<int> held;
  int next_id = 0;
  int delivered = 0;
  int ejected = 0;
  int placed = 0;  // total objects ever placed (reloads add to it)

  const HarnessBody& body(int id) const;
  HarnessBody& body(int id);
  bool contains(int id) const;
  int objects_in_bin() const { return static_cast<int>(bodies.size()); }
  // Conservation: in bin + delivered + ejected = placed.
  bool conserved() const { return objects_in_bin() + delivered + ejected == placed; }
  void validate() const;
};

BinState init_world(const WorldConfig& config);

// Adds objects until the bin holds n_objects again, continuing the RNG stream.
void refill(BinState& world);

// Clears and rebuilds the bin contents ("reload and shuffle").
void reshuffle(BinState& world);

struct RenderResult {
  grasp::DepthMap depth;
  std::vector<int> label;       // body id per pixel, -1 for floor
  std::vector<double> label_s;  // arc parameter of the top body per pixel
};

RenderResult render(const BinState& world, int width, int height, double resolution);
grasp::DepthMap render_depth(const BinState& world, int width, int height, double resolution);

// Closes the gripper on body `id` at arc parameter s.
void grasp_body(BinState& world, int id, double s);

// Grasp that can miss (probability grasp_miss_prob, site grasp_miss). True when held.
bool attempt_grasp(BinState& world, int id, double s);

// Fraction of the object's weight hanging free at lift height when held at s.
double lifted_fraction(const WorldConfig& config, double length, double s);

// Noise-free smooth lift ramp toward `target` at tick t.
double lift_ramp(double target, int tick, int n_samples);

// Gaussian bump of unit peak centered at `center` ticks.
double spike_shape(int tick, double center);

// Weight of the grasped object plus everything entangled with it.
double component_weight(const BinState& world, int id);

ForceTrace synth_lift_trace(BinState& world, int grasped);

struct SwingOutcome {
  int edges_broken = 0;
  bool slipped = false;
  std::vector<int> ejected_ids;
};

// Closed-form per-repetition probabilities.
double break_probability(const WorldConfig& config, const SwingParams& params, int crossing_weight);
double slip_probability(const WorldConfig& config, const SwingParams& params);
double eject_probability(const WorldConfig& config, double p_break, int degree);

SwingOutcome apply_swing(BinState& world, int grasped, const SwingParams& params);

// Static wrist torque of one cantilevered side of length `side_length` with a lumped end mass.
double side_torque(double linear_density, double side_length, double end_weight, double reach);

// Wrist torque with side A (s < grasp) held out horizontally, and with side B held out.
std::pair<double, double> wrist_torques(const HarnessBody& body, double s, double reach);

struct RegraspPhysics {
  double torque_a = 0.0;
  double torque_b = 0.0;
  double hang_angle = 0.0;
  bool handoff_ok = false;
  std::optional<double> new_s;
  int edges_removed = 0;
};

RegraspPhysics apply_regrasp_physics(BinState& world, int grasped);

ForceTrace synth_transport_trace(BinState& world, int grasped);

// Removes the grasped object and everything still attached to it; returns how many.
int deliver(BinState& world, int grasped);

// Opens the gripper over the bin; the object stays where it is.
void drop_into_bin(BinState& world);

}  // namespace wirepick::sim
