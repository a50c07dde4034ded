#include "wirepick/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "wirepick/config.hpp"
#include "wirepick/errors.hpp"

namespace wirepick::sim {

std::string_view to_string(ObjectProfile p) {
  return p == ObjectProfile::Medium74cm ? "Medium74cm" : "Long120cm";
}

std::optional<ObjectProfile> profile_from_string(std::string_view s) {
  if (s == "Medium74cm" || s == "medium") return ObjectProfile::Medium74cm;
  if (s == "Long120cm" || s == "long") return ObjectProfile::Long120cm;
  return std::nullopt;
}

ProfileSpec profile_spec(ObjectProfile p) {
  switch (p) {
    case ObjectProfile::Medium74cm: return {0.74, 0.8, 0.1, 0.1, 0.08, 0.022};
    case ObjectProfile::Long120cm: return {1.20, 1.3, 0.15, 0.15, 0.12, 0.06};
  }
  throw std::logic_error("unknown profile");
}

ProfileSpec WorldConfig::profile() const {
  auto spec = profile_spec(object_profile);
  if (entangle_prob) spec.entangle_prob = *entangle_prob;
  if (hang_sigma) spec.hang_sigma = *hang_sigma;
  return spec;
}

void WorldConfig::validate() const {
  auto unit = [](double g, const char* name) {
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  if (n_objects < 0) throw ConfigError("n_objects must be >= 0");
  if (capacity < 0) throw ConfigError("capacity must be >= 0");
  if (n_objects > capacity)
    throw ConfigError("n_objects " + std::to_string(n_objects) + " exceeds bin capacity " +
                      std::to_string(capacity));
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  unit(swing_break_gain, "swing_break_gain");
  unit(slip_gain, "slip_gain");
  unit(eject_gain, "eject_gain");
  unit(p_pull, "p_pull");
  unit(grasp_miss_prob, "grasp_miss_prob");
  if (entangle_prob) unit(*entangle_prob, "entangle_prob");
  unit(dangle_min, "dangle_min");
  if (hang_sigma && !(*hang_sigma >= 0.0)) throw ConfigError("hang_sigma must be >= 0");
  if (!(regrasp_vertical_tolerance >= 0.0))
    throw ConfigError("regrasp_vertical_tolerance must be >= 0");
  if (!(bin_size > 0.0) || !(cable_radius > 0.0) || !(node_spacing > 0.0))
    throw ConfigError("bin geometry must be positive");
  if (cable_radius * 4 >= bin_size) throw ConfigError("cable_radius too large for the bin");
  if (camera_pixels < 8) throw ConfigError("camera_pixels must be >= 8");
  if (!(lift_height > 0.0)) throw ConfigError("lift_height must be positive");
  if (!(lifted_fraction_exponent > 0.0)) throw ConfigError("lifted_fraction_exponent must be positive");
  if (!(lift_tension_gain >= 0.0) || !(transport_tension_gain >= 0.0) || !(spike_rate >= 0.0))
    throw ConfigError("tension gains and spike_rate must be >= 0");
  if (!(reach > 0.0)) throw ConfigError("reach must be positive");
  if (lift_samples < 8 || transport_samples < 8) throw ConfigError("trace lengths must be >= 8");
}

// ---------------------------------------------------------------- bodies

double HarnessBody::polyline_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const auto& a = polyline[i - 1];
    const auto& b = polyline[i];
    len += std::sqrt((b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y) + (b.z - a.z) * (b.z - a.z));
  }
  return len;
}

Point3 HarnessBody::point_at(double s) const {
  if (polyline.empty()) throw std::logic_error("empty polyline");
  if (polyline.size() == 1) return polyline.front();
  const double total = polyline_length();
  double target = std::clamp(s, 0.0, 1.0) * total;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const auto& a = polyline[i - 1];
    const auto& b = polyline[i];
    const double seg = std::sqrt((b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y) + (b.z - a.z) * (b.z - a.z));
    if (target <= seg || i + 1 == polyline.size()) {
      const double t = seg > 0.0 ? std::clamp(target / seg, 0.0, 1.0) : 0.0;
      return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
    }
    target -= seg;
  }
  return polyline.back();
}

void HarnessBody::validate() const {
  if (!(weight > 0.0)) throw ParameterError("body weight must be positive");
  if (connector_a < 0.0 || connector_b < 0.0 || cable_weight() <= 0.0)
    throw ParameterError("connector weights must be >= 0 and leave cable weight");
  if (polyline.size() < 2) throw ParameterError("polyline needs at least two points");
  if (std::abs(polyline_length() - length) > 0.01 * length)
    throw ParameterError("polyline length differs from declared length by more than 1%");
  if (grasp_point && !(*grasp_point >= 0.0 && *grasp_point <= 1.0))
    throw ParameterError("grasp point outside [0, 1]");
}

// ---------------------------------------------------------------- graph

bool EntanglementGraph::has_node(int id) const {
  return std::binary_search(nodes.begin(), nodes.end(), id);
}

void EntanglementGraph::add_node(int id) {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it != nodes.end() && *it == id) return;
  nodes.insert(it, id);
}

void EntanglementGraph::add_crossing(int a, int b, int weight) {
  if (a == b) throw std::logic_error("self-loop in entanglement graph");
  if (!has_node(a) || !has_node(b)) throw std::logic_error("edge endpoint missing");
  if (weight < 1) throw std::logic_error("crossing weight must be >= 1");
  if (a > b) std::swap(a, b);
  for (auto& e : edges)
    if (e.a == a && e.b == b) {
      e.weight += weight;
      return;
    }
  edges.push_back({a, b, weight});
}

void EntanglementGraph::remove_node(int id) {
  remove_edges_of(id);
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it != nodes.end() && *it == id) nodes.erase(it);
}

int EntanglementGraph::remove_edges_of(int id) {
  const auto before = edges.size();
  std::erase_if(edges, [id](const Edge& e) { return e.a == id || e.b == id; });
  return static_cast<int>(before - edges.size());
}

std::vector<std::size_t> EntanglementGraph::incident(int id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].a == id || edges[i].b == id) out.push_back(i);
  // deterministic order: by partner id
  std::sort(out.begin(), out.end(), [&](std::size_t x, std::size_t y) {
    const int px = edges[x].a == id ? edges[x].b : edges[x].a;
    const int py = edges[y].a == id ? edges[y].b : edges[y].a;
    return px < py;
  });
  return out;
}

int EntanglementGraph::degree(int id) const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(),
                                        [id](const Edge& e) { return e.a == id || e.b == id; }));
}

int EntanglementGraph::crossing_weight(int id) const {
  int w = 0;
  for (const auto& e : edges)
    if (e.a == id || e.b == id) w += e.weight;
  return w;
}

std::vector<int> EntanglementGraph::component(int id) const {
  std::set<int> seen{id};
  std::vector<int> frontier{id};
  while (!frontier.empty()) {
    const int n = frontier.back();
    frontier.pop_back();
    for (const auto& e : edges) {
      int other = -1;
      if (e.a == n) other = e.b;
      else if (e.b == n) other = e.a;
      if (other >= 0 && seen.insert(other).second) frontier.push_back(other);
    }
  }
  return {seen.begin(), seen.end()};
}

int EntanglementGraph::component_crossing_weight(int id) const {
  const auto comp = component(id);
  int w = 0;
  for (const auto& e : edges)
    if (std::binary_search(comp.begin(), comp.end(), e.a)) w += e.weight;
  return w;
}

void EntanglementGraph::validate() const {
  if (!std::is_sorted(nodes.begin(), nodes.end()) ||
      std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw ParameterError("graph nodes must be sorted and unique");
  std::set<std::pair<int, int>> pairs;
  for (const auto& e : edges) {
    if (e.a == e.b) throw ParameterError("self-loop in entanglement graph");
    if (e.a > e.b) throw ParameterError("edge endpoints must be ordered");
    if (e.weight < 1) throw ParameterError("crossing weight must be >= 1");
    if (!has_node(e.a) || !has_node(e.b)) throw ParameterError("dangling edge in entanglement graph");
    if (!pairs.emplace(e.a, e.b).second) throw ParameterError("duplicate edge in entanglement graph");
  }
}

// ---------------------------------------------------------------- rng

Rng Rng::at_cursor(std::uint64_t seed, std::uint64_t draws) {
  Rng r(seed);
  r.engine_.discard(draws);
  r.draws_ = draws;
  return r;
}

double Rng::uniform() {
  ++draws_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal(double mean, double sigma) {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

// ---------------------------------------------------------------- forced outcomes

namespace {
constexpr std::string_view kSites[] = {"grasp_miss", "lift_spike", "transport_spike",
                                       "swing_break", "slip",      "eject",
                                       "hang_angle", "pull_free",  "dangle"};
}

bool is_known_site(std::string_view site) {
  return std::find(std::begin(kSites), std::end(kSites), site) != std::end(kSites);
}

void ForcedOutcomes::push(const std::string& site, double value) {
  if (!is_known_site(site)) throw ParameterError("unknown forced-outcome site '" + site + "'");
  queues[site].push_back(value);
}

std::optional<double> ForcedOutcomes::take(std::string_view site) {
  const auto it = queues.find(site);
  if (it == queues.end() || it->second.empty()) return std::nullopt;
  const double v = it->second.front();
  it->second.pop_front();
  return v;
}

bool ForcedOutcomes::empty() const {
  return std::all_of(queues.begin(), queues.end(), [](const auto& kv) { return kv.second.empty(); });
}

namespace {

bool decide(BinState& w, std::string_view site, double p) {
  if (auto f = w.forced.take(site)) return *f != 0.0;
  return w.rng.bernoulli(p);
}

double draw_uniform(BinState& w, std::string_view site, double lo, double hi) {
  if (auto f = w.forced.take(site)) return *f;
  return w.rng.uniform(lo, hi);
}

double draw_normal(BinState& w, std::string_view site, double sigma) {
  if (auto f = w.forced.take(site)) return *f;
  return w.rng.normal(0.0, sigma);
}

double noise(BinState& w) {
  const double sigma = w.config.noise_sigma;
  return sigma > 0.0 ? w.rng.normal(0.0, sigma) : 0.0;
}

}  // namespace

// ---------------------------------------------------------------- bin state

const HarnessBody& BinState::body(int id) const {
  for (const auto& b : bodies)
    if (b.id == id) return b;
  throw std::logic_error("no body with id " + std::to_string(id));
}

HarnessBody& BinState::body(int id) {
  return const_cast<HarnessBody&>(std::as_const(*this).body(id));
}

bool BinState::contains(int id) const {
  return std::any_of(bodies.begin(), bodies.end(), [id](const HarnessBody& b) { return b.id == id; });
}

void BinState::validate() const {
  config.validate();
  graph.validate();
  if (graph.nodes.size() != bodies.size()) throw ParameterError("graph nodes and bodies disagree");
  for (const auto& b : bodies) {
    b.validate();
    if (!graph.has_node(b.id)) throw ParameterError("body missing from the graph");
    if (b.id >= next_id) throw ParameterError("body id beyond next_id");
  }
  if (held) {
    if (!contains(*held)) throw ParameterError("held id is not in the world");
    if (!body(*held).grasp_point) throw ParameterError("held body has no grasp point");
  }
  if (delivered < 0 || ejected < 0 || !conserved()) throw ParameterError("object count not conserved");
}

// ---------------------------------------------------------------- rasterization

namespace {

struct Raster {
  int width, height;
  double resolution;
  std::vector<double>& depth;
  std::vector<int>* label;
  std::vector<double>* label_s;
};

void rasterize(const HarnessBody& b, double radius, Raster& r) {
  const auto nseg = b.polyline.size() - 1;
  std::vector<double> cum(nseg + 1, 0.0);
  for (std::size_t i = 0; i < nseg; ++i) {
    const auto& p = b.polyline[i];
    const auto& q = b.polyline[i + 1];
    cum[i + 1] = cum[i] + std::sqrt((q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y) + (q.z - p.z) * (q.z - p.z));
  }
  for (std::size_t i = 0; i < nseg; ++i) {
    const auto& p = b.polyline[i];
    const auto& q = b.polyline[i + 1];
    const double dx = q.x - p.x, dy = q.y - p.y;
    const double len2 = dx * dx + dy * dy;
    const int u0 = std::max(0, static_cast<int>(std::floor((std::min(p.x, q.x) - radius) / r.resolution)));
    const int u1 = std::min(r.width - 1, static_cast<int>(std::floor((std::max(p.x, q.x) + radius) / r.resolution)));
    const int v0 = std::max(0, static_cast<int>(std::floor((std::min(p.y, q.y) - radius) / r.resolution)));
    const int v1 = std::min(r.height - 1, static_cast<int>(std::floor((std::max(p.y, q.y) + radius) / r.resolution)));
    for (int v = v0; v <= v1; ++v) {
      const double cy = (v + 0.5) * r.resolution;
      for (int u = u0; u <= u1; ++u) {
        const double cx = (u + 0.5) * r.resolution;
        double t = len2 > 0.0 ? ((cx - p.x) * dx + (cy - p.y) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = p.x + t * dx - cx, ey = p.y + t * dy - cy;
        const double d2 = ex * ex + ey * ey;
        if (d2 > radius * radius) continue;
        const double h = p.z + t * (q.z - p.z) + std::sqrt(radius * radius - d2);
        const auto idx = static_cast<std::size_t>(v) * r.width + u;
        if (h > r.depth[idx]) {
          r.depth[idx] = h;
          if (r.label) (*r.label)[idx] = b.id;
          if (r.label_s) (*r.label_s)[idx] = (cum[i] + t * (cum[i + 1] - cum[i])) / cum[nseg];
        }
      }
    }
  }
}

// 2D proper intersection of segments pq and rs.
bool segments_cross(const Point3& p, const Point3& q, const Point3& r, const Point3& s) {
  auto orient = [](const Point3& a, const Point3& b, const Point3& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  };
  const double d1 = orient(p, q, r), d2 = orient(p, q, s);
  const double d3 = orient(r, s, p), d4 = orient(r, s, q);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

struct Box {
  double x0, y0, x1, y1;
  bool overlaps(const Box& o) const { return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1; }
};

Box box_of(const Point3& a, const Point3& b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
}

Box box_of(const HarnessBody& b) {
  Box box{1e300, 1e300, -1e300, -1e300};
  for (const auto& p : b.polyline) {
    box.x0 = std::min(box.x0, p.x);
    box.y0 = std::min(box.y0, p.y);
    box.x1 = std::max(box.x1, p.x);
    box.y1 = std::max(box.y1, p.y);
  }
  return box;
}

constexpr double kMaxSlope = 1.0;  // dz per unit horizontal distance
constexpr double kTurnSigma = 0.3;  // rad per node

// Random walk that stays inside the bin, draped over what is already there.
HarnessBody make_body(BinState& w, const std::vector<double>& hf, int hf_px, double hf_res) {
  const auto& cfg = w.config;
  const auto prof = cfg.profile();
  HarnessBody b;
  b.id = w.next_id++;
  b.length = prof.length;
  b.weight = prof.weight;
  b.connector_a = prof.connector_a;
  b.connector_b = prof.connector_b;

  const double r = cfg.cable_radius;
  const double lo = r, hi = cfg.bin_size - r;
  // the 2D walk is at least as long as the cable; it is cut at the 3D length below
  const int nseg = std::max(1, static_cast<int>(std::ceil(prof.length / cfg.node_spacing)));
  const double step = prof.length / nseg;

  double x = w.rng.uniform(lo, hi);
  double y = w.rng.uniform(lo, hi);
  double heading = w.rng.uniform(0.0, 2.0 * kPi);
  b.polyline.push_back({x, y, 0.0});
  for (int i = 0; i < nseg; ++i) {
    heading += w.rng.normal(0.0, kTurnSigma);
    double dx = std::cos(heading), dy = std::sin(heading);
    if (x + step * dx < lo || x + step * dx > hi) dx = -dx;
    if (y + step * dy < lo || y + step * dy > hi) dy = -dy;
    heading = std::atan2(dy, dx);
    x = std::clamp(x + step * dx, lo, hi);
    y = std::clamp(y + step * dy, lo, hi);
    b.polyline.push_back({x, y, 0.0});
  }

  // rest on the highest surface under the cable cross-section
  const int reach_px = static_cast<int>(std::ceil(r / hf_res));
  for (auto& p : b.polyline) {
    const int cu = static_cast<int>(p.x / hf_res), cv = static_cast<int>(p.y / hf_res);
    double top = 0.0;
    for (int v = std::max(0, cv - reach_px); v <= std::min(hf_px - 1, cv + reach_px); ++v)
      for (int u = std::max(0, cu - reach_px); u <= std::min(hf_px - 1, cu + reach_px); ++u)
        top = std::max(top, hf[static_cast<std::size_t>(v) * hf_px + u]);
    p.z = top + r;
  }
  // limit slope by raising nodes only
  const double dz = kMaxSlope * step;
  for (std::size_t i = 1; i < b.polyline.size(); ++i)
    b.polyline[i].z = std::max(b.polyline[i].z, b.polyline[i - 1].z - dz);
  for (std::size_t i = b.polyline.size() - 1; i-- > 0;)
    b.polyline[i].z = std::max(b.polyline[i].z, b.polyline[i + 1].z - dz);

  // draping added height, so the last segment is shortened to keep the declared length
  double remaining = prof.length;
  for (std::size_t i = 1; i < b.polyline.size(); ++i) {
    auto& q = b.polyline[i];
    const auto& p = b.polyline[i - 1];
    const double seg = std::sqrt((q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y) + (q.z - p.z) * (q.z - p.z));
    if (seg >= remaining) {
      const double t = remaining / seg;
      q = {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y), p.z + t * (q.z - p.z)};
      b.polyline.resize(i + 1);
      break;
    }
    remaining -= seg;
  }
  return b;
}

// Entangles the new body with earlier ones: each 2D crossing entangles independently.
void entangle(BinState& w, const HarnessBody& nb, double p) {
  const Box nbox = box_of(nb);
  for (const auto& other : w.bodies) {
    if (other.id == nb.id) continue;
    if (!nbox.overlaps(box_of(other))) continue;
    int weight = 0;
    for (std::size_t i = 0; i + 1 < nb.polyline.size(); ++i) {
      const Box si = box_of(nb.polyline[i], nb.polyline[i + 1]);
      for (std::size_t j = 0; j + 1 < other.polyline.size(); ++j) {
        if (!si.overlaps(box_of(other.polyline[j], other.polyline[j + 1]))) continue;
        if (!segments_cross(nb.polyline[i], nb.polyline[i + 1], other.polyline[j], other.polyline[j + 1]))
          continue;
        if (w.rng.bernoulli(p)) ++weight;
      }
    }
    if (weight > 0) w.graph.add_crossing(nb.id, other.id, weight);
  }
}

void place_bodies(BinState& w, int count) {
  const int px = w.config.camera_pixels;
  const double res = w.config.camera_resolution();
  std::vector<double> hf(static_cast<std::size_t>(px) * px, 0.0);
  Raster r{px, px, res, hf, nullptr, nullptr};
  for (const auto& b : w.bodies) rasterize(b, w.config.cable_radius, r);
  const double p = w.config.profile().entangle_prob;
  for (int k = 0; k < count; ++k) {
    auto b = make_body(w, hf, px, res);
    w.graph.add_node(b.id);
    w.bodies.push_back(std::move(b));
    entangle(w, w.bodies.back(), p);
    rasterize(w.bodies.back(), w.config.cable_radius, r);
    ++w.placed;
  }
}

}  // namespace

BinState init_world(const WorldConfig& config) {
  config.validate();
  BinState w;
  w.config = config;
  w.rng = Rng(config.rng_seed);
  place_bodies(w, config.n_objects);
  return w;
}

void refill(BinState& world) {
  if (world.held) throw std::logic_error("refill while holding an object");
  const int missing = world.config.n_objects - world.objects_in_bin();
  if (missing > 0) place_bodies(world, missing);
}

void reshuffle(BinState& world) {
  if (world.held) throw std::logic_error("reshuffle while holding an object");
  world.placed -= world.objects_in_bin();
  world.bodies.clear();
  world.graph = EntanglementGraph{};
  place_bodies(world, world.config.n_objects);
}

RenderResult render(const BinState& world, int width, int height, double resolution) {
  RenderResult out;
  out.depth = grasp::DepthMap::zeros(width, height, resolution, world.config.bin_size);
  out.label.assign(out.depth.data.size(), -1);
  out.label_s.assign(out.depth.data.size(), 0.0);
  Raster r{width, height, resolution, out.depth.data, &out.label, &out.label_s};
  for (const auto& b : world.bodies)
    if (!world.held || b.id != *world.held) rasterize(b, world.config.cable_radius, r);
  return out;
}

grasp::DepthMap render_depth(const BinState& world, int width, int height, double resolution) {
  return render(world, width, height, resolution).depth;
}

void grasp_body(BinState& world, int id, double s) {
  if (world.held) throw std::logic_error("gripper already holds an object");
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("grasp parameter outside [0, 1]");
  world.body(id).grasp_point = s;
  world.held = id;
}

bool attempt_grasp(BinState& world, int id, double s) {
  if (!world.contains(id)) throw std::logic_error("no body with id " + std::to_string(id));
  if (decide(world, "grasp_miss", world.config.grasp_miss_prob)) return false;
  grasp_body(world, id, s);
  return true;
}

namespace {

int require_held(const BinState& world, int grasped) {
  if (!world.held || *world.held != grasped)
    throw std::logic_error("object " + std::to_string(grasped) + " is not grasped");
  return grasped;
}

}  // namespace

double lifted_fraction(const WorldConfig& config, double length, double s) {
  const double longest = length * std::max(s, 1.0 - s);
  const double f = std::clamp(config.lift_height / longest, 0.0, 1.0);
  return std::pow(f, config.lifted_fraction_exponent);
}

double lift_ramp(double target, int tick, int n_samples) {
  const double center = 0.3 * n_samples;
  const double width = 0.06 * n_samples;
  return target / (1.0 + std::exp(-(tick - center) / width));
}

double spike_shape(int tick, double center) {
  constexpr double kWidth = 4.0;  // ticks
  const double d = (tick - center) / kWidth;
  return std::exp(-0.5 * d * d);
}

double component_weight(const BinState& world, int id) {
  double w = 0.0;
  for (int m : world.graph.component(id)) w += world.body(m).weight;
  return w;
}

ForceTrace synth_lift_trace(BinState& world, int grasped) {
  require_held(world, grasped);
  const auto& cfg = world.config;
  const auto& b = world.body(grasped);
  const double target = b.weight * lifted_fraction(cfg, b.length, *b.grasp_point);
  const int n = cfg.lift_samples;
  const int c = world.graph.component_crossing_weight(grasped);

  double amp = 0.0, center = 0.0;
  if (c > 0 && decide(world, "lift_spike", 1.0 - std::exp(-cfg.spike_rate * c))) {
    amp = cfg.lift_tension_gain * component_weight(world, grasped) * c * world.rng.uniform(0.6, 1.4);
    center = world.rng.uniform(0.4 * n, 0.8 * n);
  }
  ForceTrace tr;
  tr.phase = Phase::Lift;
  tr.samples.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const double f = lift_ramp(target, t, n) + amp * spike_shape(t, center) + noise(world);
    tr.samples.push_back({t, f, std::nullopt});
  }
  return tr;
}

double break_probability(const WorldConfig& config, const SwingParams& params, int crossing_weight) {
  if (crossing_weight < 1) throw ParameterError("crossing weight must be >= 1");
  return std::clamp(config.swing_break_gain * params.angle_sum() * params.omega / crossing_weight, 0.0, 1.0);
}

double slip_probability(const WorldConfig& config, const SwingParams& params) {
  return std::clamp(config.slip_gain * params.omega * params.omega * params.angle_sum(), 0.0, 1.0);
}

double eject_probability(const WorldConfig& config, double p_break, int degree) {
  if (degree < 1) return 0.0;
  return std::clamp(config.eject_gain * p_break / degree, 0.0, 1.0);
}

SwingOutcome apply_swing(BinState& world, int grasped, const SwingParams& params) {
  require_held(world, grasped);
  SwingOutcome out;
  for (int rep = 0; rep < params.n; ++rep) {
    // partners as seen at the start of this repetition
    struct Partner { int id; double p_break; int degree; };
    std::vector<Partner> partners;
    std::vector<std::pair<int, int>> to_break;
    for (auto idx : world.graph.incident(grasped)) {
      const auto& e = world.graph.edges[idx];
      const int other = e.a == grasped ? e.b : e.a;
      const double pb = break_probability(world.config, params, e.weight);
      partners.push_back({other, pb, world.graph.degree(other)});
      if (decide(world, "swing_break", pb)) to_break.emplace_back(e.a, e.b);
    }
    for (const auto& [a, b] : to_break)
      std::erase_if(world.graph.edges, [&](const Edge& e) { return e.a == a && e.b == b; });
    out.edges_broken += static_cast<int>(to_break.size());

    const bool slipped = decide(world, "slip", slip_probability(world.config, params));

    for (const auto& p : partners) {
      if (!world.contains(p.id)) continue;
      if (decide(world, "eject", eject_probability(world.config, p.p_break, p.degree))) {
        world.graph.remove_node(p.id);
        std::erase_if(world.bodies, [&](const HarnessBody& b) { return b.id == p.id; });
        ++world.ejected;
        out.ejected_ids.push_back(p.id);
      }
    }
    if (slipped) {
      out.slipped = true;
      drop_into_bin(world);
      break;
    }
  }
  return out;
}

double side_torque(double linear_density, double side_length, double end_weight, double reach) {
  const double e = std::min(side_length, reach);
  return linear_density * e * e / 2.0 + linear_density * (side_length - e) * e + end_weight * e;
}

std::pair<double, double> wrist_torques(const HarnessBody& body, double s, double reach) {
  const double lambda = body.cable_weight() / body.length;
  return {side_torque(lambda, s * body.length, body.connector_a, reach),
          side_torque(lambda, (1.0 - s) * body.length, body.connector_b, reach)};
}

RegraspPhysics apply_regrasp_physics(BinState& world, int grasped) {
  require_held(world, grasped);
  RegraspPhysics out;
  auto& b = world.body(grasped);
  std::tie(out.torque_a, out.torque_b) = wrist_torques(b, *b.grasp_point, world.config.reach);
  out.hang_angle = draw_normal(world, "hang_angle", world.config.profile().hang_sigma);
  out.handoff_ok = std::abs(out.hang_angle) <= world.config.regrasp_vertical_tolerance;
  if (!out.handoff_ok) {
    drop_into_bin(world);
    return out;
  }
  b.grasp_point = 0.5;
  out.new_s = 0.5;
  if (decide(world, "pull_free", world.config.p_pull)) out.edges_removed = world.graph.remove_edges_of(grasped);
  return out;
}

ForceTrace synth_transport_trace(BinState& world, int grasped) {
  require_held(world, grasped);
  const auto& cfg = world.config;
  double carried = world.body(grasped).weight;
  for (int m : world.graph.component(grasped)) {
    if (m == grasped) continue;
    carried += world.body(m).weight * draw_uniform(world, "dangle", cfg.dangle_min, 1.0);
  }
  const int n = cfg.transport_samples;
  const int c = world.graph.component_crossing_weight(grasped);
  double amp = 0.0, center = 0.0;
  if (c > 0 && decide(world, "transport_spike", 1.0 - std::exp(-cfg.spike_rate * c))) {
    amp = cfg.transport_tension_gain * component_weight(world, grasped) * c * world.rng.uniform(0.6, 1.4);
    center = world.rng.uniform(0.3 * n, 0.7 * n);
  }
  ForceTrace tr;
  tr.phase = Phase::Transport;
  tr.samples.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t)
    tr.samples.push_back({t, carried + amp * spike_shape(t, center) + noise(world), std::nullopt});
  return tr;
}

int deliver(BinState& world, int grasped) {
  require_held(world, grasped);
  const auto comp = world.graph.component(grasped);
  for (int m : comp) {
    world.graph.remove_node(m);
    std::erase_if(world.bodies, [m](const HarnessBody& b) { return b.id == m; });
  }
  world.held.reset();
  world.delivered += static_cast<int>(comp.size());
  return static_cast<int>(comp.size());
}

void drop_into_bin(BinState& world) {
  if (!world.held) return;
  world.body(*world.held).grasp_point.reset();
  world.held.reset();
}

}  // namespace wirepick::sim
