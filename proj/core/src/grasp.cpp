#include "wirepick/grasp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "wirepick/errors.hpp"

namespace wirepick::grasp {

DepthMap DepthMap::zeros(int width, int height, double resolution, double bin_depth) {
  DepthMap m;
  m.width = width;
  m.height = height;
  m.resolution = resolution;
  m.bin_depth = bin_depth;
  m.data.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(std::max(height, 0)), 0.0);
  return m;
}

void DepthMap::validate() const {
  if (width <= 0 || height <= 0) throw ParameterError("depth map has no pixels");
  if (data.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ParameterError("depth map data size mismatch");
  if (!(resolution > 0.0)) throw ParameterError("depth map resolution must be positive");
  for (double h : data)
    if (!(h >= 0.0) || h > bin_depth) throw ParameterError("depth value outside [0, bin_depth]");
}

int Mask::count() const {
  return static_cast<int>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

void GripperTemplate::validate() const {
  auto check_mask = [](const Mask& m) {
    if (m.width <= 0 || m.height <= 0 || m.width % 2 == 0 || m.height % 2 == 0)
      throw ParameterError("template masks need odd, positive dimensions");
    if (m.bits.size() != static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height))
      throw ParameterError("template mask size mismatch");
  };
  check_mask(contact);
  check_mask(collision);
  if (contact.width != collision.width || contact.height != collision.height)
    throw ParameterError("contact and collision masks differ in size");
  if (contact.count() == 0) throw ParameterError("contact mask is empty");
  for (std::size_t i = 0; i < contact.bits.size(); ++i)
    if (contact.bits[i] && collision.bits[i]) throw ParameterError("contact and collision masks overlap");
  if (!(open_width > 0.0)) throw ParameterError("open_width must be positive");
  if (!(finger_depth >= 0.0)) throw ParameterError("finger_depth must be >= 0");
}

GripperTemplate make_parallel_jaw_template(double resolution, double open_width,
                                           double finger_thickness, double finger_width) {
  if (!(resolution > 0.0)) throw ParameterError("template resolution must be positive");
  const int half_open = std::max(1, static_cast<int>(std::lround(open_width / resolution)) / 2);
  const int thick = std::max(1, static_cast<int>(std::lround(finger_thickness / resolution)));
  const int half_width = std::max(0, static_cast<int>(std::lround(finger_width / resolution)) / 2);
  const int half = half_open + thick;
  const int side = 2 * half + 1;

  GripperTemplate t;
  t.open_width = open_width;
  t.contact = {side, side, std::vector<std::uint8_t>(static_cast<std::size_t>(side * side), 0)};
  t.collision = t.contact;
  for (int y = -half_width; y <= half_width; ++y) {
    for (int x = -half; x <= half; ++x) {
      const auto idx = static_cast<std::size_t>((y + half) * side + (x + half));
      if (std::abs(x) <= half_open) t.contact.bits[idx] = 1;
      else t.collision.bits[idx] = 1;
    }
  }
  return t;
}

namespace {

double max_offset_norm(const GripperTemplate& t) {
  const int cx = t.contact.width / 2, cy = t.contact.height / 2;
  double best = 0.0;
  for (int y = 0; y < t.contact.height; ++y)
    for (int x = 0; x < t.contact.width; ++x)
      if (t.contact.at(x, y) || t.collision.at(x, y))
        best = std::max(best, std::hypot(double(x - cx), double(y - cy)));
  return best;
}

}  // namespace

int template_margin(const GripperTemplate& tmpl) {
  return static_cast<int>(std::ceil(max_offset_norm(tmpl))) + 1;
}

RotatedTemplate rotate_template(const GripperTemplate& tmpl, double angle) {
  const int reach = template_margin(tmpl);
  const int cx = tmpl.contact.width / 2, cy = tmpl.contact.height / 2;
  const double c = std::cos(angle), s = std::sin(angle);
  RotatedTemplate out;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      // inverse rotation back into the unrotated mask
      const auto sx = static_cast<int>(std::lround(c * dx + s * dy)) + cx;
      const auto sy = static_cast<int>(std::lround(-s * dx + c * dy)) + cy;
      if (sx < 0 || sy < 0 || sx >= tmpl.contact.width || sy >= tmpl.contact.height) continue;
      if (tmpl.contact.at(sx, sy)) out.contact.push_back({dx, dy});
      else if (tmpl.collision.at(sx, sy)) out.collision.push_back({dx, dy});
    }
  }
  return out;
}

std::vector<double> slice_levels(double height_range, int n_heights) {
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(n_heights));
  for (int k = 0; k < n_heights; ++k)
    levels.push_back(height_range * static_cast<double>(n_heights - k) / static_cast<double>(n_heights + 1));
  return levels;
}

double rotation_angle(int index, int n_rotations) {
  return std::numbers::pi * static_cast<double>(index) / static_cast<double>(n_rotations);
}

bool ranks_before(const GraspCandidate& a, const GraspCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.grasp_height != b.grasp_height) return a.grasp_height > b.grasp_height;
  if (a.u != b.u) return a.u < b.u;
  if (a.v != b.v) return a.v < b.v;
  return a.rotation_index < b.rotation_index;
}

namespace {

// out(p) = sum over offsets of img(p + o), zero outside the image.
void accumulate_offsets(const std::vector<std::uint8_t>& img, int w, int h,
                        const std::vector<Offset>& offsets, std::vector<std::int32_t>& out) {
  std::fill(out.begin(), out.end(), 0);
  for (const auto& o : offsets) {
    const int v0 = std::max(0, -o.dy), v1 = std::min(h, h - o.dy);
    const int u0 = std::max(0, -o.dx), u1 = std::min(w, w - o.dx);
    for (int v = v0; v < v1; ++v) {
      const std::uint8_t* src = img.data() + static_cast<std::ptrdiff_t>(v + o.dy) * w + o.dx;
      std::int32_t* dst = out.data() + static_cast<std::ptrdiff_t>(v) * w;
      for (int u = u0; u < u1; ++u) dst[u] += src[u];
    }
  }
}

// 5-tap binomial kernel (1 4 6 4 1), variance 1 px^2; integer so results are exact.
constexpr std::array<std::int32_t, 5> kBinomial{1, 4, 6, 4, 1};
constexpr std::int32_t kBinomialNorm = 256;

void binomial_smooth(const std::vector<std::int32_t>& in, int w, int h,
                     std::vector<std::int32_t>& tmp, std::vector<std::int32_t>& out) {
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      std::int32_t acc = 0;
      for (int i = -2; i <= 2; ++i) {
        const int uu = u + i;
        if (uu >= 0 && uu < w) acc += kBinomial[static_cast<std::size_t>(i + 2)] * in[static_cast<std::size_t>(v * w + uu)];
      }
      tmp[static_cast<std::size_t>(v * w + u)] = acc;
    }
  }
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      std::int32_t acc = 0;
      for (int j = -2; j <= 2; ++j) {
        const int vv = v + j;
        if (vv >= 0 && vv < h) acc += kBinomial[static_cast<std::size_t>(j + 2)] * tmp[static_cast<std::size_t>(vv * w + u)];
      }
      out[static_cast<std::size_t>(v * w + u)] = acc;
    }
  }
}

}  // namespace

std::vector<GraspCandidate> detect_grasps(const DepthMap& depth, const GripperTemplate& tmpl,
                                          const DetectOptions& options) {
  depth.validate();
  tmpl.validate();
  if (depth.width < tmpl.contact.width || depth.height < tmpl.contact.height)
    throw ParameterError("depth map smaller than gripper template");
  if (options.n_rotations < 1 || options.n_heights < 1 || options.top_k < 1 || options.nms_radius < 0)
    throw ParameterError("detect_grasps: n_rotations, n_heights and top_k must be >= 1");

  const int w = depth.width, h = depth.height;
  const auto [mn, mx] = std::minmax_element(depth.data.begin(), depth.data.end());
  const double floor_h = *mn;
  const double range = *mx - floor_h;
  if (!(range > 0.0)) return {};
  const int margin = template_margin(tmpl);
  if (w <= 2 * margin || h <= 2 * margin) return {};

  const auto npx = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<double> rel(npx);
  for (std::size_t i = 0; i < npx; ++i) rel[i] = depth.data[i] - floor_h;

  std::vector<RotatedTemplate> rotated;
  for (int r = 0; r < options.n_rotations; ++r)
    rotated.push_back(rotate_template(tmpl, rotation_angle(r, options.n_rotations)));

  const auto levels = slice_levels(range, options.n_heights);
  std::vector<std::uint8_t> object(npx), blocked(npx);
  std::vector<std::int32_t> contact(npx), collision(npx), tmp(npx), smooth(npx);
  std::vector<double> score(npx);
  std::vector<GraspCandidate> all;

  for (int k = 0; k < options.n_heights; ++k) {
    const double level = levels[static_cast<std::size_t>(k)];
    const double finger_level = std::max(level - tmpl.finger_depth, 0.0);
    for (std::size_t i = 0; i < npx; ++i) {
      object[i] = rel[i] >= level;
      blocked[i] = rel[i] > finger_level;
    }
    for (int r = 0; r < options.n_rotations; ++r) {
      const auto& rt = rotated[static_cast<std::size_t>(r)];
      if (rt.contact.empty()) continue;
      accumulate_offsets(object, w, h, rt.contact, contact);
      accumulate_offsets(blocked, w, h, rt.collision, collision);
      binomial_smooth(contact, w, h, tmp, smooth);
      const double norm = static_cast<double>(kBinomialNorm) * static_cast<double>(rt.contact.size());

      std::fill(score.begin(), score.end(), 0.0);
      for (int v = margin; v < h - margin; ++v) {
        for (int u = margin; u < w - margin; ++u) {
          const auto i = static_cast<std::size_t>(v * w + u);
          if (!object[i] || collision[i] != 0 || smooth[i] <= 0) continue;
          score[i] = static_cast<double>(smooth[i]) / norm;
        }
      }
      for (int v = margin; v < h - margin; ++v) {
        for (int u = margin; u < w - margin; ++u) {
          const double s = score[static_cast<std::size_t>(v * w + u)];
          if (s <= 0.0) continue;
          bool peak = true;
          for (int dv = -1; dv <= 1 && peak; ++dv)
            for (int du = -1; du <= 1; ++du)
              if ((du || dv) && score[static_cast<std::size_t>((v + dv) * w + u + du)] > s) {
                peak = false;
                break;
              }
          if (!peak) continue;
          GraspCandidate c;
          c.u = u;
          c.v = v;
          c.rotation_index = r;
          c.slice_index = k;
          c.rotation = rotation_angle(r, options.n_rotations);
          c.grasp_height = floor_h + level;
          c.score = s;
          all.push_back(c);
        }
      }
    }
  }

  std::sort(all.begin(), all.end(), ranks_before);
  std::vector<GraspCandidate> out;
  const int r2 = options.nms_radius * options.nms_radius;
  for (const auto& c : all) {
    if (static_cast<int>(out.size()) >= options.top_k) break;
    const bool suppressed = std::any_of(out.begin(), out.end(), [&](const GraspCandidate& o) {
      const int du = o.u - c.u, dv = o.v - c.v;
      return du * du + dv * dv <= r2;
    });
    if (!suppressed) out.push_back(c);
  }
  return out;
}

double ridge_mid_bias(const DepthMap& depth, int u, int v, double level, const RidgeOptions& options) {
  if (!depth.contains(u, v) || depth.at(u, v) < level) return 0.0;
  const double band = options.height_band;
  // same surface: above the slice level and close in height to a reference pixel
  auto on_ridge = [&](int x, int y, double ref) {
    return depth.contains(x, y) && depth.at(x, y) >= level && std::abs(depth.at(x, y) - ref) <= band;
  };
  // climb onto the crest; candidate centres often sit on a cable flank
  for (int step = 0; step < 3; ++step) {
    int bu = u, bv = v;
    for (int oy = -1; oy <= 1; ++oy)
      for (int ox = -1; ox <= 1; ++ox)
        if (on_ridge(u + ox, v + oy, depth.at(u, v)) && depth.at(u + ox, v + oy) > depth.at(bu, bv)) {
          bu = u + ox; bv = v + oy;
        }
    if (bu == u && bv == v) break;
    u = bu; v = bv;
  }
  const double h0 = depth.at(u, v);

  // local principal direction over the surface patch connected to (u, v)
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  int count = 0;
  const int r = options.pca_radius;
  std::set<std::pair<int, int>> patch{{u, v}};
  std::vector<std::pair<int, int>> frontier{{u, v}};
  while (!frontier.empty()) {
    const auto [x, y] = frontier.back();
    frontier.pop_back();
    const int dx = x - u, dy = y - v;
    sx += dx; sy += dy;
    sxx += dx * dx; syy += dy * dy; sxy += dx * dy;
    ++count;
    for (const auto& [ox, oy] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
      const int nx = x + ox, ny = y + oy;
      if ((nx - u) * (nx - u) + (ny - v) * (ny - v) > r * r) continue;
      if (!on_ridge(nx, ny, depth.at(x, y)) || !patch.emplace(nx, ny).second) continue;
      frontier.emplace_back(nx, ny);
    }
  }
  if (count < 3) return 0.0;
  const double mx = sx / count, my = sy / count;
  const double cxx = sxx / count - mx * mx, cyy = syy / count - my * my, cxy = sxy / count - mx * my;
  const double tr = cxx + cyy, det = cxx * cyy - cxy * cxy;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  const double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
  if (!(l1 > 0.0) || l1 < options.min_elongation * std::max(l2, 0.0)) return 0.0;
  double ex = (std::abs(cxy) > 1e-12) ? l1 - cyy : 1.0;
  double ey = (std::abs(cxy) > 1e-12) ? cxy : 0.0;
  if (std::abs(cxy) <= 1e-12 && cyy > cxx) { ex = 0.0; ey = 1.0; }
  const double en = std::hypot(ex, ey);
  ex /= en; ey /= en;

  // Follow the crest from (u, v), bending up to 45 degrees per step. The walk ends
  // where the surface drops away (a visible object end), or where something higher
  // covers the crest or the image ends (occlusion, the object may continue).
  struct Walk {
    int steps = 0;
    bool visible_end = false;
  };
  static constexpr std::array<double, 3> kTurns{0.0, std::numbers::pi / 4, -std::numbers::pi / 4};
  auto walk = [&](double dx, double dy) {
    std::set<std::pair<int, int>> seen{{u, v}};
    int px = u, py = v;
    double h = h0;
    Walk w;
    const int max_steps = 4 * std::max(depth.width, depth.height);
    while (w.steps < max_steps) {
      bool moved = false, covered = false, off_map = false;
      double best_h = -1.0;
      int bx = 0, by = 0;
      for (double turn : kTurns) {
        // nearest 8-neighbour in the turned direction
        const double tdx = dx * std::cos(turn) - dy * std::sin(turn);
        const double tdy = dx * std::sin(turn) + dy * std::cos(turn);
        const double m = std::max(std::abs(tdx), std::abs(tdy));
        const int ix = px + static_cast<int>(std::lround(tdx / m));
        const int iy = py + static_cast<int>(std::lround(tdy / m));
        if (!depth.contains(ix, iy)) {
          off_map = true;
          continue;
        }
        if (turn == 0.0 && depth.at(ix, iy) > h + band) covered = true;
        if (!on_ridge(ix, iy, h) || seen.count({ix, iy})) continue;
        if (depth.at(ix, iy) > best_h) {
          best_h = depth.at(ix, iy);
          bx = ix; by = iy;
          moved = true;
        }
      }
      if (!moved) {
        w.visible_end = !covered && !off_map;
        break;
      }
      // keep the heading close to the local ridge direction
      const double sx_ = bx - px, sy_ = by - py;
      const double sn = std::hypot(sx_, sy_);
      dx = 0.5 * dx + 0.5 * sx_ / sn;
      dy = 0.5 * dy + 0.5 * sy_ / sn;
      const double n = std::hypot(dx, dy);
      dx /= n; dy /= n;
      px = bx; py = by;
      h = best_h;
      seen.emplace(px, py);
      ++w.steps;
    }
    return w;
  };

  const Walk fwd = walk(ex, ey);
  const Walk bwd = walk(-ex, -ey);
  const int total = fwd.steps + bwd.steps;
  if (total < options.min_ridge_length) return 0.0;
  if (fwd.visible_end && bwd.visible_end)
    return 2.0 * static_cast<double>(std::min(fwd.steps, bwd.steps)) / static_cast<double>(total);
  if (fwd.visible_end || bwd.visible_end) {
    const int d = fwd.visible_end ? fwd.steps : bwd.steps;
    return std::min(1.0, static_cast<double>(d) / options.end_scale);
  }
  return 1.0;
}

std::vector<GraspCandidate> rank_with_mid_bias(std::vector<GraspCandidate> candidates,
                                               const DepthMap& depth, double alpha,
                                               const RidgeOptions& options) {
  if (candidates.empty()) return candidates;
  const auto [mn, mx] = std::minmax_element(depth.data.begin(), depth.data.end());
  const double range = *mx - *mn;

  std::vector<std::pair<double, GraspCandidate>> keyed;
  keyed.reserve(candidates.size());
  for (auto& c : candidates) {
    c.mid_bias = ridge_mid_bias(depth, c.u, c.v, c.grasp_height, options);
    const double norm_h = range > 0.0 ? std::clamp((c.grasp_height - *mn) / range, 0.0, 1.0) : 0.0;
    keyed.emplace_back((1.0 - alpha) * c.score + alpha * (c.mid_bias * norm_h), c);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<GraspCandidate> out;
  out.reserve(keyed.size());
  for (auto& [key, c] : keyed) out.push_back(c);
  return out;
}

}  // namespace wirepick::grasp
