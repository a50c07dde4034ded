#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "wirepick/grasp.hpp"

namespace synthetic {

using wirepick::grasp::DepthMap;

// Flat-topped straight cable from (u0, v0) to (u1, v1), `half_width` px either side.
inline void draw_cable(DepthMap& d, double u0, double v0, double u1, double v1, double half_width,
                       double height) {
  const double du = u1 - u0, dv = v1 - v0;
  const double len2 = du * du + dv * dv;
  for (int v = 0; v < d.height; ++v)
    for (int u = 0; u < d.width; ++u) {
      double t = len2 > 0 ? ((u - u0) * du + (v - v0) * dv) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double dist = std::hypot(u - (u0 + t * du), v - (v0 + t * dv));
      if (dist <= half_width) d.at(u, v) = std::max(d.at(u, v), height);
    }
}

// A few random cables at random heights; some maps are left nearly empty.
inline DepthMap random_map(std::mt19937_64& rng, int size = 64, double resolution = 0.005) {
  std::uniform_real_distribution<double> pos(0.0, size - 1.0);
  std::uniform_real_distribution<double> height(0.006, 0.04);
  std::uniform_real_distribution<double> half(0.6, 2.2);
  auto d = DepthMap::zeros(size, size, resolution, 0.5);
  const int cables = 1 + static_cast<int>(rng() % 7);
  for (int k = 0; k < cables; ++k) {
    const double u0 = pos(rng), v0 = pos(rng), u1 = pos(rng), v1 = pos(rng);
    draw_cable(d, u0, v0, u1, v1, half(rng), height(rng));
  }
  return d;
}

}  // namespace synthetic
