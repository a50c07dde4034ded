#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

// Sort each truncated window and take its lower middle element.
inline std::vector<double> median(const std::vector<double>& x, int window) {
  const int n = static_cast<int>(x.size());
  const int half = window / 2;
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    std::vector<double> w;
    for (int j = i - half; j <= i + half; ++j)
      if (j >= 0 && j < n) w.push_back(x[static_cast<std::size_t>(j)]);
    std::sort(w.begin(), w.end());
    out.push_back(w[(w.size() - 1) / 2]);
  }
  return out;
}

inline std::vector<double> finite_difference(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) g[i] = x[1] - x[0];
    else if (i == n - 1) g[i] = x[n - 1] - x[n - 2];
    else g[i] = 0.5 * (x[i + 1] - x[i - 1]);
  }
  return g;
}

inline std::optional<std::size_t> first_at_or_above(const std::vector<double>& x, double level) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= level) return i;
  return std::nullopt;
}

}  // namespace oracle
