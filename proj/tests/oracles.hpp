#pragma once

// Reference computations kept independent of the library's fast paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "cdeforest/matrix.hpp"

namespace oracle {

struct Cut {
  double threshold = 0.0;
  double score = 0.0;
};

// Sum over both children of sum_j S_j^2 / n, recomputing every child sum
// from scratch for each candidate boundary.
inline std::optional<Cut> brute_force_best_cut(const std::vector<double>& x,
                                               const cdeforest::Matrix& stats,
                                               std::size_t min_node_size) {
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::optional<Cut> best;
  for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
    const double lo = distinct[k];
    const double hi = distinct[k + 1];
    std::vector<double> left(stats.cols(), 0.0);
    std::vector<double> right(stats.cols(), 0.0);
    std::size_t n_left = 0;
    std::size_t n_right = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto& side = x[i] <= lo ? left : right;
      (x[i] <= lo ? n_left : n_right)++;
      for (std::size_t j = 0; j < stats.cols(); ++j) side[j] += stats(i, j);
    }
    if (n_left < min_node_size || n_right < min_node_size) continue;
    double score = 0.0;
    for (double s : left) score += s * s / static_cast<double>(n_left);
    for (double s : right) score += s * s / static_cast<double>(n_right);
    if (!best || score > best->score) best = Cut{(lo + hi) / 2.0, score};
  }
  return best;
}

inline double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * 3.14159265358979323846));
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

// Simpson's rule on [a, b] with an even number of panels.
template <typename F>
double simpson(F&& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * k);
  return s * h / 3.0;
}

// Weighted Pearson correlation of the two coordinates of a 2-D grid density.
inline double grid_correlation(const std::vector<double>& ax, const std::vector<double>& ay,
                               const std::vector<double>& values) {
  double total = 0, mx = 0, my = 0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    for (std::size_t j = 0; j < ay.size(); ++j) {
      const double w = values[i * ay.size() + j];
      total += w;
      mx += w * ax[i];
      my += w * ay[j];
    }
  }
  mx /= total;
  my /= total;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    for (std::size_t j = 0; j < ay.size(); ++j) {
      const double w = values[i * ay.size() + j];
      sxx += w * (ax[i] - mx) * (ax[i] - mx);
      syy += w * (ay[j] - my) * (ay[j] - my);
      sxy += w * (ax[i] - mx) * (ay[j] - my);
    }
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
