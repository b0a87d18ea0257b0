#include "cdeforest/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cdeforest/errors.hpp"

namespace cdeforest {

EvalGrid::EvalGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw DomainError("grid needs at least one dimension");
  for (const auto& axis : axes_) {
    if (axis.size() < 2) throw DomainError("grid axis needs at least 2 points");
    for (std::size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) throw DomainError("grid axis must be strictly increasing");
    }
  }
}

EvalGrid EvalGrid::uniform(std::span<const double> lo, std::span<const double> hi,
                           std::size_t points) {
  if (lo.size() != hi.size()) throw DomainError("grid bounds differ in dimension");
  if (points < 2) throw DomainError("grid axis needs at least 2 points");
  std::vector<std::vector<double>> axes;
  for (std::size_t d = 0; d < lo.size(); ++d) {
    std::vector<double> axis(points);
    const double step = (hi[d] - lo[d]) / static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) axis[k] = lo[d] + step * static_cast<double>(k);
    axis.back() = hi[d];
    axes.push_back(std::move(axis));
  }
  return EvalGrid(std::move(axes));
}

std::size_t EvalGrid::size() const {
  std::size_t total = axes_.empty() ? 0 : 1;
  for (const auto& axis : axes_) total *= axis.size();
  return total;
}

std::vector<double> EvalGrid::point(std::size_t g) const {
  std::vector<double> out(dims());
  for (std::size_t d = dims(); d-- > 0;) {
    out[d] = axes_[d][g % axes_[d].size()];
    g /= axes_[d].size();
  }
  return out;
}

double gaussian_kernel(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

// Kernel values of one sample along one axis, restricted to the window of
// grid points within the cutoff.
struct AxisWindow {
  std::size_t begin = 0;
  std::vector<double> values;
};

void axis_window(const std::vector<double>& axis, double y, double h, AxisWindow& out) {
  const double reach = kKernelCutoff * h;
  auto lo = std::lower_bound(axis.begin(), axis.end(), y - reach);
  auto hi = std::upper_bound(lo, axis.end(), y + reach);
  out.begin = static_cast<std::size_t>(lo - axis.begin());
  out.values.resize(static_cast<std::size_t>(hi - lo));
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    out.values[k] = gaussian_kernel((y - axis[out.begin + k]) / h) / h;
  }
}

}  // namespace

DensityEstimate weighted_kde(std::span<const double> weights, const Matrix& responses,
                             const EvalGrid& grid, std::span<const double> bandwidth) {
  const std::size_t dims = responses.cols();
  if (weights.size() != responses.rows()) throw DomainError("weights and responses differ in length");
  if (grid.dims() != dims) throw DomainError("grid dimension does not match responses");
  if (bandwidth.size() != dims) throw DomainError("need one bandwidth per response dimension");
  for (double h : bandwidth) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("bandwidth must be positive");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("weights sum to zero");

  DensityEstimate out{grid, std::vector<double>(grid.size(), 0.0),
                      std::vector<double>(bandwidth.begin(), bandwidth.end())};
  std::vector<std::size_t> extent(dims);
  for (std::size_t d = 0; d < dims; ++d) extent[d] = grid.axis(d).size();

  std::vector<AxisWindow> windows(dims);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const double w = weights[i] / total;
    bool empty = false;
    for (std::size_t d = 0; d < dims; ++d) {
      axis_window(grid.axis(d), responses(i, d), bandwidth[d], windows[d]);
      empty = empty || windows[d].values.empty();
    }
    if (empty) continue;

    if (dims == 1) {
      const auto& a = windows[0];
      for (std::size_t k = 0; k < a.values.size(); ++k) out.values[a.begin + k] += w * a.values[k];
    } else if (dims == 2) {
      const auto& a = windows[0];
      const auto& b = windows[1];
      for (std::size_t k = 0; k < a.values.size(); ++k) {
        const double wa = w * a.values[k];
        double* row = out.values.data() + (a.begin + k) * extent[1] + b.begin;
        for (std::size_t l = 0; l < b.values.size(); ++l) row[l] += wa * b.values[l];
      }
    } else {
      const auto& a = windows[0];
      const auto& b = windows[1];
      const auto& c = windows[2];
      for (std::size_t k = 0; k < a.values.size(); ++k) {
        for (std::size_t l = 0; l < b.values.size(); ++l) {
          const double wab = w * a.values[k] * b.values[l];
          double* row = out.values.data() +
                        ((a.begin + k) * extent[1] + b.begin + l) * extent[2] + c.begin;
          for (std::size_t m = 0; m < c.values.size(); ++m) row[m] += wab * c.values[m];
        }
      }
    }
  }
  return out;
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0;
  double s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double plugin_bandwidth(std::span<const double> weights, std::span<const double> responses) {
  if (weights.size() != responses.size()) throw DomainError("weights and responses differ in length");
  const double n_eff = effective_sample_size(weights);
  if (!(n_eff >= 2.0 - 1e-9)) {
    throw DomainError("plug-in bandwidth needs effective sample size >= 2, got " +
                      std::to_string(n_eff));
  }
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    mean += weights[i] * responses[i];
  }
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double d = responses[i] - mean;
    var += weights[i] * d * d;
  }
  var /= total;
  double spread = std::sqrt(var);
  if (!(spread > 0.0)) {
    auto [lo, hi] = std::minmax_element(responses.begin(), responses.end());
    spread = (*hi - *lo) / 4.0;
    if (!(spread > 0.0)) throw DomainError("plug-in bandwidth of a zero-range sample");
  }
  return 1.06 * spread * std::pow(n_eff, -0.2);
}

EvalGrid default_grid(const Forest& forest, std::span<const double> bandwidth,
                      std::size_t points) {
  const std::size_t dims = forest.response_dims();
  if (bandwidth.size() != dims) throw DomainError("need one bandwidth per response dimension");
  if (points == 0) points = dims >= 3 ? 101 : 1000;
  std::vector<double> lo(dims);
  std::vector<double> hi(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    lo[d] = forest.scaler().mins()[d] - 4.0 * bandwidth[d];
    hi[d] = forest.scaler().maxs()[d] + 4.0 * bandwidth[d];
  }
  return EvalGrid::uniform(lo, hi, points);
}

std::vector<double> resolve_bandwidth(const Forest& forest, const WeightVector& weights,
                                      const BandwidthPolicy& policy) {
  policy.validate();
  const std::size_t dims = forest.response_dims();
  std::vector<double> h(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    if (policy.kind == BandwidthPolicy::Kind::fixed) {
      h[d] = policy.value_for(d);
    } else {
      h[d] = plugin_bandwidth(weights.weights, forest.training_responses().column(d));
    }
  }
  return h;
}

DensityEstimate predict(const Forest& forest, const CovariateRow& x,
                        const std::optional<EvalGrid>& grid, const BandwidthPolicy& policy,
                        std::size_t grid_points) {
  WeightVector weights = query_weights(forest, x);
  std::vector<double> h = resolve_bandwidth(forest, weights, policy);
  if (grid) return weighted_kde(weights.weights, forest.training_responses(), *grid, h);
  return weighted_kde(weights.weights, forest.training_responses(),
                      default_grid(forest, h, grid_points), h);
}

}  // namespace cdeforest
