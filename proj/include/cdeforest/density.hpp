#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cdeforest/forest.hpp"
#include "cdeforest/matrix.hpp"

namespace cdeforest {

/// Cartesian evaluation grid in the original response scale. Grid values are
/// stored row-major over the axes (the last axis varies fastest).
class EvalGrid {
 public:
  EvalGrid() = default;
  /// Throws DomainError unless every axis is strictly increasing with at
  /// least two points.
  explicit EvalGrid(std::vector<std::vector<double>> axes);

  /// `points` equally spaced values on [lo, hi] per dimension.
  static EvalGrid uniform(std::span<const double> lo, std::span<const double> hi,
                          std::size_t points);

  std::size_t dims() const { return axes_.size(); }
  std::size_t size() const;
  const std::vector<double>& axis(std::size_t d) const { return axes_[d]; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }

  /// Coordinates of flat grid index g.
  std::vector<double> point(std::size_t g) const;

 private:
  std::vector<std::vector<double>> axes_;
};

struct DensityEstimate {
  EvalGrid grid;
  std::vector<double> values;
  std::vector<double> bandwidth_used;
};

/// Standard normal density.
double gaussian_kernel(double z);

/// Kernel contributions beyond this many bandwidths are below 1e-21 of the
/// peak and skipped.
inline constexpr double kKernelCutoff = 10.0;

/// p(g) = sum_i w_i prod_d K_h(Y_id - g_d) / sum_i w_i with a Gaussian
/// product kernel. Throws DomainError for non-positive bandwidths or
/// mismatched shapes.
DensityEstimate weighted_kde(std::span<const double> weights, const Matrix& responses,
                             const EvalGrid& grid, std::span<const double> bandwidth);

/// Effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

/// Weighted normal-reference rule h = 1.06 sigma_w n_eff^(-1/5). When the
/// weighted spread is zero, the unweighted range of `responses` over 4
/// replaces sigma_w. Throws DomainError when n_eff < 2 or the range is zero.
double plugin_bandwidth(std::span<const double> weights, std::span<const double> responses);

/// Default grid: training response range +/- 4h per dimension with 1,000
/// points (101 for three response dimensions), unless `points` overrides it.
EvalGrid default_grid(const Forest& forest, std::span<const double> bandwidth,
                      std::size_t points = 0);

/// Bandwidths for one query's weights under a policy.
std::vector<double> resolve_bandwidth(const Forest& forest, const WeightVector& weights,
                                      const BandwidthPolicy& policy);

/// query_weights, then bandwidth selection, then weighted_kde. Without a grid
/// the default grid for the resolved bandwidth is used.
DensityEstimate predict(const Forest& forest, const CovariateRow& x,
                        const std::optional<EvalGrid>& grid, const BandwidthPolicy& policy,
                        std::size_t grid_points = 0);

}  // namespace cdeforest
