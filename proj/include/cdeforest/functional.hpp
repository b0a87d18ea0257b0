#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cdeforest/matrix.hpp"
#include "cdeforest/parallel.hpp"

namespace cdeforest {

/// n curves observed at m ordered domain points.
struct FunctionalBlock {
  Matrix values;
  std::vector<double> domain_points;

  std::size_t length() const { return domain_points.size(); }
  /// Throws DomainError unless m >= 2, the domain is strictly increasing and
  /// every curve has m values.
  void validate() const;
};

/// Inclusive index range [first, last] of a curve's evaluation points.
struct Interval {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last - first + 1; }
  bool operator==(const Interval&) const = default;
};

struct DomainPartition {
  std::vector<Interval> intervals;

  std::size_t size() const { return intervals.size(); }
  /// Throws DomainError unless the intervals tile 0..m-1 in order.
  void validate(std::size_t m) const;
  bool operator==(const DomainPartition&) const = default;
};

/// Splits 0..m-1 into consecutive intervals whose lengths come from `draw`,
/// clamped to at least 1 and to the points remaining.
DomainPartition partition_from_draws(std::size_t m, const std::function<long()>& draw);

/// Poisson(lambda) interval lengths. Throws DomainError for lambda <= 0.
DomainPartition poisson_partition(std::size_t m, double lambda, Rng& rng);

/// Domain-weighted mean of one curve over an interval. Each point carries
/// the cell between the midpoints to its neighbours (edge points mirror
/// their single neighbour spacing), so uniform grids give arithmetic means.
double interval_mean(std::span<const double> curve, std::span<const double> domain,
                     const Interval& interval);

/// n x k matrix of per-interval means.
Matrix interval_means(const FunctionalBlock& block, const DomainPartition& partition);

/// Writes the tree-level covariate row [interval means per block | scalars].
void functional_row(std::span<const std::span<const double>> curves,
                    std::span<const std::vector<double>> domains,
                    std::span<const DomainPartition> partitions,
                    std::span<const double> scalars, std::vector<double>& out);

}  // namespace cdeforest
