#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdeforest/dataset.hpp"
#include "cdeforest/density.hpp"
#include "cdeforest/forest.hpp"

namespace cdeforest {

/// Held-out CDE loss without the unestimable constant term. std_error is the
/// sample standard deviation of the per-point contributions over sqrt(n_eval),
/// i.e. a standard error over test points, not over repeated fits.
struct LossReport {
  double loss = 0.0;
  double std_error = 0.0;
  std::size_t n_eval = 0;
  std::size_t coverage_warnings = 0;
};

/// Trapezoid integral of values over the grid (iterated per axis).
double integrate(const EvalGrid& grid, std::span<const double> values);

/// Trapezoid integral of values^2 over the grid.
double integral_squared(const EvalGrid& grid, std::span<const double> values);
inline double integral_squared(const DensityEstimate& estimate) {
  return integral_squared(estimate.grid, estimate.values);
}

/// Multilinear interpolation at `point`. Coordinates outside the grid hull
/// are clamped to the nearest edge and reported through `outside`.
double interpolate(const EvalGrid& grid, std::span<const double> values,
                   std::span<const double> point, bool* outside = nullptr);

struct LossContribution {
  double value = 0.0;
  bool outside = false;
};

/// integral p^2 - 2 p(y) for one held-out point.
LossContribution loss_contribution(const DensityEstimate& estimate, std::span<const double> y);

/// Mean and standard error of contributions. The mean is accumulated in
/// sorted order, so it does not depend on the order of the points. Throws
/// DomainError for fewer than two contributions.
LossReport summarize(std::span<const LossContribution> contributions);

/// Loss of estimates[i] against true_responses row i.
LossReport cde_loss(std::span<const DensityEstimate> estimates, const Matrix& true_responses);

struct Evaluation {
  LossReport report;
  double predict_seconds = 0.0;
};

/// Predicts every row of `test` with the forest and scores it. Rows run in
/// parallel; the report is independent of thread count.
Evaluation evaluate(const Forest& forest, const Dataset& test, const BandwidthPolicy& policy,
                    std::size_t grid_points = 0);

}  // namespace cdeforest
