#include "cdeforest/loss.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "cdeforest/errors.hpp"
#include "cdeforest/parallel.hpp"

namespace cdeforest {

namespace {

// Trapezoid weights along one axis.
std::vector<double> trapezoid_weights(const std::vector<double>& axis) {
  std::vector<double> w(axis.size(), 0.0);
  for (std::size_t k = 0; k + 1 < axis.size(); ++k) {
    const double half = (axis[k + 1] - axis[k]) / 2.0;
    w[k] += half;
    w[k + 1] += half;
  }
  return w;
}

template <typename F>
double integrate_with(const EvalGrid& grid, std::span<const double> values, F&& transform) {
  if (values.size() != grid.size()) throw DomainError("values do not match grid size");
  const std::size_t dims = grid.dims();
  std::vector<std::vector<double>> weights;
  for (std::size_t d = 0; d < dims; ++d) weights.push_back(trapezoid_weights(grid.axis(d)));

  // Collapse the last axis first, then the remaining ones.
  const std::size_t inner = grid.axis(dims - 1).size();
  const std::size_t outer = values.size() / inner;
  std::vector<double> partial(outer, 0.0);
  const auto& w_last = weights[dims - 1];
  for (std::size_t o = 0; o < outer; ++o) {
    double s = 0.0;
    for (std::size_t k = 0; k < inner; ++k) s += w_last[k] * transform(values[o * inner + k]);
    partial[o] = s;
  }
  for (std::size_t d = dims - 1; d-- > 0;) {
    const std::size_t len = grid.axis(d).size();
    std::vector<double> next(partial.size() / len, 0.0);
    for (std::size_t o = 0; o < next.size(); ++o) {
      double s = 0.0;
      for (std::size_t k = 0; k < len; ++k) s += weights[d][k] * partial[o * len + k];
      next[o] = s;
    }
    partial = std::move(next);
  }
  return partial[0];
}

}  // namespace

double integrate(const EvalGrid& grid, std::span<const double> values) {
  return integrate_with(grid, values, [](double v) { return v; });
}

double integral_squared(const EvalGrid& grid, std::span<const double> values) {
  return integrate_with(grid, values, [](double v) { return v * v; });
}

double interpolate(const EvalGrid& grid, std::span<const double> values,
                   std::span<const double> point, bool* outside) {
  const std::size_t dims = grid.dims();
  if (point.size() != dims) throw DomainError("point dimension does not match grid");
  if (values.size() != grid.size()) throw DomainError("values do not match grid size");

  std::vector<std::size_t> base(dims);
  std::vector<double> frac(dims);
  bool out_of_hull = false;
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& axis = grid.axis(d);
    double y = point[d];
    if (y < axis.front() || y > axis.back()) {
      out_of_hull = true;
      y = std::clamp(y, axis.front(), axis.back());
    }
    auto it = std::upper_bound(axis.begin(), axis.end(), y);
    std::size_t k = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
    k = std::min(k, axis.size() - 2);
    base[d] = k;
    frac[d] = (y - axis[k]) / (axis[k + 1] - axis[k]);
  }
  if (outside) *outside = out_of_hull;

  double result = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << dims); ++corner) {
    double weight = 1.0;
    std::size_t index = 0;
    for (std::size_t d = 0; d < dims; ++d) {
      const bool upper = (corner >> d) & 1U;
      weight *= upper ? frac[d] : 1.0 - frac[d];
      index = index * grid.axis(d).size() + base[d] + (upper ? 1 : 0);
    }
    if (weight != 0.0) result += weight * values[index];
  }
  return result;
}

LossContribution loss_contribution(const DensityEstimate& estimate, std::span<const double> y) {
  LossContribution c;
  const double at_truth = interpolate(estimate.grid, estimate.values, y, &c.outside);
  c.value = integral_squared(estimate) - 2.0 * at_truth;
  return c;
}

LossReport summarize(std::span<const LossContribution> contributions) {
  const std::size_t m = contributions.size();
  if (m < 2) throw DomainError("loss needs at least two held-out points");
  std::vector<double> values(m);
  LossReport report;
  report.n_eval = m;
  for (std::size_t i = 0; i < m; ++i) {
    values[i] = contributions[i].value;
    if (contributions[i].outside) ++report.coverage_warnings;
  }
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  report.loss = mean;
  report.std_error = std::sqrt(ss / static_cast<double>(m - 1)) / std::sqrt(static_cast<double>(m));
  return report;
}

LossReport cde_loss(std::span<const DensityEstimate> estimates, const Matrix& true_responses) {
  if (estimates.size() != true_responses.rows()) {
    throw DomainError("got " + std::to_string(estimates.size()) + " estimates for " +
                      std::to_string(true_responses.rows()) + " held-out points");
  }
  std::vector<LossContribution> contributions(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    contributions[i] = loss_contribution(estimates[i], true_responses.row(i));
  }
  return summarize(contributions);
}

Evaluation evaluate(const Forest& forest, const Dataset& test, const BandwidthPolicy& policy,
                    std::size_t grid_points) {
  if (test.rows() == 0) throw DomainError("test set is empty");
  if (test.responses.cols() != forest.response_dims()) {
    throw DomainError("test set has " + std::to_string(test.responses.cols()) +
                      " responses, model expects " + std::to_string(forest.response_dims()));
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<LossContribution> contributions(test.rows());
  parallel_for(test.rows(), [&](std::size_t i) {
    auto estimate = predict(forest, covariate_row(test, i), std::nullopt, policy, grid_points);
    contributions[i] = loss_contribution(estimate, test.responses.row(i));
  });
  const auto stop = std::chrono::steady_clock::now();
  return {summarize(contributions), std::chrono::duration<double>(stop - start).count()};
}

}  // namespace cdeforest
