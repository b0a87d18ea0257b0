#include "cdeforest/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cdeforest/errors.hpp"

namespace cdeforest {

namespace {

// Midpoint of two adjacent distinct values that still routes `lo` left and
// `hi` right under the x <= threshold convention.
double midpoint(double lo, double hi) {
  double mid = lo + (hi - lo) / 2.0;
  if (!(mid < hi)) mid = lo;
  return mid;
}

double split_score(std::span<const double> left, std::span<const double> total,
                   std::size_t n_left, std::size_t n_total) {
  double left_sq = 0.0;
  double right_sq = 0.0;
  for (std::size_t j = 0; j < left.size(); ++j) {
    const double l = left[j];
    const double r = total[j] - l;
    left_sq += l * l;
    right_sq += r * r;
  }
  return left_sq / static_cast<double>(n_left) +
         right_sq / static_cast<double>(n_total - n_left);
}

// Sorts (value, row) pairs and calls visit(threshold, score, n_left) at each
// legal boundary, left to right.
template <typename Visit>
void sweep_sorted(std::vector<std::pair<double, std::uint32_t>>& order,
                  const SplitStatistics& statistics, std::size_t min_node_size,
                  std::vector<double>& left_sums, std::vector<double>& total_sums,
                  Visit&& visit) {
  const std::size_t n = order.size();
  const std::size_t min_size = std::max<std::size_t>(min_node_size, 1);
  if (n < 2 * min_size) return;
  std::sort(order.begin(), order.end());
  if (order.front().first == order.back().first) return;

  const std::size_t width = statistics.cols();
  total_sums.assign(width, 0.0);
  for (const auto& entry : order) {
    auto row = statistics.row(entry.second);
    for (std::size_t j = 0; j < width; ++j) total_sums[j] += row[j];
  }
  left_sums.assign(width, 0.0);

  const std::size_t last = n - min_size;
  for (std::size_t i = 0; i < last; ++i) {
    auto row = statistics.row(order[i].second);
    for (std::size_t j = 0; j < width; ++j) left_sums[j] += row[j];
    const std::size_t n_left = i + 1;
    if (n_left < min_size) continue;
    if (!(order[i].first < order[i + 1].first)) continue;
    visit(midpoint(order[i].first, order[i + 1].first),
          split_score(left_sums, total_sums, n_left, n), n_left);
  }
}

std::optional<SweepResult> best_of_sweep(std::vector<std::pair<double, std::uint32_t>>& order,
                                         const SplitStatistics& statistics,
                                         std::size_t min_node_size,
                                         std::vector<double>& left_sums,
                                         std::vector<double>& total_sums) {
  std::optional<SweepResult> best;
  sweep_sorted(order, statistics, min_node_size, left_sums, total_sums,
               [&](double threshold, double score, std::size_t n_left) {
                 if (!best || score > best->score) best = SweepResult{threshold, score, n_left};
               });
  return best;
}

void check_aligned(std::span<const double> feature_values, const SplitStatistics& statistics) {
  if (feature_values.size() != statistics.rows()) {
    throw DomainError("feature values and statistics rows are not aligned");
  }
}

}  // namespace

const char* to_string(SplitCriterion criterion) {
  return criterion == SplitCriterion::cde ? "cde" : "mse";
}

SplitCriterion parse_criterion(const std::string& name) {
  if (name == "cde") return SplitCriterion::cde;
  if (name == "mse") return SplitCriterion::mse;
  throw ConfigError("unknown split criterion '" + name + "' (expected cde or mse)");
}

SplitStatistics split_statistics(SplitCriterion criterion, const Matrix& scaled_responses,
                                 const Matrix& basis_values) {
  return criterion == SplitCriterion::cde ? basis_values : scaled_responses;
}

double node_score(std::span<const double> sums, std::size_t count) {
  if (count == 0) throw DomainError("node score of an empty node");
  double sq = 0.0;
  for (double s : sums) sq += s * s;
  return sq / static_cast<double>(count);
}

std::optional<SweepResult> sweep_feature(std::span<const double> feature_values,
                                         const SplitStatistics& statistics,
                                         std::size_t min_node_size) {
  check_aligned(feature_values, statistics);
  std::vector<std::pair<double, std::uint32_t>> order(feature_values.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = {feature_values[i], static_cast<std::uint32_t>(i)};
  }
  std::vector<double> left_sums;
  std::vector<double> total_sums;
  return best_of_sweep(order, statistics, min_node_size, left_sums, total_sums);
}

std::vector<CutScore> split_profile(std::span<const double> feature_values,
                                    const SplitStatistics& statistics,
                                    std::size_t min_node_size) {
  check_aligned(feature_values, statistics);
  std::vector<std::pair<double, std::uint32_t>> order(feature_values.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = {feature_values[i], static_cast<std::uint32_t>(i)};
  }
  std::vector<double> left_sums;
  std::vector<double> total_sums;
  std::vector<CutScore> cuts;
  sweep_sorted(order, statistics, min_node_size, left_sums, total_sums,
               [&](double threshold, double score, std::size_t n_left) {
                 cuts.push_back({threshold, score, n_left});
               });
  return cuts;
}

std::optional<SweepResult> sweep_rows(const Matrix& covariates, std::size_t feature,
                                      const SplitStatistics& statistics,
                                      std::span<const std::uint32_t> rows,
                                      std::size_t min_node_size, SplitWorkspace& workspace) {
  auto& order = workspace.order;
  order.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) order[i] = {covariates(rows[i], feature), rows[i]};
  return best_of_sweep(order, statistics, min_node_size, workspace.left_sums,
                       workspace.total_sums);
}

std::optional<SplitDecision> best_split(std::span<const std::uint32_t> rows,
                                        const Matrix& covariates,
                                        const SplitStatistics& statistics, std::size_t mtry,
                                        std::size_t min_node_size, Rng& rng,
                                        SplitWorkspace& workspace) {
  const std::size_t n = rows.size();
  const std::size_t n_features = covariates.cols();
  if (mtry == 0) throw ConfigError("mtry must be at least 1");
  if (n < 2 * std::max<std::size_t>(min_node_size, 1) || n_features == 0) return std::nullopt;

  // Partial Fisher-Yates draw of mtry distinct features, then ascending order
  // so ties resolve to the lowest index.
  auto& features = workspace.features;
  features.resize(n_features);
  std::iota(features.begin(), features.end(), std::size_t{0});
  const std::size_t take = std::min(mtry, n_features);
  if (take < n_features) {
    for (std::size_t k = 0; k < take; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, n_features - 1);
      std::swap(features[k], features[pick(rng)]);
    }
  }
  features.resize(take);
  std::sort(features.begin(), features.end());

  std::vector<double> parent_sums(statistics.cols(), 0.0);
  for (std::uint32_t r : rows) {
    auto row = statistics.row(r);
    for (std::size_t j = 0; j < parent_sums.size(); ++j) parent_sums[j] += row[j];
  }
  const double parent = node_score(parent_sums, n);
  // Rounding noise in the running sums must not register as a gain.
  const double tolerance = 1e-12 * std::max(1.0, std::abs(parent));

  std::optional<SplitDecision> best;
  double best_score = 0.0;
  for (std::size_t feature : features) {
    auto sweep = sweep_rows(covariates, feature, statistics, rows, min_node_size, workspace);
    if (!sweep) continue;
    if (sweep->score - parent <= tolerance) continue;
    if (!best || sweep->score > best_score) {
      best_score = sweep->score;
      best = SplitDecision{feature, sweep->threshold, sweep->score - parent, sweep->left_count,
                           n - sweep->left_count};
    }
  }
  return best;
}

}  // namespace cdeforest
