#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdeforest/matrix.hpp"
#include "cdeforest/parallel.hpp"

namespace cdeforest {

enum class SplitCriterion { cde, mse };

const char* to_string(SplitCriterion criterion);
/// Parses "cde" or "mse"; throws ConfigError otherwise.
SplitCriterion parse_criterion(const std::string& name);

/// Per-row statistics whose running column sums drive the split sweep.
///
/// Both criteria reduce to maximizing sum_j S_j^2 / n over the two children,
/// where S_j are column sums of these statistics over a child:
///   - cde: the basis evaluations phi_j(y_i). The node's empirical CDE loss is
///     -sum_j beta_j^2 with beta_j = S_j / n, so n * sum_j beta_j^2 is the
///     child's contribution to the (negated) loss.
///   - mse: the scaled responses. Within-child SSE is sum y^2 - S^2 / n, and
///     sum y^2 is fixed by the parent.
using SplitStatistics = Matrix;

/// Statistics matrix for a criterion: the basis matrix for cde, the scaled
/// responses for mse.
SplitStatistics split_statistics(SplitCriterion criterion, const Matrix& scaled_responses,
                                 const Matrix& basis_values);

struct SplitDecision {
  std::size_t feature_index = 0;
  double threshold = 0.0;
  double score_gain = 0.0;
  std::size_t left_count = 0;
  std::size_t right_count = 0;
};

struct SweepResult {
  double threshold = 0.0;
  double score = 0.0;
  std::size_t left_count = 0;
};

/// One legal boundary of a sweep.
struct CutScore {
  double threshold = 0.0;
  double score = 0.0;
  std::size_t left_count = 0;
};

/// sum_j sums[j]^2 / count. Throws DomainError when count is zero.
double node_score(std::span<const double> sums, std::size_t count);

/// node_score applied to basis coefficient sums.
inline double node_score_cde(std::span<const double> coef_sums, std::size_t count) {
  return node_score(coef_sums, count);
}

/// Best boundary of one feature. feature_values[i] pairs with statistics row
/// i. Returns nullopt when no boundary between distinct values leaves at
/// least min_node_size rows on both sides.
std::optional<SweepResult> sweep_feature(std::span<const double> feature_values,
                                         const SplitStatistics& statistics,
                                         std::size_t min_node_size);

/// Combined child score at every legal boundary, in increasing threshold order.
std::vector<CutScore> split_profile(std::span<const double> feature_values,
                                    const SplitStatistics& statistics,
                                    std::size_t min_node_size);

/// Reusable buffers for split search within one tree.
class SplitWorkspace {
 public:
  std::vector<std::pair<double, std::uint32_t>> order;
  std::vector<double> left_sums;
  std::vector<double> total_sums;
  std::vector<std::size_t> features;
};

/// Sweeps feature `feature` of `covariates` over the (possibly repeated)
/// training rows `rows`; statistics are indexed by the same training rows.
std::optional<SweepResult> sweep_rows(const Matrix& covariates, std::size_t feature,
                                      const SplitStatistics& statistics,
                                      std::span<const std::uint32_t> rows,
                                      std::size_t min_node_size, SplitWorkspace& workspace);

/// Samples mtry features without replacement and returns the split with the
/// highest combined child score, provided it strictly exceeds the parent's
/// score. Ties go to the lowest feature index, then the lowest threshold.
std::optional<SplitDecision> best_split(std::span<const std::uint32_t> rows,
                                        const Matrix& covariates,
                                        const SplitStatistics& statistics, std::size_t mtry,
                                        std::size_t min_node_size, Rng& rng,
                                        SplitWorkspace& workspace);

}  // namespace cdeforest
