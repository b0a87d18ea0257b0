#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdeforest/basis.hpp"
#include "cdeforest/dataset.hpp"
#include "cdeforest/functional.hpp"
#include "cdeforest/splitting.hpp"
#include "cdeforest/tree.hpp"

namespace cdeforest {

/// Kernel bandwidth selection: fixed per-dimension values (a single value
/// applies to every dimension) or the weighted normal-reference plug-in rule.
struct BandwidthPolicy {
  enum class Kind { fixed, plugin };
  Kind kind = Kind::fixed;
  std::vector<double> values{0.2};

  static BandwidthPolicy fixed(double h) { return {Kind::fixed, {h}}; }
  static BandwidthPolicy fixed(std::vector<double> h) { return {Kind::fixed, std::move(h)}; }
  static BandwidthPolicy plugin() { return {Kind::plugin, {}}; }

  /// Parses "plugin", "0.2" or "0.2,0.1". Throws ConfigError.
  static BandwidthPolicy parse(const std::string& text);
  std::string to_string() const;
  /// Fixed bandwidth for one response dimension.
  double value_for(std::size_t dim) const;
  void validate() const;

  bool operator==(const BandwidthPolicy&) const = default;
};

struct ForestConfig {
  std::size_t n_trees = 1000;
  /// 0 selects round(sqrt(p)) for the p covariates each tree sees.
  std::size_t mtry = 0;
  std::size_t min_node_size = 5;
  int n_basis = 15;
  SplitCriterion criterion = SplitCriterion::cde;
  BandwidthPolicy bandwidth = BandwidthPolicy::fixed(0.2);
  /// Mean interval length (in evaluation points) of functional partitions.
  double lambda = 50.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError on a count of zero or a non-positive rate/bandwidth.
  void validate() const;
  bool operator==(const ForestConfig&) const = default;
};

/// mtry for p covariates: the configured value, or round(sqrt(p)) when 0.
std::size_t resolve_mtry(std::size_t configured, std::size_t p);

/// Domain grids of the functional blocks a forest was trained on.
struct FunctionalLayout {
  std::vector<std::vector<double>> domains;
  std::size_t n_scalar = 0;

  bool operator==(const FunctionalLayout&) const = default;
};

/// Training-row weights for one query; sums to 1.
struct WeightVector {
  std::vector<double> weights;

  /// Indices with non-zero weight, ascending.
  std::vector<std::uint32_t> support() const;
  double sum() const;
};

class Forest {
 public:
  Forest() = default;
  Forest(ForestConfig config, ResponseScaler scaler, Matrix training_responses,
         std::vector<Tree> trees, std::vector<std::string> covariate_names,
         std::vector<std::string> response_names, std::size_t n_scalar,
         std::optional<FunctionalLayout> layout,
         std::vector<std::vector<DomainPartition>> partitions);

  const ForestConfig& config() const { return config_; }
  const ResponseScaler& scaler() const { return scaler_; }
  const Matrix& training_responses() const { return training_responses_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const std::vector<std::string>& covariate_names() const { return covariate_names_; }
  const std::vector<std::string>& response_names() const { return response_names_; }
  std::size_t n_scalar() const { return n_scalar_; }
  std::size_t response_dims() const { return training_responses_.cols(); }
  const std::optional<FunctionalLayout>& functional_layout() const { return layout_; }
  /// Per tree, one partition per functional block (empty without blocks).
  const std::vector<std::vector<DomainPartition>>& partitions() const { return partitions_; }

  /// Covariate row tree t routes on. Throws DomainError on layout mismatch.
  void tree_row(std::size_t t, const CovariateRow& x, std::vector<double>& out) const;

  bool operator==(const Forest&) const = default;

 private:
  ForestConfig config_;
  ResponseScaler scaler_;
  Matrix training_responses_;
  std::vector<Tree> trees_;
  std::vector<std::string> covariate_names_;
  std::vector<std::string> response_names_;
  std::size_t n_scalar_ = 0;
  std::optional<FunctionalLayout> layout_;
  std::vector<std::vector<DomainPartition>> partitions_;
};

/// Fits the response scaler and basis once, then grows config.n_trees trees,
/// tree t drawing from the rng stream derive_seed(config.seed, t). The result
/// does not depend on thread count. Throws ConfigError or FitError.
Forest train(const Dataset& data, const ForestConfig& config);

/// w_i(x) = T^-1 sum_t 1{i in leaf_t(x)} / |leaf_t(x)|, counting bootstrap
/// repeats, renormalized to sum to one.
WeightVector query_weights(const Forest& forest, const CovariateRow& x);
WeightVector query_weights(const Forest& forest, std::span<const double> scalars);

}  // namespace cdeforest
