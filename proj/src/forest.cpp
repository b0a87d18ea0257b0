#include "cdeforest/forest.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cdeforest/errors.hpp"

namespace cdeforest {

BandwidthPolicy BandwidthPolicy::parse(const std::string& text) {
  if (text == "plugin") return plugin();
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw ConfigError("bandwidth must be 'plugin' or positive numbers, got '" + text + "'");
    }
    values.push_back(v);
  }
  BandwidthPolicy policy = fixed(std::move(values));
  policy.validate();
  return policy;
}

std::string BandwidthPolicy::to_string() const {
  if (kind == Kind::plugin) return "plugin";
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    auto end = std::to_chars(buf, buf + sizeof(buf), values[i]).ptr;
    out.append(buf, end);
  }
  return out;
}

double BandwidthPolicy::value_for(std::size_t dim) const {
  if (kind != Kind::fixed) throw ConfigError("plug-in bandwidth has no fixed value");
  if (values.size() == 1) return values[0];
  if (dim >= values.size()) {
    throw ConfigError("no bandwidth given for response dimension " + std::to_string(dim));
  }
  return values[dim];
}

void BandwidthPolicy::validate() const {
  if (kind == Kind::plugin) return;
  if (values.empty()) throw ConfigError("fixed bandwidth needs a value");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("bandwidth must be positive");
  }
}

void ForestConfig::validate() const {
  if (n_trees == 0) throw ConfigError("n_trees must be at least 1");
  if (min_node_size == 0) throw ConfigError("min_node_size must be at least 1");
  if (n_basis < 1) throw ConfigError("n_basis must be at least 1");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  bandwidth.validate();
}

std::size_t resolve_mtry(std::size_t configured, std::size_t p) {
  if (configured > 0) return std::min(configured, p);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(double(p)))));
}

std::vector<std::uint32_t> WeightVector::support() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

double WeightVector::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

Forest::Forest(ForestConfig config, ResponseScaler scaler, Matrix training_responses,
               std::vector<Tree> trees, std::vector<std::string> covariate_names,
               std::vector<std::string> response_names, std::size_t n_scalar,
               std::optional<FunctionalLayout> layout,
               std::vector<std::vector<DomainPartition>> partitions)
    : config_(std::move(config)),
      scaler_(std::move(scaler)),
      training_responses_(std::move(training_responses)),
      trees_(std::move(trees)),
      covariate_names_(std::move(covariate_names)),
      response_names_(std::move(response_names)),
      n_scalar_(n_scalar),
      layout_(std::move(layout)),
      partitions_(std::move(partitions)) {
  if (trees_.size() != config_.n_trees) throw FormatError("tree count does not match config");
  const std::size_t n = training_responses_.rows();
  for (const auto& tree : trees_) {
    for (std::uint32_t r : tree.members()) {
      if (r >= n) throw FormatError("tree references a row beyond the training responses");
    }
  }
  if (layout_) {
    if (partitions_.size() != trees_.size()) throw FormatError("missing per-tree partitions");
    for (std::size_t t = 0; t < trees_.size(); ++t) {
      if (partitions_[t].size() != layout_->domains.size()) {
        throw FormatError("tree partition count does not match functional blocks");
      }
      std::size_t width = n_scalar_;
      for (std::size_t b = 0; b < partitions_[t].size(); ++b) {
        partitions_[t][b].validate(layout_->domains[b].size());
        width += partitions_[t][b].size();
      }
      if (width != trees_[t].n_features()) throw FormatError("tree width does not match partitions");
    }
  }
}

void Forest::tree_row(std::size_t t, const CovariateRow& x, std::vector<double>& out) const {
  if (x.scalars.size() != n_scalar_) {
    throw DomainError("query has " + std::to_string(x.scalars.size()) +
                      " scalar covariates, model expects " + std::to_string(n_scalar_));
  }
  if (!layout_) {
    if (!x.curves.empty()) throw DomainError("model was trained without functional covariates");
    out.assign(x.scalars.begin(), x.scalars.end());
    return;
  }
  functional_row(x.curves, layout_->domains, partitions_[t], x.scalars, out);
}

namespace {

Matrix tree_covariates(const Dataset& data, std::span<const DomainPartition> partitions) {
  const std::size_t n = data.rows();
  std::size_t width = data.covariates.cols();
  for (const auto& p : partitions) width += p.size();
  Matrix out(n, width);
  std::size_t col = 0;
  for (std::size_t b = 0; b < partitions.size(); ++b) {
    const auto& block = data.functional[b];
    for (std::size_t r = 0; r < n; ++r) {
      auto curve = block.values.row(r);
      for (std::size_t k = 0; k < partitions[b].size(); ++k) {
        out(r, col + k) = interval_mean(curve, block.domain_points, partitions[b].intervals[k]);
      }
    }
    col += partitions[b].size();
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < data.covariates.cols(); ++c) out(r, col + c) = data.covariates(r, c);
  }
  return out;
}

}  // namespace

Forest train(const Dataset& data, const ForestConfig& config) {
  config.validate();
  data.validate();
  const std::size_t n = data.rows();
  if (n < 2 * config.min_node_size) {
    throw ConfigError("training needs at least 2*min_node_size = " +
                      std::to_string(2 * config.min_node_size) + " rows, got " + std::to_string(n));
  }
  const bool functional = !data.functional.empty();
  if (!functional && config.mtry > data.covariates.cols()) {
    throw ConfigError("mtry " + std::to_string(config.mtry) + " exceeds the " +
                      std::to_string(data.covariates.cols()) + " covariates");
  }

  ResponseScaler scaler = fit_scaler(data.responses);
  BasisSpec spec{BasisFamily::cosine, config.n_basis, static_cast<int>(data.responses.cols())};
  spec.validate();
  const Matrix scaled = scaler.transform(data.responses);
  Matrix statistics = config.criterion == SplitCriterion::cde
                          ? basis_matrix(scaled, spec).values()
                          : scaled;

  std::vector<Tree> trees(config.n_trees);
  std::vector<std::vector<DomainPartition>> partitions(functional ? config.n_trees : 0);

  parallel_for(config.n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(config.seed, t));
    if (!functional) {
      TreeParams params{resolve_mtry(config.mtry, data.covariates.cols()), config.min_node_size};
      trees[t] = build_tree(data.covariates, statistics, params, config.criterion, rng);
      return;
    }
    auto& own = partitions[t];
    for (const auto& block : data.functional) {
      own.push_back(poisson_partition(block.length(), config.lambda, rng));
    }
    Matrix covariates = tree_covariates(data, own);
    TreeParams params{resolve_mtry(config.mtry, covariates.cols()), config.min_node_size};
    trees[t] = build_tree(covariates, statistics, params, config.criterion, rng);
  });

  std::optional<FunctionalLayout> layout;
  if (functional) {
    layout = FunctionalLayout{};
    for (const auto& block : data.functional) layout->domains.push_back(block.domain_points);
    layout->n_scalar = data.covariates.cols();
  }
  return Forest(config, std::move(scaler), data.responses, std::move(trees), data.covariate_names,
                data.response_names, data.covariates.cols(), std::move(layout),
                std::move(partitions));
}

WeightVector query_weights(const Forest& forest, const CovariateRow& x) {
  for (double v : x.scalars) {
    if (!std::isfinite(v)) throw DomainError("query covariates must be finite");
  }
  const std::size_t n = forest.training_responses().rows();
  WeightVector out{std::vector<double>(n, 0.0)};
  std::vector<double> row;
  const auto& trees = forest.trees();
  for (std::size_t t = 0; t < trees.size(); ++t) {
    forest.tree_row(t, x, row);
    auto members = trees[t].leaf_members(trees[t].leaf_index(row));
    const double share = 1.0 / static_cast<double>(members.size());
    for (std::uint32_t r : members) out.weights[r] += share;
  }
  const double total = out.sum();
  for (double& w : out.weights) w /= total;
  return out;
}

WeightVector query_weights(const Forest& forest, std::span<const double> scalars) {
  return query_weights(forest, CovariateRow{scalars, {}});
}

}  // namespace cdeforest
