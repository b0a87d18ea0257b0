#include "cdeforest/tree.hpp"

#include <algorithm>
#include <string>

#include "cdeforest/errors.hpp"

namespace cdeforest {

Tree::Tree(std::vector<Node> nodes, std::vector<std::uint32_t> members,
           std::vector<std::uint32_t> bootstrap, SplitCriterion criterion,
           std::size_t n_features)
    : nodes_(std::move(nodes)),
      members_(std::move(members)),
      bootstrap_(std::move(bootstrap)),
      criterion_(criterion),
      n_features_(n_features) {
  check_structure();
}

void Tree::check_structure() const {
  if (nodes_.empty()) throw FormatError("tree has no nodes");
  std::vector<int> parents(nodes_.size(), 0);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    if (node.is_leaf()) {
      if (node.member_begin >= node.member_end || node.member_end > members_.size()) {
        throw FormatError("leaf " + std::to_string(i) + " has an invalid member range");
      }
      covered += node.member_end - node.member_begin;
      continue;
    }
    if (static_cast<std::size_t>(node.feature) >= n_features_) {
      throw FormatError("node " + std::to_string(i) + " splits on an unknown feature");
    }
    if (node.left == node.right || node.left == 0 || node.right == 0 ||
        node.left >= nodes_.size() || node.right >= nodes_.size()) {
      throw FormatError("node " + std::to_string(i) + " has invalid children");
    }
    ++parents[node.left];
    ++parents[node.right];
  }
  if (parents[0] != 0) throw FormatError("root has a parent");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (parents[i] != 1) throw FormatError("node " + std::to_string(i) + " is not reachable once");
  }
  if (covered != members_.size()) throw FormatError("leaf ranges do not cover all members");
}

std::span<const std::uint32_t> Tree::leaf_members(std::size_t node) const {
  const Node& leaf = nodes_.at(node);
  if (!leaf.is_leaf()) throw DomainError("node " + std::to_string(node) + " is not a leaf");
  return std::span<const std::uint32_t>(members_).subspan(leaf.member_begin,
                                                           leaf.member_end - leaf.member_begin);
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t Tree::leaf_index(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw DomainError("query has " + std::to_string(x.size()) + " covariates, tree expects " +
                      std::to_string(n_features_));
  }
  std::size_t at = 0;
  while (!nodes_[at].is_leaf()) {
    const Node& node = nodes_[at];
    at = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return at;
}

Tree build_tree(const Matrix& covariates, const SplitStatistics& statistics,
                const TreeParams& params, SplitCriterion criterion, Rng& rng) {
  const std::size_t n = covariates.rows();
  if (n < 2) throw FitError("a tree needs at least two training rows");
  std::vector<std::uint32_t> sample(n);
  std::uniform_int_distribution<std::uint32_t> draw(0, static_cast<std::uint32_t>(n - 1));
  for (auto& s : sample) s = draw(rng);
  return build_tree_from_sample(covariates, statistics, params, criterion, std::move(sample), rng);
}

Tree build_tree_from_sample(const Matrix& covariates, const SplitStatistics& statistics,
                            const TreeParams& params, SplitCriterion criterion,
                            std::vector<std::uint32_t> sample, Rng& rng) {
  if (sample.empty()) throw FitError("a tree needs a non-empty sample");
  if (covariates.rows() != statistics.rows()) {
    throw DomainError("covariate and statistics row counts differ");
  }
  for (std::uint32_t s : sample) {
    if (s >= covariates.rows()) throw DomainError("sample row out of range");
  }

  Tree tree;
  tree.criterion_ = criterion;
  tree.n_features_ = covariates.cols();
  tree.bootstrap_ = sample;

  // Rows of each open node occupy a contiguous slice of `rows`, partitioned
  // in place as nodes split; leaves keep their slice as the member list.
  std::vector<std::uint32_t> rows = std::move(sample);
  struct Pending {
    std::uint32_t node;
    std::uint32_t begin;
    std::uint32_t end;
  };
  std::vector<Pending> stack{{0, 0, static_cast<std::uint32_t>(rows.size())}};
  tree.nodes_.emplace_back();
  SplitWorkspace workspace;

  while (!stack.empty()) {
    const Pending at = stack.back();
    stack.pop_back();
    std::span<std::uint32_t> slice(rows.data() + at.begin, at.end - at.begin);

    auto split = best_split(slice, covariates, statistics, params.mtry, params.min_node_size, rng,
                            workspace);
    if (!split) {
      Node& leaf = tree.nodes_[at.node];
      leaf.member_begin = at.begin;
      leaf.member_end = at.end;
      continue;
    }

    const std::size_t feature = split->feature_index;
    auto mid = std::stable_partition(slice.begin(), slice.end(), [&](std::uint32_t r) {
      return covariates(r, feature) <= split->threshold;
    });
    const auto left_end = at.begin + static_cast<std::uint32_t>(mid - slice.begin());

    const auto left_id = static_cast<std::uint32_t>(tree.nodes_.size());
    const auto right_id = left_id + 1;
    tree.nodes_.emplace_back();
    tree.nodes_.emplace_back();
    Node& node = tree.nodes_[at.node];
    node.feature = static_cast<std::int32_t>(feature);
    node.threshold = split->threshold;
    node.left = left_id;
    node.right = right_id;

    // Right pushed first so the left subtree is grown first.
    stack.push_back({right_id, left_end, at.end});
    stack.push_back({left_id, at.begin, left_end});
  }

  tree.members_ = std::move(rows);
  return tree;
}

}  // namespace cdeforest
