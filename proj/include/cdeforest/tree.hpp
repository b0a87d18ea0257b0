#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cdeforest/matrix.hpp"
#include "cdeforest/parallel.hpp"
#include "cdeforest/splitting.hpp"

namespace cdeforest {

/// Flat tree node. Internal nodes route x[feature] <= threshold to `left`;
/// leaves own the slice [member_begin, member_end) of Tree::members().
struct Node {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t member_begin = 0;
  std::uint32_t member_end = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const Node&) const = default;
};

struct TreeParams {
  std::size_t mtry = 1;
  std::size_t min_node_size = 5;
};

class Tree {
 public:
  Tree() = default;
  /// Assembles a tree from its persisted parts; throws FormatError when the
  /// structure is not a proper binary tree over `members`.
  Tree(std::vector<Node> nodes, std::vector<std::uint32_t> members,
       std::vector<std::uint32_t> bootstrap, SplitCriterion criterion, std::size_t n_features);

  const std::vector<Node>& nodes() const { return nodes_; }
  /// Leaf member rows concatenated leaf by leaf.
  const std::vector<std::uint32_t>& members() const { return members_; }
  const std::vector<std::uint32_t>& bootstrap_indices() const { return bootstrap_; }
  SplitCriterion criterion() const { return criterion_; }
  std::size_t n_features() const { return n_features_; }

  std::span<const std::uint32_t> leaf_members(std::size_t node) const;
  std::size_t leaf_count() const;

  /// Index of the leaf reached by x. Throws DomainError on dimension mismatch.
  std::size_t leaf_index(std::span<const double> x) const;

  bool operator==(const Tree&) const = default;

 private:
  friend Tree build_tree_from_sample(const Matrix&, const SplitStatistics&, const TreeParams&,
                                     SplitCriterion, std::vector<std::uint32_t>, Rng&);

  void check_structure() const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> members_;
  std::vector<std::uint32_t> bootstrap_;
  SplitCriterion criterion_ = SplitCriterion::cde;
  std::size_t n_features_ = 0;
};

/// Draws a bootstrap sample of size n with replacement and grows a tree on it.
/// Throws FitError when the data have fewer than two rows.
Tree build_tree(const Matrix& covariates, const SplitStatistics& statistics,
                const TreeParams& params, SplitCriterion criterion, Rng& rng);

/// Grows a tree on an explicit sample of training rows (repeats allowed).
Tree build_tree_from_sample(const Matrix& covariates, const SplitStatistics& statistics,
                            const TreeParams& params, SplitCriterion criterion,
                            std::vector<std::uint32_t> sample, Rng& rng);

inline std::size_t leaf_index(const Tree& tree, std::span<const double> x) {
  return tree.leaf_index(x);
}

}  // namespace cdeforest
