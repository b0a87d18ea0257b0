#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"

#include "cdeforest/datagen.hpp"
#include "cdeforest/errors.hpp"
#include "cdeforest/forest.hpp"

using namespace cdeforest;

namespace {

Tree single_leaf(std::vector<std::uint32_t> members) {
  std::vector<Node> nodes(1);
  nodes[0].member_end = static_cast<std::uint32_t>(members.size());
  auto boot = members;
  return Tree({nodes}, std::move(members), std::move(boot), SplitCriterion::cde, 1);
}

Forest hand_forest(std::vector<Tree> trees) {
  ForestConfig config;
  config.n_trees = trees.size();
  Matrix responses(4, 1);
  for (std::size_t i = 0; i < 4; ++i) responses(i, 0) = static_cast<double>(i);
  return Forest(config, fit_scaler(responses), responses, std::move(trees), {"x"}, {"y"}, 1,
                std::nullopt, {});
}

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("CDE_FOREST_THREADS")) saved_ = old;
    setenv("CDE_FOREST_THREADS", value, 1);
  }
  ~ThreadsEnv() {
    if (saved_.empty()) {
      unsetenv("CDE_FOREST_THREADS");
    } else {
      setenv("CDE_FOREST_THREADS", saved_.c_str(), 1);
    }
  }

 private:
  std::string saved_;
};

ForestConfig small_config(std::size_t trees, std::uint64_t seed) {
  ForestConfig c;
  c.n_trees = trees;
  c.mtry = 2;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("weights average per-tree leaf shares") {
  Forest forest = hand_forest({single_leaf({1, 2}), single_leaf({2, 3})});
  std::vector<double> q{0.0};
  WeightVector w = query_weights(forest, q);
  CHECK(w.weights == std::vector<double>{0.0, 0.25, 0.5, 0.25});
  CHECK(w.support() == std::vector<std::uint32_t>{1, 2, 3});
}

TEST_CASE("bootstrap repeats count toward leaf weight") {
  Forest forest = hand_forest({single_leaf({0, 0, 3})});
  WeightVector w = query_weights(forest, std::vector<double>{1.0});
  CHECK(w.weights[0] == doctest::Approx(2.0 / 3.0));
  CHECK(w.weights[3] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("a single-leaf tree over every row gives uniform weights") {
  Forest forest = hand_forest({single_leaf({0, 1, 2, 3})});
  WeightVector w = query_weights(forest, std::vector<double>{7.0});
  for (double v : w.weights) CHECK(v == 0.25);
}

TEST_CASE("query validation") {
  Forest forest = hand_forest({single_leaf({0, 1})});
  CHECK_THROWS_AS(query_weights(forest, std::vector<double>{std::nan("")}), DomainError);
  CHECK_THROWS_AS(query_weights(forest, std::vector<double>{1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(hand_forest({single_leaf({0, 9})}), FormatError);
}

TEST_CASE("one-tree forest reproduces build_tree on the derived stream") {
  Dataset data = gen_multimodal({300, 0.25, 4});
  ForestConfig config = small_config(1, 99);
  Forest forest = train(data, config);

  ResponseScaler scaler = fit_scaler(data.responses);
  Matrix basis = basis_matrix(scaler.transform(data.responses), BasisSpec{}).values();
  Rng rng(derive_seed(99, 0));
  Tree tree = build_tree(data.covariates, basis, {2, 5}, SplitCriterion::cde, rng);
  CHECK(forest.trees()[0] == tree);
}

TEST_CASE("training is deterministic and independent of thread count") {
  Dataset data = gen_multimodal({400, 0.25, 8});
  ForestConfig config = small_config(40, 5);
  Forest serial = [&] {
    ThreadsEnv env("1");
    return train(data, config);
  }();
  Forest threaded = [&] {
    ThreadsEnv env("4");
    return train(data, config);
  }();
  CHECK(serial == threaded);
  CHECK(train(data, config) == serial);
  config.seed = 6;
  CHECK_FALSE(train(data, config) == serial);
}

TEST_CASE("weights are normalized and supported on leaf members") {
  Dataset data = gen_multimodal({300, 0.25, 12});
  Forest forest = train(data, small_config(30, 1));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int q = 0; q < 50; ++q) {
    std::vector<double> x(20);
    for (double& v : x) v = u(gen);
    WeightVector w = query_weights(forest, x);
    CHECK(std::abs(w.sum() - 1.0) < 1e-12);
    std::vector<char> reachable(data.rows(), 0);
    for (const Tree& tree : forest.trees()) {
      for (std::uint32_t r : tree.leaf_members(tree.leaf_index(x))) reachable[r] = 1;
    }
    for (std::size_t i = 0; i < data.rows(); ++i) {
      CHECK(w.weights[i] >= 0.0);
      if (!reachable[i]) CHECK(w.weights[i] == 0.0);
      if (reachable[i]) CHECK(w.weights[i] > 0.0);
    }
  }
}

TEST_CASE("weights concentrate on the query's side of a response change") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  Dataset data;
  data.covariates = Matrix(600, 1);
  data.responses = Matrix(600, 1);
  data.covariate_names = {"x"};
  data.response_names = {"y"};
  for (std::size_t i = 0; i < 600; ++i) {
    data.covariates(i, 0) = u(gen);
    data.responses(i, 0) = (data.covariates(i, 0) < 0.5 ? 0.0 : 3.0) + noise(gen);
  }
  ForestConfig config = small_config(100, 2);
  config.mtry = 1;
  Forest forest = train(data, config);
  for (double q : {0.1, 0.25, 0.75, 0.9}) {
    WeightVector w = query_weights(forest, std::vector<double>{q});
    double same_side = 0.0;
    for (std::size_t i = 0; i < 600; ++i) {
      if ((data.covariates(i, 0) < 0.5) == (q < 0.5)) same_side += w.weights[i];
    }
    CHECK(same_side >= 0.9);
  }
}

TEST_CASE("configuration and fit errors") {
  Dataset data = gen_multimodal({30, 0.25, 1});
  ForestConfig config = small_config(5, 0);
  config.n_trees = 0;
  CHECK_THROWS_AS(train(data, config), ConfigError);
  config = small_config(5, 0);
  config.mtry = 21;
  CHECK_THROWS_AS(train(data, config), ConfigError);
  config = small_config(5, 0);
  config.min_node_size = 16;
  CHECK_THROWS_AS(train(data, config), ConfigError);
  config = small_config(5, 0);
  config.lambda = 0.0;
  CHECK_THROWS_AS(train(data, config), ConfigError);
  config = small_config(5, 0);
  config.bandwidth = BandwidthPolicy::fixed(-1.0);
  CHECK_THROWS_AS(train(data, config), ConfigError);

  Dataset constant = data;
  for (std::size_t i = 0; i < constant.rows(); ++i) constant.responses(i, 0) = 2.0;
  CHECK_THROWS_AS(train(constant, small_config(5, 0)), FitError);
}

TEST_CASE("bandwidth policy parsing") {
  CHECK(BandwidthPolicy::parse("plugin").kind == BandwidthPolicy::Kind::plugin);
  BandwidthPolicy two = BandwidthPolicy::parse("0.2,0.1");
  CHECK(two.value_for(0) == 0.2);
  CHECK(two.value_for(1) == 0.1);
  CHECK(BandwidthPolicy::parse("0.3").value_for(2) == 0.3);
  CHECK_THROWS_AS(BandwidthPolicy::parse("wide"), ConfigError);
  CHECK_THROWS_AS(BandwidthPolicy::parse("0"), ConfigError);
  CHECK_THROWS_AS(BandwidthPolicy::parse("0.2,x"), ConfigError);
  CHECK(BandwidthPolicy::parse(two.to_string()) == two);
}

TEST_CASE("mtry resolution") {
  CHECK(resolve_mtry(0, 20) == 4);
  CHECK(resolve_mtry(0, 1) == 1);
  CHECK(resolve_mtry(0, 68) == 8);
  CHECK(resolve_mtry(3, 20) == 3);
  CHECK(resolve_mtry(30, 20) == 20);
}
