#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cdeforest/errors.hpp"
#include "cdeforest/loss.hpp"

using namespace cdeforest;

namespace {

EvalGrid line(double lo, double hi, std::size_t points) {
  std::vector<double> a{lo}, b{hi};
  return EvalGrid::uniform(a, b, points);
}

DensityEstimate tabulate(const EvalGrid& grid, double (*f)(double)) {
  DensityEstimate est{grid, std::vector<double>(grid.size()), {}};
  for (std::size_t g = 0; g < grid.size(); ++g) est.values[g] = f(grid.axis(0)[g]);
  return est;
}

double std_normal(double y) { return oracle::normal_pdf(y, 0.0, 1.0); }
double unit_uniform(double) { return 1.0; }

}  // namespace

TEST_CASE("uniform estimate on the unit interval has loss -1") {
  DensityEstimate est = tabulate(line(0.0, 1.0, 101), unit_uniform);
  Matrix y = Matrix::column_vector(std::vector<double>{0.1, 0.5, 0.77, 0.9});
  std::vector<DensityEstimate> all(4, est);
  LossReport r = cde_loss(all, y);
  CHECK(r.loss == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r.std_error == doctest::Approx(0.0).scale(1.0));
  CHECK(r.n_eval == 4);
  CHECK(r.coverage_warnings == 0);
}

TEST_CASE("integral of a squared standard normal") {
  DensityEstimate est = tabulate(line(-6.0, 6.0, 1000), std_normal);
  CHECK(integral_squared(est) == doctest::Approx(1.0 / (2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-4));
  std::vector<double> zeros(est.values.size(), 0.0);
  CHECK(integral_squared(est.grid, zeros) == 0.0);

  // Doubling the resolution barely moves a smooth integral.
  DensityEstimate fine = tabulate(line(-6.0, 6.0, 1999), std_normal);
  CHECK(std::abs(integral_squared(fine) - integral_squared(est)) < 1e-6);
}

TEST_CASE("the true density scores better than a flat one") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01(0.0, 1.0);
  const std::size_t m = 2000;
  Matrix y(m, 1);
  for (std::size_t i = 0; i < m; ++i) y(i, 0) = n01(gen);
  EvalGrid grid = line(-8.0, 8.0, 1601);
  DensityEstimate truth = tabulate(grid, std_normal);
  DensityEstimate flat{grid, std::vector<double>(grid.size(), 1.0 / 16.0), {}};
  std::vector<DensityEstimate> a(m, truth), b(m, flat);
  LossReport good = cde_loss(a, y);
  LossReport bad = cde_loss(b, y);
  CHECK(good.loss < bad.loss - 5 * (good.std_error + bad.std_error));
  // Expected loss of the truth is -int p^2.
  CHECK(good.loss == doctest::Approx(-0.28209479).epsilon(0.05));
}

TEST_CASE("loss is order invariant") {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> noise(0.0, 3.0);
  std::vector<LossContribution> c(500);
  for (auto& v : c) v.value = noise(gen) * std::pow(10.0, static_cast<int>(gen() % 8) - 4);
  LossReport a = summarize(c);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(c.begin(), c.end(), gen);
    LossReport b = summarize(c);
    CHECK(a.loss == b.loss);
  }
}

TEST_CASE("standard error and minimum size") {
  std::vector<LossContribution> c{{1.0, false}, {2.0, false}, {4.0, true}};
  LossReport r = summarize(c);
  CHECK(r.loss == doctest::Approx(7.0 / 3.0));
  const double sd = std::sqrt(((1 - 7.0 / 3) * (1 - 7.0 / 3) + (2 - 7.0 / 3) * (2 - 7.0 / 3) +
                               (4 - 7.0 / 3) * (4 - 7.0 / 3)) /
                              2.0);
  CHECK(r.std_error == doctest::Approx(sd / std::sqrt(3.0)));
  CHECK(r.coverage_warnings == 1);
  CHECK_THROWS_AS(summarize(std::span(c).first(1)), DomainError);
}

TEST_CASE("points outside the grid are clamped and flagged") {
  EvalGrid grid = line(0.0, 1.0, 11);
  std::vector<double> v(11);
  for (std::size_t g = 0; g < 11; ++g) v[g] = static_cast<double>(g);
  bool outside = false;
  CHECK(interpolate(grid, v, std::vector<double>{0.55}, &outside) == doctest::Approx(5.5));
  CHECK_FALSE(outside);
  CHECK(interpolate(grid, v, std::vector<double>{2.0}, &outside) == 10.0);
  CHECK(outside);
  CHECK(interpolate(grid, v, std::vector<double>{-1.0}, &outside) == 0.0);
  CHECK(outside);
  CHECK(interpolate(grid, v, std::vector<double>{1.0}, &outside) == 10.0);
  CHECK_FALSE(outside);
}

TEST_CASE("multilinear interpolation reproduces bilinear functions") {
  EvalGrid grid({{0.0, 0.5, 2.0}, {-1.0, 0.0, 1.0, 3.0}});
  auto f = [](double a, double b) { return 1.0 + 2.0 * a - b + 0.5 * a * b; };
  std::vector<double> v(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto p = grid.point(g);
    v[g] = f(p[0], p[1]);
  }
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> ua(0.0, 2.0), ub(-1.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double a = ua(gen), b = ub(gen);
    CHECK(interpolate(grid, v, std::vector<double>{a, b}) == doctest::Approx(f(a, b)).epsilon(1e-12));
  }
  // The trapezoid rule is exact for bilinear integrands.
  const double exact = oracle::simpson(
      [&](double a) {
        return oracle::simpson([&](double b) { return f(a, b); }, -1.0, 3.0, 2);
      },
      0.0, 2.0, 2);
  CHECK(integrate(grid, v) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("estimate count must match responses") {
  DensityEstimate est = tabulate(line(0.0, 1.0, 11), unit_uniform);
  std::vector<DensityEstimate> one(1, est);
  CHECK_THROWS_AS(cde_loss(one, Matrix(2, 1)), DomainError);
}
