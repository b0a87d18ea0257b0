#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "cdeforest/basis.hpp"
#include "cdeforest/density.hpp"
#include "cdeforest/errors.hpp"
#include "cdeforest/loss.hpp"

using namespace cdeforest;

TEST_CASE("cosine basis values") {
  CHECK(cosine_eval(0, 0.3) == 1.0);
  CHECK(std::abs(cosine_eval(1, 0.5)) < 1e-15);
  // sqrt(2) cos(pi) to double precision.
  CHECK(cosine_eval(2, 0.5) == doctest::Approx(-1.4142135623730951).epsilon(1e-15));
  CHECK(cosine_eval(3, 0.0) == doctest::Approx(std::numbers::sqrt2));
  CHECK_THROWS_AS(cosine_eval(1, -0.01), DomainError);
  CHECK_THROWS_AS(cosine_eval(1, 1.01), DomainError);
  CHECK_THROWS_AS(cosine_eval(1, std::nan("")), DomainError);
}

TEST_CASE("basis spec limits") {
  CHECK_NOTHROW((BasisSpec{BasisFamily::cosine, 256, 2}.validate()));
  CHECK_THROWS_AS((BasisSpec{BasisFamily::cosine, 257, 2}.validate()), ConfigError);
  CHECK_THROWS_AS((BasisSpec{BasisFamily::cosine, 0, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((BasisSpec{BasisFamily::cosine, 2, 4}.validate()), ConfigError);
  CHECK(BasisSpec{BasisFamily::cosine, 5, 3}.total_size() == 125);
}

TEST_CASE("min-max scaler") {
  Matrix col = Matrix::column_vector(std::vector<double>{2, 4, 6});
  ResponseScaler scaler = fit_scaler(col);
  CHECK(scaler.mins()[0] == 2.0);
  CHECK(scaler.maxs()[0] == 6.0);
  Matrix scaled = scaler.transform(col);
  CHECK(scaled(0, 0) == 0.0);
  CHECK(scaled(1, 0) == 0.5);
  CHECK(scaled(2, 0) == 1.0);

  Matrix unit = Matrix::column_vector(std::vector<double>{0, 0.25, 1});
  CHECK(fit_scaler(unit).transform(unit) == unit);

  Matrix constant(3, 2, 5.0);
  constant(1, 0) = 1.0;
  try {
    fit_scaler(constant);
    FAIL("constant column accepted");
  } catch (const FitError& e) {
    CHECK(std::string(e.what()).find("dimension 1") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_scaler(Matrix(1, 1, 0.0)), FitError);

  SUBCASE("held-out values are clamped on request") {
    CHECK(scaler.scale_clamped(0, 7.0) == 1.0);
    CHECK(scaler.scale_clamped(0, 1.0) == 0.0);
    CHECK(scaler.scale(0, 7.0) == 1.25);
  }
}

TEST_CASE("scaler round trip is the identity") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> value(3.0, 40.0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m(20, 3);
    for (double& v : m.data()) v = value(rng);
    ResponseScaler s = fit_scaler(m);
    Matrix back = s.inverse_transform(s.transform(m));
    for (std::size_t i = 0; i < m.data().size(); ++i) {
      const double a = m.data()[i];
      CHECK(std::abs(back.data()[i] - a) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("basis matrix rows") {
  BasisSpec one{BasisFamily::cosine, 3, 1};
  BasisMatrix b = basis_matrix(Matrix(1, 1, 0.0), one);
  CHECK(b.values()(0, 0) == 1.0);
  CHECK(b.values()(0, 1) == doctest::Approx(std::numbers::sqrt2));
  CHECK(b.values()(0, 2) == doctest::Approx(std::numbers::sqrt2));

  BasisSpec two{BasisFamily::cosine, 2, 2};
  BasisMatrix t = basis_matrix(Matrix(1, 2, 0.5), two);
  CHECK(t.values()(0, 0) == 1.0);
  for (int j = 1; j < 4; ++j) CHECK(std::abs(t.values()(0, j)) < 1e-15);

  // Row-major order: index = j1 * n_basis + j2.
  Matrix point(1, 2);
  point(0, 0) = 0.2;
  point(0, 1) = 0.7;
  BasisSpec three{BasisFamily::cosine, 3, 2};
  BasisMatrix rm = basis_matrix(point, three);
  for (int j1 = 0; j1 < 3; ++j1) {
    for (int j2 = 0; j2 < 3; ++j2) {
      CHECK(rm.values()(0, j1 * 3 + j2) ==
            doctest::Approx(cosine_eval(j1, 0.2) * cosine_eval(j2, 0.7)).epsilon(1e-14));
    }
  }

  CHECK_THROWS_AS(basis_matrix(Matrix(1, 1, 1.2), one), DomainError);
  CHECK_THROWS_AS(basis_matrix(Matrix(1, 2, 0.5), one), DomainError);
}

TEST_CASE("basis matrix invariants on random samples") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int dims = 1; dims <= 3; ++dims) {
    Matrix y(50, dims);
    for (double& v : y.data()) v = u(rng);
    BasisMatrix b = basis_matrix(y, BasisSpec{BasisFamily::cosine, 6, dims});
    const double bound = std::pow(std::numbers::sqrt2, dims) + 1e-12;
    for (std::size_t i = 0; i < y.rows(); ++i) {
      CHECK(b.values()(i, 0) == 1.0);
      for (double v : b.values().row(i)) CHECK(std::abs(v) <= bound);
    }
  }
}

TEST_CASE("cosine basis is orthonormal on [0,1]") {
  const std::size_t points = 10001;
  std::vector<std::vector<double>> phi(30, std::vector<double>(points));
  for (int j = 0; j < 30; ++j) {
    for (std::size_t k = 0; k < points; ++k) {
      phi[j][k] = cosine_eval(j, static_cast<double>(k) / (points - 1));
    }
  }
  const double h = 1.0 / (points - 1);
  double worst = 0.0;
  for (int j = 0; j < 30; ++j) {
    for (int k = 0; k < 30; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < points; ++i) {
        const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        s += w * phi[j][i] * phi[k][i];
      }
      worst = std::max(worst, std::abs(s * h - (j == k ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("Parseval: squared norm of a series density equals sum of squared coefficients") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 300);
  std::uniform_int_distribution<int> nb(1, 31);
  const EvalGrid grid = EvalGrid::uniform(std::vector<double>{0.0}, std::vector<double>{1.0}, 10001);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix y(size(rng), 1);
    for (double& v : y.data()) v = u(rng) * u(rng);
    BasisSpec spec{BasisFamily::cosine, nb(rng), 1};
    auto beta = basis_matrix(y, spec).coefficient_means();
    std::vector<double> values(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      values[g] = series_density(beta, spec, grid.point(g));
    }
    double sum_sq = 0.0;
    for (double b : beta) sum_sq += b * b;
    CHECK(std::abs(integral_squared(grid, values) - sum_sq) < 1e-6);
  }
}

TEST_CASE("tensor coefficients factor over independent dimensions") {
  // One deterministic point: each tensor coefficient is the product itself.
  Matrix point(1, 2);
  point(0, 0) = 0.3;
  point(0, 1) = 0.85;
  BasisSpec spec{BasisFamily::cosine, 5, 2};
  auto tensor = basis_matrix(point, spec).coefficient_means();
  for (int j1 = 0; j1 < 5; ++j1) {
    for (int j2 = 0; j2 < 5; ++j2) {
      CHECK(tensor[j1 * 5 + j2] == cosine_eval(j1, 0.3) * cosine_eval(j2, 0.85));
    }
  }

  // Cartesian product sample: tensor means equal products of marginal means.
  const std::vector<double> a{0.1, 0.4, 0.45, 0.9};
  const std::vector<double> b{0.2, 0.3, 0.77};
  Matrix grid(a.size() * b.size(), 2);
  std::size_t r = 0;
  for (double va : a) {
    for (double vb : b) {
      grid(r, 0) = va;
      grid(r++, 1) = vb;
    }
  }
  auto joint = basis_matrix(grid, spec).coefficient_means();
  BasisSpec uni{BasisFamily::cosine, 5, 1};
  auto ma = basis_matrix(Matrix::column_vector(a), uni).coefficient_means();
  auto mb = basis_matrix(Matrix::column_vector(b), uni).coefficient_means();
  for (int j1 = 0; j1 < 5; ++j1) {
    for (int j2 = 0; j2 < 5; ++j2) {
      CHECK(std::abs(joint[j1 * 5 + j2] - ma[j1] * mb[j2]) < 1e-14);
    }
  }
}
