#include "cdeforest/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cdeforest/errors.hpp"

namespace cdeforest {

std::size_t BasisSpec::total_size() const {
  std::size_t total = 1;
  for (int d = 0; d < response_dims; ++d) total *= static_cast<std::size_t>(n_basis);
  return total;
}

void BasisSpec::validate() const {
  if (n_basis < 1) throw ConfigError("n_basis must be at least 1");
  if (response_dims < 1 || response_dims > kMaxResponseDims) {
    throw ConfigError("response dimension must be between 1 and 3, got " +
                      std::to_string(response_dims));
  }
  // Guard the product against overflow before comparing.
  double total = std::pow(static_cast<double>(n_basis), response_dims);
  if (total > static_cast<double>(kMaxTensorSize)) {
    throw ConfigError("tensor basis size " + std::to_string(static_cast<long long>(total)) +
                      " exceeds limit of " + std::to_string(kMaxTensorSize));
  }
}

double cosine_eval(int j, double y) {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw DomainError("cosine basis argument outside [0,1]: " + std::to_string(y));
  }
  if (j < 0) throw DomainError("basis index must be non-negative");
  if (j == 0) return 1.0;
  return std::numbers::sqrt2 * std::cos(std::numbers::pi * j * y);
}

ResponseScaler::ResponseScaler(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  if (mins_.size() != maxs_.size()) throw DomainError("scaler bounds have different lengths");
  for (std::size_t d = 0; d < mins_.size(); ++d) {
    if (!(maxs_[d] > mins_[d])) {
      throw FitError("response dimension " + std::to_string(d) + " has max <= min");
    }
  }
}

double ResponseScaler::scale(std::size_t dim, double y) const {
  return (y - mins_[dim]) / (maxs_[dim] - mins_[dim]);
}

double ResponseScaler::unscale(std::size_t dim, double u) const {
  return mins_[dim] + u * (maxs_[dim] - mins_[dim]);
}

double ResponseScaler::scale_clamped(std::size_t dim, double y) const {
  return std::clamp(scale(dim, y), 0.0, 1.0);
}

Matrix ResponseScaler::transform(const Matrix& responses, bool clamp) const {
  if (responses.cols() != dims()) throw DomainError("response dimension mismatch in scaler");
  Matrix out(responses.rows(), responses.cols());
  for (std::size_t i = 0; i < responses.rows(); ++i) {
    for (std::size_t d = 0; d < dims(); ++d) {
      out(i, d) = clamp ? scale_clamped(d, responses(i, d)) : scale(d, responses(i, d));
    }
  }
  return out;
}

Matrix ResponseScaler::inverse_transform(const Matrix& scaled) const {
  if (scaled.cols() != dims()) throw DomainError("response dimension mismatch in scaler");
  Matrix out(scaled.rows(), scaled.cols());
  for (std::size_t i = 0; i < scaled.rows(); ++i) {
    for (std::size_t d = 0; d < dims(); ++d) out(i, d) = unscale(d, scaled(i, d));
  }
  return out;
}

ResponseScaler fit_scaler(const Matrix& responses) {
  if (responses.rows() < 2) throw FitError("at least two rows are required to fit responses");
  std::vector<double> mins(responses.cols());
  std::vector<double> maxs(responses.cols());
  for (std::size_t d = 0; d < responses.cols(); ++d) {
    auto col = responses.column(d);
    auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (!std::isfinite(*lo) || !std::isfinite(*hi)) {
      throw FitError("response dimension " + std::to_string(d) + " has non-finite values");
    }
    if (!(*hi > *lo)) {
      throw FitError("response dimension " + std::to_string(d) + " is constant");
    }
    mins[d] = *lo;
    maxs[d] = *hi;
  }
  return ResponseScaler(std::move(mins), std::move(maxs));
}

std::vector<double> BasisMatrix::coefficient_sums(std::span<const std::size_t> rows) const {
  std::vector<double> sums(size(), 0.0);
  for (std::size_t r : rows) {
    auto row = values_.row(r);
    for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += row[j];
  }
  return sums;
}

std::vector<double> BasisMatrix::coefficient_means() const {
  std::vector<double> means(size(), 0.0);
  for (std::size_t r = 0; r < rows(); ++r) {
    auto row = values_.row(r);
    for (std::size_t j = 0; j < means.size(); ++j) means[j] += row[j];
  }
  if (rows() > 0) {
    for (double& m : means) m /= static_cast<double>(rows());
  }
  return means;
}

void basis_row(std::span<const double> point, const BasisSpec& spec, std::span<double> out) {
  const auto dims = static_cast<std::size_t>(spec.response_dims);
  const auto nb = static_cast<std::size_t>(spec.n_basis);
  if (point.size() != dims) throw DomainError("point dimension does not match basis");
  if (out.size() != spec.total_size()) throw DomainError("output size does not match basis");

  // Univariate evaluations, then row-major tensor products (last index fastest).
  std::vector<double> uni(dims * nb);
  for (std::size_t d = 0; d < dims; ++d) {
    for (std::size_t j = 0; j < nb; ++j) uni[d * nb + j] = cosine_eval(static_cast<int>(j), point[d]);
  }
  out[0] = 1.0;
  std::size_t filled = 1;
  for (std::size_t d = 0; d < dims; ++d) {
    // Expand in place from the back so earlier products are not overwritten.
    for (std::size_t k = filled; k-- > 0;) {
      const double prefix = out[k];
      for (std::size_t j = nb; j-- > 0;) out[k * nb + j] = prefix * uni[d * nb + j];
    }
    filled *= nb;
  }
}

BasisMatrix basis_matrix(const Matrix& scaled_responses, const BasisSpec& spec) {
  spec.validate();
  if (scaled_responses.cols() != static_cast<std::size_t>(spec.response_dims)) {
    throw DomainError("response matrix has " + std::to_string(scaled_responses.cols()) +
                      " columns, basis expects " + std::to_string(spec.response_dims));
  }
  Matrix values(scaled_responses.rows(), spec.total_size());
  for (std::size_t i = 0; i < scaled_responses.rows(); ++i) {
    basis_row(scaled_responses.row(i), spec, values.row(i));
  }
  return BasisMatrix(std::move(values), spec);
}

double series_density(std::span<const double> coefs, const BasisSpec& spec,
                      std::span<const double> point) {
  std::vector<double> row(spec.total_size());
  basis_row(point, spec, row);
  if (coefs.size() != row.size()) throw DomainError("coefficient count does not match basis");
  double total = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) total += coefs[j] * row[j];
  return total;
}

}  // namespace cdeforest
