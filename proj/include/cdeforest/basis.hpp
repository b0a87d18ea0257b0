#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdeforest/matrix.hpp"

namespace cdeforest {

enum class BasisFamily { cosine };

inline constexpr std::size_t kMaxTensorSize = 65536;
inline constexpr int kMaxResponseDims = 3;

/// Orthonormal basis on [0,1]^response_dims. For more than one response
/// dimension the basis is the tensor product of n_basis univariate functions
/// per dimension.
struct BasisSpec {
  BasisFamily family = BasisFamily::cosine;
  int n_basis = 15;
  int response_dims = 1;

  /// n_basis^response_dims.
  std::size_t total_size() const;
  /// Throws ConfigError when n_basis or response_dims is out of range.
  void validate() const;
};

/// phi_0(y) = 1, phi_j(y) = sqrt(2) cos(pi j y). Throws DomainError for y
/// outside [0,1] or negative j.
double cosine_eval(int j, double y);

/// Per-dimension min-max map of responses onto [0,1].
class ResponseScaler {
 public:
  ResponseScaler() = default;
  ResponseScaler(std::vector<double> mins, std::vector<double> maxs);

  std::size_t dims() const { return mins_.size(); }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }

  double scale(std::size_t dim, double y) const;
  double unscale(std::size_t dim, double u) const;
  /// Scaled value clamped to [0,1], for held-out responses that may fall
  /// outside the training range.
  double scale_clamped(std::size_t dim, double y) const;

  Matrix transform(const Matrix& responses, bool clamp = false) const;
  Matrix inverse_transform(const Matrix& scaled) const;

  bool operator==(const ResponseScaler&) const = default;

 private:
  std::vector<double> mins_;
  std::vector<double> maxs_;
};

/// Fits min-max scaling per column. Throws FitError for fewer than two rows
/// or a constant column (the message names the column index).
ResponseScaler fit_scaler(const Matrix& responses);

/// n x J matrix of basis evaluations phi_j(y_i).
class BasisMatrix {
 public:
  BasisMatrix(Matrix values, BasisSpec spec) : values_(std::move(values)), spec_(spec) {}

  const Matrix& values() const { return values_; }
  const BasisSpec& spec() const { return spec_; }
  std::size_t rows() const { return values_.rows(); }
  std::size_t size() const { return values_.cols(); }

  /// Column sums S_j over the given rows.
  std::vector<double> coefficient_sums(std::span<const std::size_t> rows) const;
  /// Empirical coefficients beta_j = (1/n) sum_i phi_j(y_i) over all rows.
  std::vector<double> coefficient_means() const;

 private:
  Matrix values_;
  BasisSpec spec_;
};

/// Evaluates every basis function (tensor products in row-major order over
/// the per-dimension indices) at one point of [0,1]^r.
void basis_row(std::span<const double> point, const BasisSpec& spec, std::span<double> out);

/// Basis evaluations for each row of scaled_responses. Throws DomainError
/// for entries outside [0,1] or a column count that disagrees with spec.
BasisMatrix basis_matrix(const Matrix& scaled_responses, const BasisSpec& spec);

/// Orthogonal series density sum_j coefs[j] phi_j(point).
double series_density(std::span<const double> coefs, const BasisSpec& spec,
                      std::span<const double> point);

}  // namespace cdeforest
