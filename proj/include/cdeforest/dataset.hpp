#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cdeforest/functional.hpp"
#include "cdeforest/matrix.hpp"

namespace cdeforest {

/// Covariates, responses and optional functional covariate blocks, row-aligned.
struct Dataset {
  Matrix covariates;
  Matrix responses;
  std::vector<FunctionalBlock> functional;
  std::vector<std::string> covariate_names;
  std::vector<std::string> response_names;

  std::size_t rows() const { return responses.rows(); }
  /// Throws DomainError when row counts, names or blocks are inconsistent.
  void validate() const;
};

/// One query point: scalar covariates plus one curve per functional block.
struct CovariateRow {
  std::span<const double> scalars;
  std::vector<std::span<const double>> curves;
};

CovariateRow covariate_row(const Dataset& data, std::size_t row);

/// Vector treatment of functional data: each curve evaluation becomes an
/// ordinary covariate, placed before the scalar covariates.
Dataset flatten_functional(const Dataset& data);

}  // namespace cdeforest
