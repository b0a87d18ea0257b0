#include "cdeforest/dataset.hpp"

#include "cdeforest/errors.hpp"

namespace cdeforest {

void Dataset::validate() const {
  const std::size_t n = responses.rows();
  if (covariates.rows() != n && !(covariates.cols() == 0 && covariates.rows() == 0)) {
    throw DomainError("covariates have " + std::to_string(covariates.rows()) +
                      " rows but responses have " + std::to_string(n));
  }
  if (!covariate_names.empty() && covariate_names.size() != covariates.cols()) {
    throw DomainError("covariate names do not match covariate columns");
  }
  if (!response_names.empty() && response_names.size() != responses.cols()) {
    throw DomainError("response names do not match response columns");
  }
  for (std::size_t b = 0; b < functional.size(); ++b) {
    functional[b].validate();
    if (functional[b].values.rows() != n) {
      throw DomainError("functional block " + std::to_string(b) + " has " +
                        std::to_string(functional[b].values.rows()) + " curves, expected " +
                        std::to_string(n));
    }
  }
  if (covariates.cols() == 0 && functional.empty()) throw DomainError("dataset has no covariates");
}

CovariateRow covariate_row(const Dataset& data, std::size_t row) {
  CovariateRow out;
  if (data.covariates.cols() > 0) out.scalars = data.covariates.row(row);
  for (const auto& block : data.functional) out.curves.push_back(block.values.row(row));
  return out;
}

Dataset flatten_functional(const Dataset& data) {
  std::size_t width = data.covariates.cols();
  for (const auto& block : data.functional) width += block.length();
  const std::size_t n = data.rows();

  Dataset out;
  out.responses = data.responses;
  out.response_names = data.response_names;
  out.covariates = Matrix(n, width);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t c = 0;
    for (const auto& block : data.functional) {
      for (double v : block.values.row(r)) out.covariates(r, c++) = v;
    }
    if (data.covariates.cols() > 0) {
      for (double v : data.covariates.row(r)) out.covariates(r, c++) = v;
    }
  }
  for (std::size_t b = 0; b < data.functional.size(); ++b) {
    for (std::size_t k = 0; k < data.functional[b].length(); ++k) {
      out.covariate_names.push_back("f" + std::to_string(b) + "_" + std::to_string(k));
    }
  }
  out.covariate_names.insert(out.covariate_names.end(), data.covariate_names.begin(),
                             data.covariate_names.end());
  if (out.covariate_names.size() != width) out.covariate_names.clear();
  return out;
}

}  // namespace cdeforest
