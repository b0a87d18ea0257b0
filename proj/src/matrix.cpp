#include "cdeforest/matrix.hpp"

#include <string>

#include "cdeforest/errors.hpp"

namespace cdeforest {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DomainError("matrix data size does not match " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
}

Matrix Matrix::column_vector(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
  return out;
}

}  // namespace cdeforest
