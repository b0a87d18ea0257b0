#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cdeforest/dataset.hpp"
#include "cdeforest/forest.hpp"
#include "cdeforest/matrix.hpp"

namespace cdeforest {

/// Numeric CSV with a header row.
struct CsvTable {
  std::vector<std::string> header;
  Matrix values;

  /// Index of a named column; throws ParseError naming the column.
  std::size_t column_index(const std::string& name) const;
};

/// Parses numeric CSV. Throws ParseError with the offending line number.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values);

/// Splits a table into covariates (every non-response column, in file order)
/// and the named response columns.
Dataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& responses);

/// Selects named covariate columns; responses are taken when present.
Dataset dataset_for_model(const CsvTable& table, const std::vector<std::string>& covariates,
                          const std::vector<std::string>& responses, bool require_responses);

/// Wide curve CSV (one row per curve) plus a domain sidecar holding one
/// domain point per row in its first column.
FunctionalBlock read_functional_block(const std::string& values_path,
                                      const std::string& domain_path);
void write_functional_block(const std::string& values_path, const std::string& domain_path,
                            const FunctionalBlock& block);

/// Versioned little-endian binary container: 8-byte magic, uint32 version,
/// then config, names, scaler, training responses, functional layout and trees.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(std::ostream& out, const Forest& forest);
void save_model(const std::string& path, const Forest& forest);
/// Throws FormatError for a bad magic, truncation, or a newer format version.
Forest load_model(std::istream& in);
Forest load_model(const std::string& path);

}  // namespace cdeforest
