#include "cdeforest/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cdeforest/errors.hpp"

namespace cdeforest {

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

namespace {

std::string trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no, std::size_t col) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("line " + std::to_string(line_no) + ": column " + std::to_string(col + 1) +
                     " is not a number: '" + field + "'");
  }
  return value;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

// --- binary helpers ---------------------------------------------------------

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void pod(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  template <typename T>
  void array(const std::vector<T>& values) {
    pod<std::uint64_t>(values.size());
    if (!values.empty()) {
      out_.write(reinterpret_cast<const char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(T)));
    }
  }
  void string(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void strings(const std::vector<std::string>& items) {
    pod<std::uint64_t>(items.size());
    for (const auto& s : items) string(s);
  }
  void matrix(const Matrix& m) {
    pod<std::uint64_t>(m.rows());
    pod<std::uint64_t>(m.cols());
    array(m.data());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T pod() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw FormatError("model file is truncated");
    return value;
  }
  std::uint64_t count() {
    const auto n = pod<std::uint64_t>();
    if (n > (std::uint64_t{1} << 40)) throw FormatError("model file has an implausible length");
    return n;
  }
  template <typename T>
  std::vector<T> array() {
    const auto n = count();
    std::vector<T> values(n);
    if (n > 0) {
      in_.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(T)));
      if (!in_) throw FormatError("model file is truncated");
    }
    return values;
  }
  std::string string() {
    const auto n = count();
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw FormatError("model file is truncated");
    return s;
  }
  std::vector<std::string> strings() {
    const auto n = count();
    std::vector<std::string> items;
    for (std::uint64_t i = 0; i < n; ++i) items.push_back(string());
    return items;
  }
  Matrix matrix() {
    const auto rows = count();
    const auto cols = count();
    auto data = array<double>();
    if (data.size() != rows * cols) throw FormatError("matrix size mismatch in model file");
    return Matrix(rows, cols, std::move(data));
  }

 private:
  std::istream& in_;
};

constexpr char kMagic[8] = {'C', 'D', 'E', 'F', 'R', 'S', 'T', '\n'};

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("column '" + name + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      values.push_back(parse_number(fields[c], line_no, c));
    }
    ++rows;
  }
  if (!have_header) throw ParseError("line 1: missing header row");
  table.values = Matrix(rows, table.header.size(), std::move(values));
  return table;
}

CsvTable read_csv(const std::string& path) {
  auto in = open_in(path);
  try {
    return parse_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      out << (c ? "," : "") << format_double(values(r, c));
    }
    out << '\n';
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Matrix& values) {
  auto out = open_out(path);
  write_csv(out, header, values);
}

Dataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& responses) {
  std::vector<std::string> covariates;
  for (const auto& name : table.header) {
    if (std::find(responses.begin(), responses.end(), name) == responses.end()) {
      covariates.push_back(name);
    }
  }
  return dataset_for_model(table, covariates, responses, true);
}

Dataset dataset_for_model(const CsvTable& table, const std::vector<std::string>& covariates,
                          const std::vector<std::string>& responses, bool require_responses) {
  const std::size_t n = table.values.rows();
  Dataset data;
  data.covariate_names = covariates;
  data.covariates = Matrix(n, covariates.size());
  for (std::size_t c = 0; c < covariates.size(); ++c) {
    const std::size_t src = table.column_index(covariates[c]);
    for (std::size_t r = 0; r < n; ++r) data.covariates(r, c) = table.values(r, src);
  }

  bool have_all = true;
  for (const auto& name : responses) {
    if (std::find(table.header.begin(), table.header.end(), name) == table.header.end()) {
      if (require_responses) throw ParseError("response column '" + name + "' not found");
      have_all = false;
    }
  }
  if (have_all) {
    data.response_names = responses;
    data.responses = Matrix(n, responses.size());
    for (std::size_t c = 0; c < responses.size(); ++c) {
      const std::size_t src = table.column_index(responses[c]);
      for (std::size_t r = 0; r < n; ++r) data.responses(r, c) = table.values(r, src);
    }
  } else {
    data.responses = Matrix(n, 0);
  }
  return data;
}

FunctionalBlock read_functional_block(const std::string& values_path,
                                      const std::string& domain_path) {
  FunctionalBlock block;
  block.values = read_csv(values_path).values;
  const CsvTable domain = read_csv(domain_path);
  if (domain.values.cols() == 0) throw ParseError(domain_path + ": no domain column");
  block.domain_points = domain.values.column(0);
  block.validate();
  return block;
}

void write_functional_block(const std::string& values_path, const std::string& domain_path,
                            const FunctionalBlock& block) {
  std::vector<std::string> header;
  for (std::size_t k = 0; k < block.length(); ++k) header.push_back("f" + std::to_string(k));
  write_csv(values_path, header, block.values);
  write_csv(domain_path, {"domain"}, Matrix::column_vector(block.domain_points));
}

void save_model(std::ostream& out, const Forest& forest) {
  Writer w(out);
  out.write(kMagic, sizeof(kMagic));
  w.pod<std::uint32_t>(kModelFormatVersion);

  const ForestConfig& c = forest.config();
  w.pod<std::uint64_t>(c.n_trees);
  w.pod<std::uint64_t>(c.mtry);
  w.pod<std::uint64_t>(c.min_node_size);
  w.pod<std::int32_t>(c.n_basis);
  w.pod<std::uint8_t>(c.criterion == SplitCriterion::cde ? 0 : 1);
  w.pod<std::uint8_t>(c.bandwidth.kind == BandwidthPolicy::Kind::fixed ? 0 : 1);
  w.array(c.bandwidth.values);
  w.pod<double>(c.lambda);
  w.pod<std::uint64_t>(c.seed);

  w.strings(forest.covariate_names());
  w.strings(forest.response_names());
  w.pod<std::uint64_t>(forest.n_scalar());
  w.array(forest.scaler().mins());
  w.array(forest.scaler().maxs());
  w.matrix(forest.training_responses());

  const auto& layout = forest.functional_layout();
  w.pod<std::uint8_t>(layout ? 1 : 0);
  if (layout) {
    w.pod<std::uint64_t>(layout->domains.size());
    for (const auto& d : layout->domains) w.array(d);
    w.pod<std::uint64_t>(layout->n_scalar);
  }

  w.pod<std::uint64_t>(forest.trees().size());
  for (std::size_t t = 0; t < forest.trees().size(); ++t) {
    const Tree& tree = forest.trees()[t];
    w.pod<std::uint64_t>(tree.n_features());
    w.pod<std::uint8_t>(tree.criterion() == SplitCriterion::cde ? 0 : 1);
    w.pod<std::uint64_t>(tree.nodes().size());
    for (const Node& node : tree.nodes()) {
      w.pod(node.feature);
      w.pod(node.threshold);
      w.pod(node.left);
      w.pod(node.right);
      w.pod(node.member_begin);
      w.pod(node.member_end);
    }
    w.array(tree.members());
    w.array(tree.bootstrap_indices());
    if (layout) {
      for (const auto& partition : forest.partitions()[t]) {
        w.pod<std::uint64_t>(partition.size());
        for (const auto& iv : partition.intervals) {
          w.pod<std::uint64_t>(iv.first);
          w.pod<std::uint64_t>(iv.last);
        }
      }
    }
  }
  if (!out) throw Error("failed writing model");
}

void save_model(const std::string& path, const Forest& forest) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  save_model(out, forest);
}

Forest load_model(std::istream& in) {
  char magic[sizeof(kMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a model file (bad magic header)");
  }
  Reader r(in);
  const auto version = r.pod<std::uint32_t>();
  if (version > kModelFormatVersion) {
    throw FormatError("model format version " + std::to_string(version) +
                      " is newer than the supported version " +
                      std::to_string(kModelFormatVersion));
  }
  if (version == 0) throw FormatError("model format version 0 is invalid");

  ForestConfig c;
  c.n_trees = r.pod<std::uint64_t>();
  c.mtry = r.pod<std::uint64_t>();
  c.min_node_size = r.pod<std::uint64_t>();
  c.n_basis = r.pod<std::int32_t>();
  c.criterion = r.pod<std::uint8_t>() == 0 ? SplitCriterion::cde : SplitCriterion::mse;
  c.bandwidth.kind =
      r.pod<std::uint8_t>() == 0 ? BandwidthPolicy::Kind::fixed : BandwidthPolicy::Kind::plugin;
  c.bandwidth.values = r.array<double>();
  c.lambda = r.pod<double>();
  c.seed = r.pod<std::uint64_t>();

  auto covariate_names = r.strings();
  auto response_names = r.strings();
  const auto n_scalar = r.pod<std::uint64_t>();
  auto mins = r.array<double>();
  auto maxs = r.array<double>();
  Matrix responses = r.matrix();

  std::optional<FunctionalLayout> layout;
  if (r.pod<std::uint8_t>() != 0) {
    layout = FunctionalLayout{};
    const auto blocks = r.count();
    for (std::uint64_t b = 0; b < blocks; ++b) layout->domains.push_back(r.array<double>());
    layout->n_scalar = r.pod<std::uint64_t>();
  }

  const auto n_trees = r.count();
  std::vector<Tree> trees;
  std::vector<std::vector<DomainPartition>> partitions;
  for (std::uint64_t t = 0; t < n_trees; ++t) {
    const auto n_features = r.pod<std::uint64_t>();
    const auto criterion = r.pod<std::uint8_t>() == 0 ? SplitCriterion::cde : SplitCriterion::mse;
    const auto n_nodes = r.count();
    std::vector<Node> nodes(n_nodes);
    for (auto& node : nodes) {
      node.feature = r.pod<std::int32_t>();
      node.threshold = r.pod<double>();
      node.left = r.pod<std::uint32_t>();
      node.right = r.pod<std::uint32_t>();
      node.member_begin = r.pod<std::uint32_t>();
      node.member_end = r.pod<std::uint32_t>();
    }
    auto members = r.array<std::uint32_t>();
    auto bootstrap = r.array<std::uint32_t>();
    trees.emplace_back(std::move(nodes), std::move(members), std::move(bootstrap), criterion,
                       n_features);
    if (layout) {
      std::vector<DomainPartition> own;
      for (std::size_t b = 0; b < layout->domains.size(); ++b) {
        DomainPartition p;
        const auto k = r.count();
        for (std::uint64_t i = 0; i < k; ++i) {
          const auto first = r.pod<std::uint64_t>();
          const auto last = r.pod<std::uint64_t>();
          p.intervals.push_back({first, last});
        }
        own.push_back(std::move(p));
      }
      partitions.push_back(std::move(own));
    }
  }

  try {
    return Forest(c, ResponseScaler(std::move(mins), std::move(maxs)), std::move(responses),
                  std::move(trees), std::move(covariate_names), std::move(response_names),
                  n_scalar, std::move(layout), std::move(partitions));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("inconsistent model file: ") + e.what());
  }
}

Forest load_model(const std::string& path) {
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in) throw FormatError("cannot open model " + path);
  return load_model(in);
}

}  // namespace cdeforest
