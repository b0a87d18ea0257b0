#include "cdeforest/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdeforest/density.hpp"
#include "cdeforest/errors.hpp"
#include "cdeforest/io.hpp"

namespace cdeforest {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_seconds(double seconds) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << seconds;
  return os.str();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("invalid ") + what + " '" + text + "'");
    }
  }
  return out;
}

struct FunctionalInputs {
  std::vector<std::string> values;
  std::vector<std::string> domains;

  void attach(Dataset& data) const {
    if (values.size() != domains.size()) {
      throw ConfigError("each --functional block needs a matching --domain file");
    }
    for (std::size_t b = 0; b < values.size(); ++b) {
      data.functional.push_back(read_functional_block(values[b], domains[b]));
    }
  }
};

void add_functional_options(CLI::App* cmd, FunctionalInputs& inputs) {
  cmd->add_option("--functional", inputs.values, "Wide CSV of curves (one row per curve)");
  cmd->add_option("--domain", inputs.domains, "Domain points of the matching --functional block");
}

// Query dataset aligned to a model's covariate layout.
Dataset load_queries(const Forest& forest, const std::string& data_path,
                     const FunctionalInputs& functional, bool require_responses) {
  Dataset data;
  if (!data_path.empty()) {
    CsvTable table = read_csv(data_path);
    data = dataset_for_model(table, forest.covariate_names(), forest.response_names(),
                             require_responses);
  } else if (forest.n_scalar() > 0 || require_responses) {
    throw ConfigError("--data is required for this model");
  }
  functional.attach(data);
  const std::size_t expected_blocks =
      forest.functional_layout() ? forest.functional_layout()->domains.size() : 0;
  if (data.functional.size() != expected_blocks) {
    throw DomainError("model expects " + std::to_string(expected_blocks) +
                      " functional blocks, got " + std::to_string(data.functional.size()));
  }
  if (data_path.empty()) {
    const std::size_t n = data.functional.empty() ? 0 : data.functional[0].values.rows();
    data.covariates = Matrix(n, 0);
    data.responses = Matrix(n, 0);
  }
  for (const auto& block : data.functional) {
    if (block.values.rows() != data.covariates.rows()) {
      throw DomainError("functional block rows do not match the query rows");
    }
  }
  return data;
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  file.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  return file;
}

struct TrainArgs {
  std::string data;
  std::vector<std::string> responses;
  FunctionalInputs functional;
  std::string out;
  std::string bandwidth = "0.2";
  std::string criterion = "cde";
  ForestConfig config;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  ForestConfig config = a.config;
  config.criterion = parse_criterion(a.criterion);
  config.bandwidth = BandwidthPolicy::parse(a.bandwidth);

  CsvTable table = read_csv(a.data);
  Dataset data = dataset_from_table(table, a.responses);
  a.functional.attach(data);

  const auto start = Clock::now();
  Forest forest = train(data, config);
  const double elapsed = seconds_since(start);
  save_model(a.out, forest);

  nlohmann::ordered_json line;
  line["command"] = "train";
  line["train_time"] = round_seconds(elapsed);
  line["n_rows"] = data.rows();
  line["n_trees"] = config.n_trees;
  line["mtry"] = config.mtry;
  line["min_node_size"] = config.min_node_size;
  line["n_basis"] = config.n_basis;
  line["criterion"] = to_string(config.criterion);
  line["bandwidth"] = config.bandwidth.to_string();
  line["lambda"] = config.lambda;
  line["seed"] = config.seed;
  line["functional_blocks"] = data.functional.size();
  line["out"] = a.out;
  out << line.dump() << '\n';
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string data;
  FunctionalInputs functional;
  std::string bandwidth;
  std::string grid_min;
  std::string grid_max;
  std::size_t grid_points = 0;
  std::string out;
};

BandwidthPolicy policy_for(const Forest& forest, const std::string& flag) {
  return flag.empty() ? forest.config().bandwidth : BandwidthPolicy::parse(flag);
}

int cmd_predict(const PredictArgs& a, std::ostream& stdout_stream) {
  Forest forest = load_model(a.model);
  Dataset queries = load_queries(forest, a.data, a.functional, false);
  const BandwidthPolicy policy = policy_for(forest, a.bandwidth);
  const std::size_t dims = forest.response_dims();

  std::optional<EvalGrid> grid;
  if (!a.grid_min.empty() || !a.grid_max.empty()) {
    if (a.grid_min.empty() || a.grid_max.empty()) {
      throw ConfigError("--grid-min and --grid-max must be given together");
    }
    auto lo = parse_list(a.grid_min, "--grid-min");
    auto hi = parse_list(a.grid_max, "--grid-max");
    if (lo.size() != dims || hi.size() != dims) {
      throw ConfigError("grid bounds need one value per response dimension");
    }
    std::size_t points = a.grid_points ? a.grid_points : (dims >= 3 ? 101 : 1000);
    grid = EvalGrid::uniform(lo, hi, points);
  }

  const std::size_t n = queries.covariates.rows();
  std::vector<DensityEstimate> estimates(n);
  parallel_for(n, [&](std::size_t i) {
    estimates[i] = predict(forest, covariate_row(queries, i), grid, policy, a.grid_points);
  });

  std::ofstream file;
  std::ostream& out = open_output(a.out, file, stdout_stream);
  out << "query_id";
  if (dims == 1) {
    out << ",y";
  } else {
    for (std::size_t d = 0; d < dims; ++d) out << ",y" << d + 1;
  }
  out << ",density\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& est = estimates[i];
    for (std::size_t g = 0; g < est.values.size(); ++g) {
      out << i;
      for (double y : est.grid.point(g)) out << ',' << format_double(y);
      out << ',' << format_double(est.values[g]) << '\n';
    }
  }
  return 0;
}

struct EvaluateArgs {
  std::string model;
  std::string data;
  FunctionalInputs functional;
  std::string bandwidth;
  std::size_t grid_points = 0;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  Forest forest = load_model(a.model);
  Dataset test = load_queries(forest, a.data, a.functional, true);
  if (test.rows() == 0) throw DomainError("test file has no rows");
  Evaluation result = evaluate(forest, test, policy_for(forest, a.bandwidth), a.grid_points);

  nlohmann::ordered_json line;
  line["loss"] = result.report.loss;
  line["se"] = result.report.std_error;
  line["n_eval"] = result.report.n_eval;
  line["coverage_warnings"] = result.report.coverage_warnings;
  line["predict_wall_time"] = round_seconds(result.predict_seconds);
  out << line.dump() << '\n';
  return 0;
}

struct BenchArgs {
  std::string variant = "multimodal_s31";
  std::string sizes = "1000";
  std::size_t seeds = 1;
  std::uint64_t base_seed = 0;
  std::size_t n_test = 1000;
  std::size_t ntrees = 0;
  std::size_t mtry = 0;
  int nbasis = 0;
  std::size_t min_node_size = 0;
  std::string bandwidth;
  double lambda = 0.0;
  double sigma = 0.0;
  std::size_t grid_points = 0;
  bool no_timing = false;
  std::string out;
};

int cmd_bench(const BenchArgs& a, std::ostream& stdout_stream) {
  BenchOptions options = bench_defaults(parse_variant(a.variant));
  options.sizes.clear();
  for (double s : parse_list(a.sizes, "--sizes")) {
    if (!(s >= 1.0) || s != std::floor(s)) throw ConfigError("sizes must be positive integers");
    options.sizes.push_back(static_cast<std::size_t>(s));
  }
  if (a.seeds == 0) throw ConfigError("--seeds must be at least 1");
  options.seeds = a.seeds;
  options.base_seed = a.base_seed;
  options.n_test = a.n_test;
  if (a.ntrees) options.config.n_trees = a.ntrees;
  if (a.mtry) options.config.mtry = a.mtry;
  if (a.nbasis) options.config.n_basis = a.nbasis;
  if (a.min_node_size) options.config.min_node_size = a.min_node_size;
  if (a.lambda > 0.0) options.config.lambda = a.lambda;
  if (a.sigma > 0.0) options.sigma = a.sigma;
  if (!a.bandwidth.empty()) options.bandwidth = BandwidthPolicy::parse(a.bandwidth);
  if (a.grid_points) options.grid_points = a.grid_points;

  auto rows = run_bench(options);
  std::ofstream file;
  std::ostream& out = open_output(a.out, file, stdout_stream);
  write_bench_csv(out, rows, !a.no_timing);
  return 0;
}

struct DemoArgs {
  DemoSplitOptions options;
  std::string out;
};

int cmd_demo_split(const DemoArgs& a, std::ostream& stdout_stream) {
  auto cuts = demo_split_losses(a.options);
  std::ofstream file;
  std::ostream& out = open_output(a.out, file, stdout_stream);
  out << "cutpoint,cde_loss,mse_loss\n";
  for (const auto& c : cuts) {
    out << format_double(c.cutpoint) << ',' << format_double(c.cde_loss) << ','
        << format_double(c.mse_loss) << '\n';
  }
  return 0;
}

struct GenerateArgs {
  std::string variant = "multimodal_s31";
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  std::string out;
  std::string functional_out;
  std::string domain_out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& stdout_stream) {
  SyntheticConfig config;
  config.variant = parse_variant(a.variant);
  config.n = a.n;
  config.seed = a.seed;
  config.sigma = a.sigma > 0.0 ? a.sigma : default_sigma(config.variant);
  Dataset data = generate(config);

  std::vector<std::string> header = data.covariate_names;
  header.insert(header.end(), data.response_names.begin(), data.response_names.end());
  Matrix table(data.rows(), header.size());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < data.covariates.cols(); ++k) table(r, c++) = data.covariates(r, k);
    for (std::size_t k = 0; k < data.responses.cols(); ++k) table(r, c++) = data.responses(r, k);
  }
  std::ofstream file;
  std::ostream& out = open_output(a.out, file, stdout_stream);
  write_csv(out, header, table);

  if (!data.functional.empty()) {
    if (a.functional_out.empty() || a.domain_out.empty()) {
      throw ConfigError("the functional variant needs --functional-out and --domain-out");
    }
    write_functional_block(a.functional_out, a.domain_out, data.functional[0]);
  }
  return 0;
}

std::string first_line(const std::string& text) {
  auto pos = text.find('\n');
  return pos == std::string::npos ? text : text.substr(0, pos);
}

}  // namespace

double round_seconds(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

std::vector<CutLoss> demo_split_losses(const DemoSplitOptions& options) {
  SyntheticConfig config{options.n, options.sigma, options.seed, Variant::transition_fig1};
  Dataset data = gen_transition(config);
  const auto feature = data.covariates.column(0);

  ResponseScaler scaler = fit_scaler(data.responses);
  const Matrix scaled = scaler.transform(data.responses);
  BasisSpec spec{BasisFamily::cosine, options.n_basis, 1};
  auto cde = split_profile(feature, basis_matrix(scaled, spec).values(), options.min_node_size);
  auto mse = split_profile(feature, data.responses, options.min_node_size);

  const double n = static_cast<double>(data.rows());
  double sum_sq = 0.0;
  for (double y : data.responses.data()) sum_sq += y * y;

  std::vector<CutLoss> out(cde.size());
  for (std::size_t k = 0; k < cde.size(); ++k) {
    out[k].cutpoint = cde[k].threshold;
    out[k].cde_loss = -cde[k].score / n;
    out[k].mse_loss = (sum_sq - mse[k].score) / n;
  }
  auto normalize = [&](double CutLoss::*field) {
    if (out.empty()) return;
    auto [lo, hi] = std::minmax_element(out.begin(), out.end(), [&](const auto& a, const auto& b) {
      return a.*field < b.*field;
    });
    const double min = (*lo).*field;
    const double range = (*hi).*field - min;
    for (auto& c : out) c.*field = range > 0.0 ? (c.*field - min) / range : 0.0;
  };
  normalize(&CutLoss::cde_loss);
  normalize(&CutLoss::mse_loss);
  return out;
}

BenchOptions bench_defaults(Variant variant) {
  BenchOptions o;
  o.variant = variant;
  o.sigma = default_sigma(variant);
  o.config.n_trees = 1000;
  o.config.n_basis = 15;
  switch (variant) {
    case Variant::multimodal_s31:
      o.config.mtry = 4;
      o.bandwidth = BandwidthPolicy::fixed(0.2);
      break;
    case Variant::transition_fig1:
      o.config.mtry = 1;
      o.bandwidth = BandwidthPolicy::fixed(0.2);
      break;
    case Variant::ridge_2d:
      o.config.n_trees = 200;
      o.config.mtry = 1;
      o.config.n_basis = 8;
      o.bandwidth = BandwidthPolicy::plugin();
      o.grid_points = 100;
      break;
    case Variant::functional:
      o.config.n_basis = 31;
      o.config.lambda = 50.0;
      o.bandwidth = BandwidthPolicy::plugin();
      break;
  }
  o.config.bandwidth = o.bandwidth;
  return o;
}

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (std::size_t n : options.sizes) {
    for (std::size_t s = 0; s < options.seeds; ++s) {
      const std::uint64_t seed = options.base_seed + s;
      SyntheticConfig gen{n, options.sigma, derive_seed(seed, 1), options.variant};
      Dataset train_data = generate(gen);
      gen.n = options.n_test;
      gen.seed = derive_seed(seed, 2);
      Dataset test_data = generate(gen);

      struct Method {
        std::string name;
        SplitCriterion criterion;
        bool flatten;
      };
      std::vector<Method> methods;
      if (options.variant == Variant::functional) {
        methods = {{"functional", SplitCriterion::cde, false}, {"vector", SplitCriterion::cde, true}};
      } else {
        methods = {{"cde", SplitCriterion::cde, false}, {"mse", SplitCriterion::mse, false}};
      }

      for (const auto& method : methods) {
        ForestConfig config = options.config;
        config.criterion = method.criterion;
        config.bandwidth = options.bandwidth;
        config.seed = seed;
        const Dataset& train_set = method.flatten ? flatten_functional(train_data) : train_data;
        const Dataset test_set = method.flatten ? flatten_functional(test_data) : test_data;

        const auto start = Clock::now();
        Forest forest = train(train_set, config);
        const double train_seconds = seconds_since(start);
        Evaluation eval = evaluate(forest, test_set, options.bandwidth, options.grid_points);
        rows.push_back({to_string(options.variant), n, seed, method.name, eval.report,
                        train_seconds, eval.predict_seconds});
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool with_timing) {
  out << "variant,n,seed,method,loss,se,n_eval,coverage_warnings,train_time,predict_time\n";
  for (const auto& r : rows) {
    out << r.variant << ',' << r.n << ',' << r.seed << ',' << r.method << ','
        << format_double(r.report.loss) << ',' << format_double(r.report.std_error) << ','
        << r.report.n_eval << ',' << r.report.coverage_warnings << ',';
    if (with_timing) {
      out << format_seconds(r.train_seconds) << ',' << format_seconds(r.predict_seconds);
    } else {
      out << "NA,NA";
    }
    out << '\n';
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random forests for conditional density estimation"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a forest from CSV");
  train_cmd->add_option("--data", train_args.data, "Training CSV")->required();
  train_cmd->add_option("--response", train_args.responses, "Response column(s)")->required();
  add_functional_options(train_cmd, train_args.functional);
  train_cmd->add_option("--out", train_args.out, "Model file")->required();
  train_cmd->add_option("--ntrees", train_args.config.n_trees, "Number of trees");
  train_cmd->add_option("--mtry", train_args.config.mtry, "Features tried per split (0 = sqrt)");
  train_cmd->add_option("--min-node-size", train_args.config.min_node_size, "Minimum leaf size");
  train_cmd->add_option("--nbasis", train_args.config.n_basis, "Basis functions per dimension");
  train_cmd->add_option("--criterion", train_args.criterion, "cde or mse");
  train_cmd->add_option("--bandwidth", train_args.bandwidth, "Default bandwidth or 'plugin'");
  train_cmd->add_option("--lambda", train_args.config.lambda, "Mean functional interval length");
  train_cmd->add_option("--seed", train_args.config.seed, "Random seed");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Conditional densities on a grid");
  predict_cmd->add_option("--model", predict_args.model, "Model file")->required();
  predict_cmd->add_option("--data", predict_args.data, "Query CSV");
  add_functional_options(predict_cmd, predict_args.functional);
  predict_cmd->add_option("--bandwidth", predict_args.bandwidth, "Bandwidth(s) or 'plugin'");
  predict_cmd->add_option("--grid-min", predict_args.grid_min, "Lower grid bound(s)");
  predict_cmd->add_option("--grid-max", predict_args.grid_max, "Upper grid bound(s)");
  predict_cmd->add_option("--grid-points", predict_args.grid_points, "Points per dimension");
  predict_cmd->add_option("--out", predict_args.out, "Output CSV (default stdout)");

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Held-out CDE loss as a JSON line");
  evaluate_cmd->add_option("--model", evaluate_args.model, "Model file")->required();
  evaluate_cmd->add_option("--data", evaluate_args.data, "Test CSV with responses");
  add_functional_options(evaluate_cmd, evaluate_args.functional);
  evaluate_cmd->add_option("--bandwidth", evaluate_args.bandwidth, "Bandwidth(s) or 'plugin'");
  evaluate_cmd->add_option("--grid-points", evaluate_args.grid_points, "Points per dimension");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Synthetic benchmark table");
  bench_cmd->add_option("--variant", bench_args.variant, "Synthetic variant");
  bench_cmd->add_option("--sizes", bench_args.sizes, "Comma-separated training sizes");
  bench_cmd->add_option("--seeds", bench_args.seeds, "Number of seeds");
  bench_cmd->add_option("--seed", bench_args.base_seed, "First seed");
  bench_cmd->add_option("--n-test", bench_args.n_test, "Test set size");
  bench_cmd->add_option("--ntrees", bench_args.ntrees, "Number of trees");
  bench_cmd->add_option("--mtry", bench_args.mtry, "Features tried per split");
  bench_cmd->add_option("--nbasis", bench_args.nbasis, "Basis functions per dimension");
  bench_cmd->add_option("--min-node-size", bench_args.min_node_size, "Minimum leaf size");
  bench_cmd->add_option("--bandwidth", bench_args.bandwidth, "Bandwidth(s) or 'plugin'");
  bench_cmd->add_option("--lambda", bench_args.lambda, "Mean functional interval length");
  bench_cmd->add_option("--sigma", bench_args.sigma, "Response noise");
  bench_cmd->add_option("--grid-points", bench_args.grid_points, "Points per dimension");
  bench_cmd->add_flag("--no-timing", bench_args.no_timing, "Write NA for timing columns");
  bench_cmd->add_option("--out", bench_args.out, "Output CSV (default stdout)");

  DemoArgs demo_args;
  auto* demo_cmd = app.add_subcommand("demo-split", "Per-cutpoint CDE and MSE losses");
  demo_cmd->add_option("--n", demo_args.options.n, "Sample size");
  demo_cmd->add_option("--sigma", demo_args.options.sigma, "Response noise");
  demo_cmd->add_option("--seed", demo_args.options.seed, "Random seed");
  demo_cmd->add_option("--nbasis", demo_args.options.n_basis, "Basis functions");
  demo_cmd->add_option("--min-node-size", demo_args.options.min_node_size, "Minimum child size");
  demo_cmd->add_option("--out", demo_args.out, "Output CSV (default stdout)");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
  gen_cmd->add_option("--variant", gen_args.variant, "Synthetic variant");
  gen_cmd->add_option("--n", gen_args.n, "Rows");
  gen_cmd->add_option("--seed", gen_args.seed, "Random seed");
  gen_cmd->add_option("--sigma", gen_args.sigma, "Response noise (0 = variant default)");
  gen_cmd->add_option("--out", gen_args.out, "Output CSV (default stdout)");
  gen_cmd->add_option("--functional-out", gen_args.functional_out, "Curve CSV (functional)");
  gen_cmd->add_option("--domain-out", gen_args.domain_out, "Domain CSV (functional)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << first_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_args, out);
    if (predict_cmd->parsed()) return cmd_predict(predict_args, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(evaluate_args, out);
    if (bench_cmd->parsed()) return cmd_bench(bench_args, out);
    if (demo_cmd->parsed()) return cmd_demo_split(demo_args, out);
    if (gen_cmd->parsed()) return cmd_generate(gen_args, out);
  } catch (const std::exception& e) {
    err << "error: " << first_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}

}  // namespace cdeforest
