#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cdeforest/datagen.hpp"
#include "cdeforest/forest.hpp"
#include "cdeforest/loss.hpp"

namespace cdeforest {

/// Entry point of the `cdeforest` command. Returns the process exit code:
/// 0 on success, 1 on a runtime error, 2 on a usage error. Errors print a
/// single line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One cut point of the transition demo. Both losses are min-max normalized
/// over all legal cut points.
struct CutLoss {
  double cutpoint = 0.0;
  double cde_loss = 0.0;
  double mse_loss = 0.0;
};

struct DemoSplitOptions {
  std::size_t n = 2000;
  double sigma = 0.3;
  std::uint64_t seed = 0;
  int n_basis = 15;
  std::size_t min_node_size = 5;
};

/// Generates transition data and scores every legal cut of its single
/// covariate under the CDE loss (-sum beta_j^2 per child, weighted by child
/// mass) and the within-child squared error.
std::vector<CutLoss> demo_split_losses(const DemoSplitOptions& options);

struct BenchOptions {
  Variant variant = Variant::multimodal_s31;
  std::vector<std::size_t> sizes{1000};
  std::size_t seeds = 1;
  std::uint64_t base_seed = 0;
  std::size_t n_test = 1000;
  /// Applied to every method; mtry, criterion and functional treatment are
  /// overridden per method.
  ForestConfig config;
  BandwidthPolicy bandwidth = BandwidthPolicy::fixed(0.2);
  std::size_t grid_points = 0;
  double sigma = 0.25;
};

/// Default bench settings for a variant: tree count, basis size, bandwidth and noise.
BenchOptions bench_defaults(Variant variant);

struct BenchRow {
  std::string variant;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string method;
  LossReport report;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

/// For each (size, seed): generates train and test sets, trains both
/// methods (cde/mse, or functional/vector for the functional variant) and
/// evaluates them on the test set.
std::vector<BenchRow> run_bench(const BenchOptions& options);

/// Bench table; timings are written as NA when `with_timing` is false.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool with_timing);

/// Wall-clock seconds rounded to milliseconds.
double round_seconds(double seconds);

}  // namespace cdeforest
