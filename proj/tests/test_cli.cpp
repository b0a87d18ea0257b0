#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cdeforest/cli.hpp"
#include "cdeforest/io.hpp"
#include "json.hpp"

using namespace cdeforest;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("cdeforest_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("generate, train, predict and evaluate") {
  TempDir dir;
  REQUIRE(run({"generate", "--variant", "transition_fig1", "--n", "300", "--seed", "1", "--out",
               dir / "train.csv"})
              .code == 0);
  REQUIRE(run({"generate", "--variant", "transition_fig1", "--n", "50", "--seed", "2", "--out",
               dir / "test.csv"})
              .code == 0);

  Result t = run({"train", "--data", dir / "train.csv", "--response", "y", "--out",
                  dir / "model.bin", "--ntrees", "20", "--mtry", "1", "--seed", "4"});
  REQUIRE(t.code == 0);
  auto info = nlohmann::json::parse(t.out);
  CHECK(info["n_trees"] == 20);
  CHECK(info["criterion"] == "cde");
  CHECK(info.contains("train_time"));

  // Same inputs give a byte-identical model.
  REQUIRE(run({"train", "--data", dir / "train.csv", "--response", "y", "--out",
               dir / "model2.bin", "--ntrees", "20", "--mtry", "1", "--seed", "4"})
              .code == 0);
  CHECK(slurp(dir / "model.bin") == slurp(dir / "model2.bin"));

  Result p = run({"predict", "--model", dir / "model.bin", "--data", dir / "test.csv",
                  "--grid-points", "64", "--out", dir / "pred.csv"});
  REQUIRE(p.code == 0);
  CsvTable pred = read_csv(dir / "pred.csv");
  CHECK(pred.header == std::vector<std::string>{"query_id", "y", "density"});
  CHECK(pred.values.rows() == 50 * 64);

  Result fixed_grid = run({"predict", "--model", dir / "model.bin", "--data", dir / "test.csv",
                           "--grid-min", "-2", "--grid-max", "2", "--grid-points", "11"});
  REQUIRE(fixed_grid.code == 0);
  CHECK(line_count(fixed_grid.out) == 1 + 50 * 11);
  CHECK(fixed_grid.out.find("\n0,-2,") != std::string::npos);

  Result e = run({"evaluate", "--model", dir / "model.bin", "--data", dir / "test.csv"});
  REQUIRE(e.code == 0);
  auto report = nlohmann::json::parse(e.out);
  CHECK(report["n_eval"] == 50);
  CHECK(report["loss"].get<double>() < 0.0);
  CHECK(report["se"].get<double>() > 0.0);
  CHECK(report.contains("coverage_warnings"));
  CHECK(report.contains("predict_wall_time"));

  Result mse = run({"train", "--data", dir / "train.csv", "--response", "y", "--out",
                    dir / "mse.bin", "--ntrees", "5", "--criterion", "mse"});
  REQUIRE(mse.code == 0);
  CHECK(nlohmann::json::parse(mse.out)["criterion"] == "mse");

  std::ofstream(dir / "empty.csv") << "x,y\n";
  Result empty = run({"evaluate", "--model", dir / "model.bin", "--data", dir / "empty.csv"});
  CHECK(empty.code == 1);
}

TEST_CASE("errors exit with one diagnostic line") {
  TempDir dir;
  Result unknown = run({"train", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(line_count(unknown.err) == 1);

  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);

  Result missing = run({"train", "--data", dir / "absent.csv", "--response", "y", "--out",
                        dir / "m.bin"});
  CHECK(missing.code == 1);
  CHECK(line_count(missing.err) == 1);

  std::ofstream(dir / "d.csv") << "x,y\n1,2\n2,3\n3,1\n";
  Result no_column = run({"train", "--data", dir / "d.csv", "--response", "target", "--out",
                          dir / "m.bin"});
  CHECK(no_column.code == 1);
  CHECK(no_column.err.find("target") != std::string::npos);

  Result bad_bw = run({"train", "--data", dir / "d.csv", "--response", "y", "--out",
                       dir / "m.bin", "--bandwidth", "-1"});
  CHECK(bad_bw.code == 1);
  CHECK(line_count(bad_bw.err) == 1);

  Result not_model = run({"evaluate", "--model", dir / "d.csv", "--data", dir / "d.csv"});
  CHECK(not_model.code == 1);
}

TEST_CASE("bench rows and reproducibility") {
  TempDir dir;
  std::vector<std::string> args{"bench", "--variant", "multimodal_s31", "--sizes", "60,80",
                                "--seeds", "5", "--n-test", "20", "--ntrees", "3",
                                "--grid-points", "100", "--no-timing"};
  Result a = run(args);
  REQUIRE(a.code == 0);
  CHECK(line_count(a.out) == 1 + 2 * 5 * 2);
  CHECK(a.out.find("NA,NA") != std::string::npos);
  Result b = run(args);
  CHECK(a.out == b.out);

  args.pop_back();
  Result timed = run(args);
  REQUIRE(timed.code == 0);
  CHECK(timed.out.find("NA") == std::string::npos);
}

TEST_CASE("demo-split writes normalized losses") {
  Result r = run({"demo-split", "--n", "300", "--seed", "3"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  CsvTable t = parse_csv(in);
  CHECK(t.header == std::vector<std::string>{"cutpoint", "cde_loss", "mse_loss"});
  REQUIRE(t.values.rows() > 100);
  double cde_min = 1, cde_max = 0;
  for (std::size_t i = 0; i < t.values.rows(); ++i) {
    CHECK(t.values(i, 1) >= 0.0);
    CHECK(t.values(i, 1) <= 1.0);
    CHECK(t.values(i, 2) >= 0.0);
    CHECK(t.values(i, 2) <= 1.0);
    cde_min = std::min(cde_min, t.values(i, 1));
    cde_max = std::max(cde_max, t.values(i, 1));
    if (i) CHECK(t.values(i, 0) > t.values(i - 1, 0));
  }
  CHECK(cde_min == 0.0);
  CHECK(cde_max == 1.0);
}

TEST_CASE("functional workflow") {
  TempDir dir;
  REQUIRE(run({"generate", "--variant", "functional", "--n", "150", "--seed", "1", "--out",
               dir / "train.csv", "--functional-out", dir / "curves.csv", "--domain-out",
               dir / "domain.csv"})
              .code == 0);
  REQUIRE(run({"generate", "--variant", "functional", "--n", "30", "--seed", "2", "--out",
               dir / "test.csv", "--functional-out", dir / "tcurves.csv", "--domain-out",
               dir / "tdomain.csv"})
              .code == 0);
  Result t = run({"train", "--data", dir / "train.csv", "--response", "y", "--functional",
                  dir / "curves.csv", "--domain", dir / "domain.csv", "--out", dir / "f.bin",
                  "--ntrees", "10", "--nbasis", "10", "--bandwidth", "plugin"});
  REQUIRE(t.code == 0);
  CHECK(nlohmann::json::parse(t.out)["functional_blocks"] == 1);

  Result e = run({"evaluate", "--model", dir / "f.bin", "--data", dir / "test.csv",
                  "--functional", dir / "tcurves.csv", "--domain", dir / "tdomain.csv",
                  "--grid-points", "200"});
  REQUIRE(e.code == 0);
  CHECK(nlohmann::json::parse(e.out)["n_eval"] == 30);

  Result p = run({"predict", "--model", dir / "f.bin", "--functional", dir / "tcurves.csv",
                  "--domain", dir / "tdomain.csv", "--grid-points", "20"});
  REQUIRE(p.code == 0);
  CHECK(line_count(p.out) == 1 + 30 * 20);

  Result no_curves = run({"evaluate", "--model", dir / "f.bin", "--data", dir / "test.csv"});
  CHECK(no_curves.code == 1);

  CHECK(run({"generate", "--variant", "functional", "--n", "5", "--out", dir / "x.csv"}).code ==
        1);
}
