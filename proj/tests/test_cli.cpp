#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geovad/cli.hpp"
#include "geovad/io.hpp"
#include "geovad/metrics.hpp"

using namespace geovad;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run(std::vector<std::string> args) { return cli::run(args); }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}) == 1);
  CHECK(run({"frobnicate"}) == 1);
  CHECK(run({"synth"}) == 1);                       // missing required options
  CHECK(run({"infer", "--features", "x.gvf"}) == 1);  // missing priors/bank
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("data errors exit 2") {
  const auto dir = fresh_dir("geovad_cli_err");
  const std::string d = dir.string();
  REQUIRE(run({"synth", "--preset", "A", "--out", d, "--seed", "7"}) == 0);
  REQUIRE(run({"calibrate", "--calib", d + "/calib.gvf", "--test", d + "/test.gvf",
               "--config", d + "/world.cfg", "--out-priors", d + "/priors.gvpr",
               "--out-bank", d + "/bank.gvpb"}) == 0);

  SUBCASE("missing input file") {
    CHECK(run({"infer", "--features", d + "/nope.gvf", "--priors", d + "/priors.gvpr",
               "--bank", d + "/bank.gvpb", "--out-csv", d + "/s.csv"}) == 2);
  }

  SUBCASE("dimension mismatch between bank and features") {
    const auto dir8 = fresh_dir("geovad_cli_err8");
    const std::string e = dir8.string();
    REQUIRE(run({"synth", "--preset", "A", "--out", e, "--dim", "8", "--seed", "7"}) == 0);
    CHECK(run({"infer", "--features", e + "/test.gvf", "--priors", d + "/priors.gvpr",
               "--bank", d + "/bank.gvpb", "--config", d + "/world.cfg", "--out-csv",
               e + "/s.csv"}) == 2);
  }

  SUBCASE("unknown config key") {
    std::ofstream bad(d + "/bad.cfg");
    bad << "nonsense_key=1\n";
    bad.close();
    CHECK(run({"infer", "--features", d + "/test.gvf", "--priors", d + "/priors.gvpr",
               "--bank", d + "/bank.gvpb", "--config", d + "/bad.cfg", "--out-csv",
               d + "/s.csv"}) == 2);
  }

  SUBCASE("calibrate offline without a test file") {
    CHECK(run({"calibrate", "--calib", d + "/calib.gvf", "--out-priors", d + "/p.gvpr",
               "--out-bank", d + "/b.gvpb"}) == 2);
  }
}

TEST_CASE("eval on reversed scores inverts the AUC") {
  const auto dir = fresh_dir("geovad_cli_rev");
  const std::string d = dir.string();
  REQUIRE(run({"synth", "--preset", "A", "--out", d, "--seed", "42"}) == 0);
  REQUIRE(run({"calibrate", "--calib", d + "/calib.gvf", "--test", d + "/test.gvf",
               "--config", d + "/world.cfg", "--out-priors", d + "/priors.gvpr",
               "--out-bank", d + "/bank.gvpb"}) == 0);
  REQUIRE(run({"infer", "--features", d + "/test.gvf", "--priors", d + "/priors.gvpr",
               "--bank", d + "/bank.gvpb", "--config", d + "/world.cfg", "--out-csv",
               d + "/scores.csv"}) == 0);

  FrameScores scores = read_scores_csv(d + "/scores.csv");
  for (auto& [id, frames] : scores.by_video)
    for (double& s : frames) s = 1.0 - s;
  write_scores_csv(scores, d + "/reversed.csv");

  const FrameLabels labels = read_labels_csv(d + "/labels.csv");
  std::vector<double> flat;
  std::vector<int> truth;
  for (const auto& [id, frames] : scores.by_video) {
    flat.insert(flat.end(), frames.begin(), frames.end());
    const auto& lab = labels.by_video.at(id);
    truth.insert(truth.end(), lab.begin(), lab.end());
  }
  CHECK(roc_auc(flat, truth) <= 0.01);
  CHECK(run({"eval", "--scores", d + "/reversed.csv", "--labels", d + "/labels.csv"}) == 0);
}

TEST_CASE("dlsp subcommand selects the salient layer") {
  const auto dir = fresh_dir("geovad_cli_dlsp");
  const std::string d = dir.string();
  REQUIRE(run({"synth", "--preset", "dlsp", "--out", d, "--layers", "5", "--salient-layer",
               "3", "--seed", "11"}) == 0);
  REQUIRE(run({"dlsp", "--features", d + "/layers.gvfl", "--out", d + "/saliency.csv"}) == 0);

  // CSV has a header plus five rows; the composite argmax is layer 3.
  std::ifstream in(d + "/saliency.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "layer,kl,ldr,entropy,z_kl,z_ldr,z_entropy,composite");
  double best_composite = -1e300;
  int best_layer = -1;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    const int layer = std::stoi(field);
    for (int skip = 0; skip < 6; ++skip) std::getline(row, field, ',');
    std::getline(row, field);
    const double composite = std::stod(field);
    if (composite > best_composite) {
      best_composite = composite;
      best_layer = layer;
    }
  }
  CHECK(rows == 5);
  CHECK(best_layer == 3);
}

TEST_CASE("sweep subcommand emits a deterministic table") {
  const auto dir = fresh_dir("geovad_cli_sweep");
  const std::string d = dir.string();
  REQUIRE(run({"synth", "--preset", "A", "--out", d, "--seed", "42"}) == 0);
  {
    std::ofstream grid(d + "/grid.cfg");
    grid << "alpha_g=0,0.5\n";
  }
  REQUIRE(run({"sweep", "--features", d + "/test.gvf", "--calib", d + "/calib.gvf",
               "--labels", d + "/labels.csv", "--grid", d + "/grid.cfg", "--config",
               d + "/world.cfg", "--out", d + "/sweep.csv"}) == 0);
  REQUIRE(run({"sweep", "--features", d + "/test.gvf", "--calib", d + "/calib.gvf",
               "--labels", d + "/labels.csv", "--grid", d + "/grid.cfg", "--config",
               d + "/world.cfg", "--out", d + "/sweep2.csv"}) == 0);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const std::string table = slurp(d + "/sweep.csv");
  CHECK(table == slurp(d + "/sweep2.csv"));
  CHECK(table.rfind("alpha_g,auc,ap\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);  // header + 2 rows
}
