#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <string>

#include "geovad/dlsp.hpp"
#include "geovad/errors.hpp"
#include "geovad/vmf.hpp"
#include "test_support.hpp"

using namespace geovad;
using geovad::testing::axis;

namespace {

// Layer where both classes share one distribution (no separability).
void push_identical_layer(std::vector<MatX>* normal, std::vector<MatX>* abn, Index dim,
                          std::uint64_t seed) {
  normal->push_back(sample_vmf({axis(dim, 0), 50.0}, 200, seed));
  abn->push_back(sample_vmf({axis(dim, 0), 50.0}, 200, seed + 1));
}

// Layer whose classes have clearly separated similarity-to-centroid
// distributions: a tight normal class against a diffuse anomalous one.
void push_separated_layer(std::vector<MatX>* normal, std::vector<MatX>* abn, Index dim,
                          std::uint64_t seed, double kappa_norm = 500.0,
                          double kappa_abn = 25.0) {
  const VecX far = std::cos(0.7) * axis(dim, 0) + std::sin(0.7) * axis(dim, 1);
  normal->push_back(sample_vmf({axis(dim, 0), kappa_norm}, 200, seed));
  abn->push_back(sample_vmf({far, kappa_abn}, 200, seed + 1));
}

}  // namespace

TEST_CASE("identical distributions score KL ~ 0, LDR ~ 0, entropy ~ 1 bit") {
  std::vector<MatX> normal, abn;
  push_identical_layer(&normal, &abn, 12, 100);
  push_separated_layer(&normal, &abn, 12, 200);
  const LayerSaliency saliency = dlsp_evaluate(normal, abn);

  CHECK(saliency.kl[0] < 0.05);
  CHECK(saliency.ldr[0] < 0.3);
  CHECK(saliency.entropy[0] > 0.9);  // posterior ~ 1/2 everywhere: ~1 bit
  CHECK(saliency.kl[1] > saliency.kl[0]);
  CHECK(saliency.ldr[1] > saliency.ldr[0]);
  CHECK(saliency.entropy[1] < saliency.entropy[0]);
  CHECK(saliency.composite[1] > saliency.composite[0]);
}

TEST_CASE("two synthetic stacks: separated layer wins") {
  const Index dim = 10;
  std::vector<MatX> normal, abn;
  push_identical_layer(&normal, &abn, dim, 300);
  push_identical_layer(&normal, &abn, dim, 310);
  push_separated_layer(&normal, &abn, dim, 320);
  push_identical_layer(&normal, &abn, dim, 330);
  const LayerSaliency saliency = dlsp_evaluate(normal, abn);
  CHECK(select_layer(saliency) == 2);
}

TEST_CASE("single layer: z-scores and composite are zero") {
  std::vector<MatX> normal, abn;
  push_separated_layer(&normal, &abn, 8, 400);
  const LayerSaliency saliency = dlsp_evaluate(normal, abn);
  CHECK(saliency.z_kl[0] == 0.0);
  CHECK(saliency.z_ldr[0] == 0.0);
  CHECK(saliency.z_entropy[0] == 0.0);
  CHECK(saliency.composite[0] == 0.0);
  CHECK(select_layer(saliency) == 0);
}

TEST_CASE("z-scores have zero mean and unit variance across layers") {
  const Index dim = 9;
  std::vector<MatX> normal, abn;
  push_identical_layer(&normal, &abn, dim, 500);
  push_separated_layer(&normal, &abn, dim, 510);
  push_identical_layer(&normal, &abn, dim, 520);
  const LayerSaliency saliency = dlsp_evaluate(normal, abn);
  for (const auto* z : {&saliency.z_kl, &saliency.z_ldr, &saliency.z_entropy}) {
    double mean = 0.0, var = 0.0;
    for (double v : *z) mean += v;
    mean /= static_cast<double>(z->size());
    for (double v : *z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z->size());
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-6);
  }
  for (std::size_t l = 0; l < saliency.layer_count(); ++l)
    CHECK(saliency.composite[l] ==
          saliency.z_kl[l] + saliency.z_ldr[l] - saliency.z_entropy[l]);
}

TEST_CASE("composite argmax ties break to the lowest layer") {
  LayerSaliency saliency;
  saliency.composite = {1.0, 3.0, 2.0};
  CHECK(select_layer(saliency) == 1);
  saliency.composite = {2.0, 2.0, 2.0};
  CHECK(select_layer(saliency) == 0);
}

TEST_CASE("shift invariance of the selection") {
  // Adding a constant to every layer's raw KL cannot change the argmax.
  const Index dim = 8;
  std::vector<MatX> normal, abn;
  push_identical_layer(&normal, &abn, dim, 600);
  push_separated_layer(&normal, &abn, dim, 610);
  push_identical_layer(&normal, &abn, dim, 620);
  LayerSaliency saliency = dlsp_evaluate(normal, abn);
  const std::size_t before = select_layer(saliency);

  LayerSaliency shifted = saliency;
  for (double& v : shifted.kl) v += 10.0;
  // Re-fuse from the shifted raw series: z-scores are shift invariant.
  LayerSaliency refused;
  refused.kl = shifted.kl;
  refused.ldr = saliency.ldr;
  refused.entropy = saliency.entropy;
  // Population z-score, mirroring the module convention.
  auto zscore = [](const std::vector<double>& xs) {
    double mean = 0.0, var = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    std::vector<double> z(xs.size(), 0.0);
    if (var < 1e-30) return z;
    for (std::size_t i = 0; i < xs.size(); ++i) z[i] = (xs[i] - mean) / std::sqrt(var);
    return z;
  };
  refused.z_kl = zscore(refused.kl);
  refused.z_ldr = zscore(refused.ldr);
  refused.z_entropy = zscore(refused.entropy);
  refused.composite.resize(refused.kl.size());
  for (std::size_t l = 0; l < refused.kl.size(); ++l)
    refused.composite[l] = refused.z_kl[l] + refused.z_ldr[l] - refused.z_entropy[l];
  CHECK(select_layer(refused) == before);
  for (std::size_t l = 0; l < refused.kl.size(); ++l)
    CHECK(refused.composite[l] == doctest::Approx(saliency.composite[l]).epsilon(1e-9));
}

TEST_CASE("improving the best layer's separability never changes the selection") {
  const Index dim = 8;
  std::vector<MatX> normal, abn;
  push_identical_layer(&normal, &abn, dim, 700);
  push_separated_layer(&normal, &abn, dim, 710);
  push_identical_layer(&normal, &abn, dim, 720);
  const LayerSaliency base = dlsp_evaluate(normal, abn);
  const std::size_t winner = select_layer(base);
  REQUIRE(winner == 1);

  // Replace the winning layer with an even more contrasted one.
  const VecX very_far = std::cos(1.2) * axis(dim, 0) + std::sin(1.2) * axis(dim, 1);
  normal[1] = sample_vmf({axis(dim, 0), 1000.0}, 200, 711);
  abn[1] = sample_vmf({very_far, 12.0}, 200, 712);
  CHECK(select_layer(dlsp_evaluate(normal, abn)) == winner);
}

TEST_CASE("degenerate variance raises with the layer index") {
  std::vector<MatX> normal, abn;
  MatX constant(5, 4);
  for (Index i = 0; i < 5; ++i) constant.row(i) = axis(4, 0).transpose();
  normal.push_back(constant);
  abn.push_back(constant);
  CHECK_THROWS_AS(dlsp_evaluate(normal, abn), DegenerateVarianceError);
  try {
    dlsp_evaluate(normal, abn);
  } catch (const DegenerateVarianceError& e) {
    CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
  }
}

TEST_CASE("dlsp determinism") {
  std::vector<MatX> normal, abn;
  push_identical_layer(&normal, &abn, 8, 800);
  push_separated_layer(&normal, &abn, 8, 810);
  const LayerSaliency a = dlsp_evaluate(normal, abn);
  const LayerSaliency b = dlsp_evaluate(normal, abn);
  CHECK(a.composite == b.composite);
}
