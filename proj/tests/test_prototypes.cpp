#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "geovad/prototypes.hpp"
#include "geovad/sphere.hpp"
#include "geovad/vmf.hpp"
#include "test_support.hpp"

using namespace geovad;
using geovad::testing::axis;
using geovad::testing::random_unit;
using geovad::testing::unit_at_angle;

namespace {

// Exhaustive assignment oracle for tiny instances: best total within-cluster
// cosine similarity over every labeling, with optimal (normalized-sum)
// centroids per cluster.
double brute_force_objective(const MatX& points, int k) {
  const Index n = points.rows();
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  double best = -1e300;
  const auto combos = static_cast<long>(std::pow(k, static_cast<double>(n)));
  for (long code = 0; code < combos; ++code) {
    long rest = code;
    for (Index i = 0; i < n; ++i) {
      labels[static_cast<std::size_t>(i)] = static_cast<int>(rest % k);
      rest /= k;
    }
    MatX sums = MatX::Zero(k, points.cols());
    for (Index i = 0; i < n; ++i) sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    double objective = 0.0;
    bool valid = true;
    for (int c = 0; c < k; ++c) {
      const double norm = sums.row(c).norm();
      if (norm < 1e-12) {
        valid = false;  // empty cluster: skip, repair rule handles it live
        continue;
      }
      objective += norm;  // sum over members of <x, c> with c = sum/||sum||
    }
    if (valid && objective > best) best = objective;
  }
  return best;
}

}  // namespace

TEST_CASE("k = 1 is the normalized sum") {
  Rng rng = make_rng(41);
  MatX points(20, 6);
  for (Index i = 0; i < points.rows(); ++i)
    points.row(i) = unit_at_angle(axis(6, 0), 0.4, rng).transpose();
  const MatX protos = spherical_kmeans(points, 1, 42);
  const VecX expected = sphere::normalize(VecX(points.colwise().sum().transpose()));
  CHECK((protos.row(0).transpose() - expected).norm() < 1e-12);
}

TEST_CASE("two tight clusters recovered") {
  // Oracle: per-cluster normalized mean using the true labels.
  const Index dim = 8;
  const VecX mu_a = axis(dim, 0);
  const VecX mu_b = (std::cos(M_PI / 3) * axis(dim, 0) + std::sin(M_PI / 3) * axis(dim, 1));
  const MatX xa = sample_vmf({mu_a, 200.0}, 150, 5001);
  const MatX xb = sample_vmf({mu_b, 200.0}, 150, 5002);
  MatX points(300, dim);
  points.topRows(150) = xa;
  points.bottomRows(150) = xb;
  const VecX oracle_a = sphere::normalize(VecX(xa.colwise().sum().transpose()));
  const VecX oracle_b = sphere::normalize(VecX(xb.colwise().sum().transpose()));

  const MatX protos = spherical_kmeans(points, 2, 42);
  const double deg2 = 2.0 * M_PI / 180.0;
  // Match each prototype to its nearest oracle mean.
  for (Index p = 0; p < 2; ++p) {
    const VecX proto = protos.row(p).transpose();
    const double d = std::min(sphere::geodesic_distance(proto, oracle_a),
                              sphere::geodesic_distance(proto, oracle_b));
    CHECK(d < deg2);
  }
  CHECK(sphere::geodesic_distance(protos.row(0).transpose(), protos.row(1).transpose()) > 0.5);
}

TEST_CASE("k equal to point count gives objective n") {
  Rng rng = make_rng(43);
  const Index n = 6;
  MatX points(n, 5);
  for (Index i = 0; i < n; ++i) points.row(i) = random_unit(5, rng).transpose();
  const MatX protos = spherical_kmeans(points, static_cast<int>(n), 42);
  const double objective = kmeans_objective(points, protos);
  CHECK(objective == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
  CHECK(objective == doctest::Approx(brute_force_objective(points, static_cast<int>(n))).epsilon(1e-9));
}

TEST_CASE("matches the exhaustive oracle on tiny instances") {
  Rng rng = make_rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    MatX points(5, 4);
    for (Index i = 0; i < 5; ++i) points.row(i) = random_unit(4, rng).transpose();
    const MatX protos = spherical_kmeans(points, 2, 42, {.n_init = 20});
    const double objective = kmeans_objective(points, protos);
    const double oracle = brute_force_objective(points, 2);
    CHECK(objective <= oracle + 1e-9);
    CHECK(objective >= oracle - 1e-6);  // restarts find the optimum on n=5
  }
}

TEST_CASE("errors and determinism") {
  Rng rng = make_rng(53);
  MatX points(3, 4);
  for (Index i = 0; i < 3; ++i) points.row(i) = random_unit(4, rng).transpose();
  CHECK_THROWS_AS(spherical_kmeans(points, 4, 42), TooFewPointsError);
  CHECK_THROWS_AS(spherical_kmeans(points, 0, 42), TooFewPointsError);

  MatX big(64, 4);
  for (Index i = 0; i < big.rows(); ++i) big.row(i) = random_unit(4, rng).transpose();
  const MatX a = spherical_kmeans(big, 5, 42);
  const MatX b = spherical_kmeans(big, 5, 42);
  CHECK(a == b);
}

TEST_CASE("prototypes are unit norm") {
  Rng rng = make_rng(59);
  MatX points(80, 7);
  for (Index i = 0; i < points.rows(); ++i) points.row(i) = random_unit(7, rng).transpose();
  const MatX protos = spherical_kmeans(points, 6, 7);
  for (Index p = 0; p < protos.rows(); ++p)
    CHECK(std::abs(protos.row(p).norm() - 1.0) < 1e-9);
}

TEST_CASE("empty cluster repair keeps k prototypes") {
  // Duplicated points force collisions; every cluster must still end up with
  // a unit-norm centroid.
  MatX points(8, 3);
  for (Index i = 0; i < 8; ++i) points.row(i) = axis(3, i % 2).transpose();
  const MatX protos = spherical_kmeans(points, 4, 3, {.n_init = 3});
  CHECK(protos.rows() == 4);
  for (Index p = 0; p < 4; ++p) CHECK(std::abs(protos.row(p).norm() - 1.0) < 1e-9);
}

TEST_CASE("calibrate clusters classes independently") {
  const Index dim = 8;
  const MatX norm_a = sample_vmf({axis(dim, 0), 150.0}, 120, 61);
  const MatX abn_a = sample_vmf({axis(dim, 1), 150.0}, 120, 62);
  const MatX abn_b = sample_vmf({axis(dim, 2), 150.0}, 120, 63);

  const PrototypeBank bank_a = calibrate(norm_a, abn_a, 3, 4, 10.0, 42);
  const PrototypeBank bank_b = calibrate(norm_a, abn_b, 3, 4, 10.0, 42);
  CHECK(bank_a.norm_protos == bank_b.norm_protos);  // abnormal inputs never leak
  CHECK(bank_a.abn_protos != bank_b.abn_protos);
  CHECK(bank_a.kappa == 10.0);

  // Single-prototype calibration recovers the normalized class means.
  const PrototypeBank single = calibrate(norm_a, abn_a, 1, 1, 10.0, 42);
  const VecX oracle_norm = sphere::normalize(VecX(norm_a.colwise().sum().transpose()));
  const VecX oracle_abn = sphere::normalize(VecX(abn_a.colwise().sum().transpose()));
  const double deg1 = M_PI / 180.0;
  CHECK(sphere::geodesic_distance(single.norm_protos.row(0).transpose(), oracle_norm) < deg1);
  CHECK(sphere::geodesic_distance(single.abn_protos.row(0).transpose(), oracle_abn) < deg1);
}

TEST_CASE("table-shaped banks accepted") {
  const Index dim = 6;
  const MatX norm = sample_vmf({axis(dim, 0), 60.0}, 400, 71);
  const MatX abn = sample_vmf({axis(dim, 1), 60.0}, 500, 72);
  const PrototypeBank xd = calibrate(norm, abn, 10, 12, 10.0, 42);
  CHECK(xd.norm_protos.rows() == 10);
  CHECK(xd.abn_protos.rows() == 12);
  const PrototypeBank unified = calibrate(norm, abn, 12, 18, 10.0, 42);
  CHECK(unified.norm_protos.rows() == 12);
  CHECK(unified.abn_protos.rows() == 18);
}

TEST_CASE("objective is nondecreasing across iterations") {
  // Run the public routine at increasing max_iter; the best objective can
  // only improve as updates proceed.
  Rng rng = make_rng(67);
  MatX points(100, 5);
  for (Index i = 0; i < points.rows(); ++i) points.row(i) = random_unit(5, rng).transpose();
  double prev = -1e300;
  for (int iters = 1; iters <= 8; ++iters) {
    const MatX protos = spherical_kmeans(points, 4, 11, {.n_init = 1, .max_iter = iters});
    const double objective = kmeans_objective(points, protos);
    CHECK(objective >= prev - 1e-9);
    prev = objective;
  }
}

TEST_CASE("bank serialization round trip") {
  const Index dim = 5;
  const MatX norm = sample_vmf({axis(dim, 0), 80.0}, 40, 73);
  const MatX abn = sample_vmf({axis(dim, 1), 80.0}, 40, 74);
  const PrototypeBank bank = calibrate(norm, abn, 2, 3, 7.5, 42);

  const auto path = std::filesystem::temp_directory_path() / "geovad_bank_test.gvpb";
  save_bank(bank, path.string());
  const PrototypeBank loaded = load_bank(path.string());
  CHECK(loaded.kappa == bank.kappa);
  CHECK(loaded.norm_protos.rows() == 2);
  CHECK(loaded.abn_protos.rows() == 3);
  // f32 on disk: equality after one round of down-cast.
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < dim; ++j)
      CHECK(loaded.norm_protos(i, j) == static_cast<double>(static_cast<float>(bank.norm_protos(i, j))));

  // Byte-exact file round trip.
  const PrototypeBank reloaded = [&] {
    const auto path2 = std::filesystem::temp_directory_path() / "geovad_bank_test2.gvpb";
    save_bank(loaded, path2.string());
    return load_bank(path2.string());
  }();
  CHECK(reloaded.norm_protos == loaded.norm_protos);
  CHECK(reloaded.abn_protos == loaded.abn_protos);
  std::filesystem::remove(path);
}
