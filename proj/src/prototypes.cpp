#include "geovad/prototypes.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <vector>

#include "geovad/errors.hpp"
#include "geovad/io_detail.hpp"
#include "geovad/rng.hpp"

namespace geovad {

namespace {

// Assignment step: argmax cosine per point, ties to the lowest prototype
// index (maxCoeff scans in order and keeps the first maximum).
void assign(const MatX& sims, std::vector<Index>& labels) {
  for (Index i = 0; i < sims.rows(); ++i) {
    Index best = 0;
    sims.row(i).maxCoeff(&best);
    labels[static_cast<std::size_t>(i)] = best;
  }
}

struct RestartResult {
  MatX centroids;
  double objective = 0.0;
};

RestartResult run_restart(const MatX& points, int k, Rng& rng, const KMeansOptions& opts) {
  const Index n = points.rows();
  const Index dim = points.cols();

  // Initialize with k distinct points (partial Fisher-Yates draw).
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  MatX centroids(k, dim);
  for (int j = 0; j < k; ++j) {
    std::uniform_int_distribution<Index> pick(j, n - 1);
    std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick(rng))]);
    centroids.row(j) = points.row(idx[static_cast<std::size_t>(j)]);
  }

  std::vector<Index> labels(static_cast<std::size_t>(n), 0);
  std::vector<Index> prev_labels;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const MatX sims = points * centroids.transpose();
    assign(sims, labels);

    bool repaired = false;
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index lab : labels) ++counts[static_cast<std::size_t>(lab)];
    std::vector<char> donated(static_cast<std::size_t>(n), 0);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // Re-seed to the point farthest (lowest cosine) from its centroid.
      Index worst = -1;
      double worst_sim = 2.0;
      for (Index i = 0; i < n; ++i) {
        if (donated[static_cast<std::size_t>(i)]) continue;
        const double s = sims(i, labels[static_cast<std::size_t>(i)]);
        if (s < worst_sim) {
          worst_sim = s;
          worst = i;
        }
      }
      centroids.row(c) = points.row(worst);
      donated[static_cast<std::size_t>(worst)] = 1;
      repaired = true;
    }
    if (repaired) {
      const MatX sims2 = points * centroids.transpose();
      assign(sims2, labels);
    }

    if (!repaired && labels == prev_labels) break;
    prev_labels = labels;

    MatX sums = MatX::Zero(k, dim);
    for (Index i = 0; i < n; ++i) sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      const double norm = sums.row(c).norm();
      if (norm > 1e-12) centroids.row(c) = sums.row(c) / norm;
      // A vanishing cluster sum keeps the previous centroid.
    }
  }

  RestartResult result;
  result.centroids = std::move(centroids);
  result.objective = kmeans_objective(points, result.centroids);
  return result;
}

}  // namespace

double kmeans_objective(const MatX& points, const MatX& centroids) {
  const MatX sims = points * centroids.transpose();
  double total = 0.0;
  for (Index i = 0; i < sims.rows(); ++i) total += sims.row(i).maxCoeff();
  return total;
}

MatX spherical_kmeans(const MatX& points, int k, std::uint64_t seed, const KMeansOptions& opts) {
  if (k < 1) throw TooFewPointsError("spherical_kmeans: k must be >= 1");
  if (points.rows() < k)
    throw TooFewPointsError("spherical_kmeans: fewer points than requested clusters");

  RestartResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.n_init; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    RestartResult cand = run_restart(points, k, rng, opts);
    if (cand.objective > best.objective) best = std::move(cand);  // ties keep the earlier restart
  }
  return best.centroids;
}

PrototypeBank calibrate(const MatX& normal_feats, const MatX& abn_feats, int k_n, int k_a,
                        double kappa, std::uint64_t seed, const KMeansOptions& opts) {
  PrototypeBank bank;
  bank.norm_protos = spherical_kmeans(normal_feats, k_n, seed, opts);
  bank.abn_protos = spherical_kmeans(abn_feats, k_a, seed, opts);
  bank.kappa = kappa;
  return bank;
}

void save_bank(const PrototypeBank& bank, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_bank: cannot open " + path);
  io_detail::write_magic(out, "GVPB");
  io_detail::write_u32(out, 1);
  io_detail::write_u32(out, static_cast<std::uint32_t>(bank.dim()));
  io_detail::write_u32(out, static_cast<std::uint32_t>(bank.norm_protos.rows()));
  io_detail::write_u32(out, static_cast<std::uint32_t>(bank.abn_protos.rows()));
  io_detail::write_f64(out, bank.kappa);
  io_detail::write_f32_matrix(out, bank.norm_protos);
  io_detail::write_f32_matrix(out, bank.abn_protos);
}

PrototypeBank load_bank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_bank: cannot open " + path);
  io_detail::Reader reader(in, path);
  reader.expect_magic("GVPB");
  const std::uint32_t version = reader.u32();
  if (version != 1) throw BadMagicError("load_bank: unsupported version");
  const auto dim = static_cast<Index>(reader.u32());
  const auto k_n = static_cast<Index>(reader.u32());
  const auto k_a = static_cast<Index>(reader.u32());
  PrototypeBank bank;
  bank.kappa = reader.f64();
  bank.norm_protos = reader.f32_matrix(k_n, dim);
  bank.abn_protos = reader.f32_matrix(k_a, dim);
  return bank;
}

}  // namespace geovad
