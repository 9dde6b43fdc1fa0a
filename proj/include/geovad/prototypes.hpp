#pragma once

#include <cstdint>
#include <string>

#include "geovad/types.hpp"

namespace geovad {

// Directional prototypes calibrated per class, one prototype per row, plus
// the global vMF concentration used for scoring.
struct PrototypeBank {
  MatX norm_protos;  // K_N x D, unit rows
  MatX abn_protos;   // K_A x D, unit rows
  double kappa = 10.0;

  Index dim() const { return norm_protos.cols(); }
};

struct KMeansOptions {
  int n_init = 10;
  int max_iter = 100;
};

// Spherical K-Means: cosine-similarity assignment (ties to the lowest
// prototype index), normalized intra-cluster mean update, empty clusters
// re-seeded to the point farthest from its assigned centroid. Best of n_init
// seeded restarts by total within-cluster cosine similarity; the lowest
// restart index wins ties. Points one sample per row, unit norm.
MatX spherical_kmeans(const MatX& points, int k, std::uint64_t seed,
                      const KMeansOptions& opts = {});

// Total within-cluster cosine similarity of an assignment-optimal labeling.
double kmeans_objective(const MatX& points, const MatX& centroids);

// Clusters each class independently; the bank carries kappa.
PrototypeBank calibrate(const MatX& normal_feats, const MatX& abn_feats, int k_n, int k_a,
                        double kappa, std::uint64_t seed, const KMeansOptions& opts = {});

// Versioned binary record: magic "GVPB", u32 version=1, u32 D, u32 K_N,
// u32 K_A, f64 kappa, then K_N*D + K_A*D little-endian f32 values.
void save_bank(const PrototypeBank& bank, const std::string& path);
PrototypeBank load_bank(const std::string& path);

}  // namespace geovad
