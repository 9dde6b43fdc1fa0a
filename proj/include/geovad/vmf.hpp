#pragma once

#include <cstdint>
#include <vector>

#include "geovad/prototypes.hpp"
#include "geovad/rng.hpp"
#include "geovad/types.hpp"

namespace geovad {

struct VmfParams {
  VecX mu;        // unit mean direction
  double kappa = 0.0;  // concentration >= 0
};

// Numerically stable logistic sigmoid.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log vMF(x; mu, kappa) up to the normalizer: kappa * <mu, x>. Only
// likelihood ratios are consumed downstream, so the Bessel term is omitted.
inline double vmf_log_density_unnormalized(const VecX& x, const VmfParams& params) {
  return params.kappa * params.mu.dot(x);
}

// Likelihood-ratio anomaly score: sigmoid(kappa * (d_norm - d_abn)) where
// d_c is the geodesic distance to the nearest prototype of class c.
double vmf_score(const VecX& f, const PrototypeBank& bank);

// Geodesic distance to the nearest prototype in a class bank (rows).
double nearest_prototype_distance(const VecX& f, const MatX& protos);

// Exact vMF sampler (Wood 1994 rejection scheme on the tangential
// component). Deterministic for a fixed generator state; kappa = 0 yields the
// uniform distribution on the sphere.
VecX sample_vmf_one(const VmfParams& params, Rng& rng);
MatX sample_vmf(const VmfParams& params, Index n, std::uint64_t seed);

}  // namespace geovad
