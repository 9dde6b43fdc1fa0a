#include "geovad/vmf.hpp"

#include <cmath>

#include "geovad/errors.hpp"
#include "geovad/sphere.hpp"

namespace geovad {

double nearest_prototype_distance(const VecX& f, const MatX& protos) {
  // min over rows of arccos(<f, proto>) == arccos(max cosine)
  const double best = (protos * f).maxCoeff();
  return std::acos(sphere::clamp_unit(best));
}

double vmf_score(const VecX& f, const PrototypeBank& bank) {
  if (bank.norm_protos.rows() == 0 || bank.abn_protos.rows() == 0)
    throw EmptyBankError("vmf_score: bank must hold at least one prototype per class");
  if (bank.dim() != f.size())
    throw DimensionMismatchError("vmf_score: feature and bank dimensions disagree");
  const double d_norm = nearest_prototype_distance(f, bank.norm_protos);
  const double d_abn = nearest_prototype_distance(f, bank.abn_protos);
  return sigmoid(bank.kappa * (d_norm - d_abn));
}

namespace {

// Tangential cosine W ~ density proportional to exp(kappa w)(1-w^2)^{(D-3)/2}
// via the Wood (1994) beta-rejection scheme. Valid for kappa >= 0.
double sample_tangential_cosine(double kappa, Index dim, Rng& rng) {
  const double dm1 = static_cast<double>(dim - 1);
  const double b = (-2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dm1 * dm1)) / dm1;
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + dm1 * std::log(1.0 - x0 * x0);
  std::gamma_distribution<double> gamma(dm1 / 2.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    const double g1 = gamma(rng);
    const double g2 = gamma(rng);
    const double z = g1 / (g1 + g2);  // Beta((D-1)/2, (D-1)/2)
    const double w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = unif(rng);
    if (kappa * w + dm1 * std::log(1.0 - x0 * w) - c >= std::log(u)) return w;
  }
}

}  // namespace

VecX sample_vmf_one(const VmfParams& params, Rng& rng) {
  const Index dim = params.mu.size();
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double w = sample_tangential_cosine(params.kappa, dim, rng);
  // Uniform tangent direction orthogonal to mu.
  VecX v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  v -= params.mu * params.mu.dot(v);
  double n = v.norm();
  while (n < sphere::kZeroNormTol) {
    for (Index i = 0; i < dim; ++i) v[i] = gauss(rng);
    v -= params.mu * params.mu.dot(v);
    n = v.norm();
  }
  v /= n;
  VecX out = w * params.mu + std::sqrt(std::max(0.0, 1.0 - w * w)) * v;
  return out / out.norm();
}

MatX sample_vmf(const VmfParams& params, Index n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  MatX out(n, params.mu.size());
  for (Index i = 0; i < n; ++i) out.row(i) = sample_vmf_one(params, rng).transpose();
  return out;
}

}  // namespace geovad
