#include "geovad/dlsp.hpp"

#include <cmath>
#include <string>

#include "geovad/errors.hpp"
#include "geovad/vmf.hpp"

namespace geovad {

namespace {

struct Gaussian {
  double mean = 0.0;
  double var = 0.0;

  double log_pdf(double x) const {
    const double d = x - mean;
    return -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
  }
};

// Population-moment fit to the cosine similarities of a class against its own
// normalized-mean centroid.
std::vector<double> centroid_similarities(const MatX& feats) {
  VecX centroid = feats.colwise().mean().transpose();
  const double n = centroid.norm();
  if (n < 1e-12) throw DegenerateMeanError("dlsp: class centroid vanished");
  centroid /= n;
  const VecX sims = feats * centroid;
  return {sims.data(), sims.data() + sims.size()};
}

Gaussian fit(const std::vector<double>& xs) {
  Gaussian g;
  for (double x : xs) g.mean += x;
  g.mean /= static_cast<double>(xs.size());
  for (double x : xs) g.var += (x - g.mean) * (x - g.mean);
  g.var /= static_cast<double>(xs.size());
  return g;
}

double symmetric_kl(const Gaussian& p, const Gaussian& q) {
  const double dm = q.mean - p.mean;
  return 0.5 * (p.var / q.var + q.var / p.var - 2.0) +
         0.5 * dm * dm * (1.0 / p.var + 1.0 / q.var);
}

double binary_entropy_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

std::vector<double> zscore(const std::vector<double>& xs) {
  std::vector<double> z(xs.size(), 0.0);
  if (xs.size() < 2) return z;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  const double sd = std::sqrt(var);
  if (sd < 1e-15) return z;  // constant series
  for (std::size_t i = 0; i < xs.size(); ++i) z[i] = (xs[i] - mean) / sd;
  return z;
}

}  // namespace

LayerSaliency dlsp_evaluate(const std::vector<MatX>& per_layer_normal,
                            const std::vector<MatX>& per_layer_abn) {
  if (per_layer_normal.size() != per_layer_abn.size() || per_layer_normal.empty())
    throw DimensionMismatchError("dlsp_evaluate: layer counts disagree or are zero");

  LayerSaliency out;
  const std::size_t layers = per_layer_normal.size();
  for (std::size_t l = 0; l < layers; ++l) {
    if (per_layer_normal[l].rows() == 0 || per_layer_abn[l].rows() == 0)
      throw Error("dlsp_evaluate: empty feature set at layer " + std::to_string(l));
    const auto sims_norm = centroid_similarities(per_layer_normal[l]);
    const auto sims_abn = centroid_similarities(per_layer_abn[l]);
    const Gaussian g_norm = fit(sims_norm);
    const Gaussian g_abn = fit(sims_abn);
    if (g_norm.var < 1e-12 || g_abn.var < 1e-12)
      throw DegenerateVarianceError("dlsp_evaluate: degenerate similarity variance at layer " +
                                    std::to_string(l));

    double ldr_sum = 0.0;
    double entropy_sum = 0.0;
    auto account = [&](const std::vector<double>& sims, const Gaussian& own,
                       const Gaussian& other) {
      for (double s : sims) {
        const double lp_own = own.log_pdf(s);
        const double lp_other = other.log_pdf(s);
        ldr_sum += std::abs(lp_own - lp_other);
        entropy_sum += binary_entropy_bits(sigmoid(lp_own - lp_other));
      }
    };
    account(sims_norm, g_norm, g_abn);
    account(sims_abn, g_abn, g_norm);
    const double total = static_cast<double>(sims_norm.size() + sims_abn.size());

    out.kl.push_back(symmetric_kl(g_norm, g_abn));
    out.ldr.push_back(ldr_sum / total);
    out.entropy.push_back(entropy_sum / total);
  }

  out.z_kl = zscore(out.kl);
  out.z_ldr = zscore(out.ldr);
  out.z_entropy = zscore(out.entropy);
  out.composite.resize(layers);
  for (std::size_t l = 0; l < layers; ++l)
    out.composite[l] = out.z_kl[l] + out.z_ldr[l] - out.z_entropy[l];
  return out;
}

std::size_t select_layer(const LayerSaliency& saliency) {
  if (saliency.composite.empty()) throw Error("select_layer: no layers");
  std::size_t best = 0;
  for (std::size_t l = 1; l < saliency.composite.size(); ++l)
    if (saliency.composite[l] > saliency.composite[best]) best = l;
  return best;
}

}  // namespace geovad
