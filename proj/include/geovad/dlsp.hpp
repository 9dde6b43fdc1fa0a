#pragma once

#include <vector>

#include "geovad/types.hpp"

namespace geovad {

// Per-layer class-separability record. Z-scores are taken across layers with
// population standard deviation; a constant series (or a single layer) yields
// zero Z-scores. composite = z_kl + z_ldr - z_entropy.
struct LayerSaliency {
  std::vector<double> kl, ldr, entropy;
  std::vector<double> z_kl, z_ldr, z_entropy;
  std::vector<double> composite;

  std::size_t layer_count() const { return composite.size(); }
};

// For every layer: each class's cosine similarities to its own class centroid
// are fitted with a one-dimensional Gaussian; the layer is then scored by the
// symmetric KL divergence between the two fits, the mean absolute log density
// ratio over all samples, and the mean binary entropy (bits) of the
// two-Gaussian posterior. Features one unit row per sample.
LayerSaliency dlsp_evaluate(const std::vector<MatX>& per_layer_normal,
                            const std::vector<MatX>& per_layer_abn);

// argmax of the composite score, lowest index on ties.
std::size_t select_layer(const LayerSaliency& saliency);

}  // namespace geovad
