#pragma once

#include <optional>
#include <vector>

#include "geovad/attention.hpp"
#include "geovad/prototypes.hpp"
#include "geovad/types.hpp"

namespace geovad {

struct SgpParams {
  double beta_base = 0.5;     // max pull strength in (0, 1)
  double r_min = 0.05;        // ambiguity radius bounds, 0 < r_min < r_max <= 0.5
  double r_max = 0.25;
  double lambda_r = 20.0;     // radius transition sharpness > 0
  double tau_r = 0.08;        // reference MAD
  double gamma_min = 0.02;    // minimum anomalous fraction in (0, 1)
  double delta_margin = 0.01; // conservatism margin >= 0
  AttentionParams attention{0.70, 10, 0.10, true};  // intra-video A_H
};

// Adaptive ambiguity interval [rho_low, rho_high] around the 0.5 decision
// boundary, sized from the MAD of the video's initial scores.
struct AmbiguityInterval {
  double rho_low = 0.0;
  double rho_high = 1.0;
  double mad = 0.0;
  double radius = 0.0;
};

enum class TriLabel { norm, amb, abn };

// Per-video dominant prototypes: at most one anomalous direction, one or two
// normal directions. fully_normal marks videos whose anomalous evidence fell
// below the minimum count threshold.
struct DominantSet {
  std::optional<VecX> abn;
  std::vector<VecX> norms;
  bool fully_normal = false;
};

double median(std::vector<double> values);

AmbiguityInterval mad_interval(const std::vector<double>& scores, const SgpParams& params);

std::vector<TriLabel> tri_classify(const std::vector<double>& scores,
                                   const AmbiguityInterval& interval);

// Nearest-prototype voting over the clearly-normal and clearly-anomalous
// clips. Vote-count ties resolve to the lowest prototype index; an empty
// normal set falls back to the normal prototype nearest the clip centroid.
DominantSet vote_dominant(const MatX& feats, const std::vector<TriLabel>& labels,
                          const PrototypeBank& bank, const SgpParams& params, Index t_total);

// Neighbor-consensus labels for the ambiguous clips: attention-aggregated
// neighborhood feature (own feature for isolated clips) compared against the
// dominant prototypes with the conservatism margin. true = anomalous.
std::vector<bool> neighbor_assign(const std::vector<Index>& amb_indices,
                                  const SparseAttention& attn, const MatX& enh_feats,
                                  const DominantSet& dom, double delta_margin);

// Score-adaptive pull strength: beta_base at s = 0.5 decaying linearly to
// beta_base/2 at the interval boundary.
double adaptive_beta(double score, const AmbiguityInterval& interval, double beta_base);

struct SgpResult {
  std::vector<double> final_scores;
  MatX pulled_feats;
  AmbiguityInterval interval;
  bool fully_normal = false;
};

// Full per-video procedure: tri-classification, dominant voting, neighbor
// consensus over the intra-video attention graph, score-adaptive geodesic
// pulling of the ambiguous clips, then re-scoring of the pulled features.
SgpResult sgp_video(const MatX& enh_feats, const MatX& vis_feats,
                    const std::vector<double>& init_scores, const PrototypeBank& bank,
                    const SgpParams& params);

}  // namespace geovad
