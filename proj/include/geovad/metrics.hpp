#pragma once

#include <vector>

#include "geovad/prototypes.hpp"
#include "geovad/types.hpp"

namespace geovad {

// Frame-level ROC AUC as the Mann-Whitney probability estimate; ties
// contribute 1/2. Requires both labels present.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Area under the precision-recall step function (no interpolation):
// descending score order, ties broken by original index. Requires at least
// one positive.
double average_precision(const std::vector<double>& scores, const std::vector<int>& labels);

// Class-separability statistics of the per-sample nearest-prototype distance
// difference Delta = d(nearest normal) - d(nearest abnormal), in degrees.
struct SeparabilityStats {
  double delta_mu = 0.0;      // |mean(Delta|abn) - mean(Delta|norm)|, degrees
  double sigma_delta = 0.0;   // pooled standard deviation of Delta, degrees
  double fisher = 0.0;        // (m1-m0)^2 / (v1+v0) over Delta
  double score_overlap = 0.0; // overlap coefficient of per-class score histograms
  int overlap_bins = 64;
};

SeparabilityStats separability_stats(const MatX& feats, const std::vector<int>& labels,
                                     const PrototypeBank& bank, int overlap_bins = 64);

}  // namespace geovad
