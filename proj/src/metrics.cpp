#include "geovad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geovad/errors.hpp"
#include "geovad/vmf.hpp"

namespace geovad {

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw DimensionMismatchError("roc_auc: scores and labels disagree");
  const auto n = scores.size();
  std::size_t n_pos = 0;
  for (int lab : labels) n_pos += lab != 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw SingleClassError("roc_auc: labels are uniform");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks within tied groups; rank-sum of positives gives the
  // Mann-Whitney statistic.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] != 0) pos_rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw DimensionMismatchError("average_precision: scores and labels disagree");
  std::size_t n_pos = 0;
  for (int lab : labels) n_pos += lab != 0;
  if (n_pos == 0) throw NoPositivesError("average_precision: no positive labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  double ap = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 0) continue;
    ++hits;
    ap += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  return ap / static_cast<double>(n_pos);
}

SeparabilityStats separability_stats(const MatX& feats, const std::vector<int>& labels,
                                     const PrototypeBank& bank, int overlap_bins) {
  if (static_cast<std::size_t>(feats.rows()) != labels.size() || labels.empty())
    throw DimensionMismatchError("separability_stats: features and labels disagree");
  if (bank.norm_protos.rows() == 0 || bank.abn_protos.rows() == 0)
    throw EmptyBankError("separability_stats: bank must hold at least one prototype per class");

  std::vector<double> delta_norm, delta_abn;
  std::vector<double> mass_norm(static_cast<std::size_t>(overlap_bins), 0.0);
  std::vector<double> mass_abn(static_cast<std::size_t>(overlap_bins), 0.0);
  constexpr double kRadToDeg = 180.0 / M_PI;
  for (Index i = 0; i < feats.rows(); ++i) {
    const VecX f = feats.row(i).transpose();
    const double d_norm = nearest_prototype_distance(f, bank.norm_protos);
    const double d_abn = nearest_prototype_distance(f, bank.abn_protos);
    const double delta = (d_norm - d_abn) * kRadToDeg;
    const double score = sigmoid(bank.kappa * (d_norm - d_abn));
    const auto bin = static_cast<std::size_t>(
        std::min<int>(overlap_bins - 1, static_cast<int>(score * overlap_bins)));
    if (labels[static_cast<std::size_t>(i)] != 0) {
      delta_abn.push_back(delta);
      mass_abn[bin] += 1.0;
    } else {
      delta_norm.push_back(delta);
      mass_norm[bin] += 1.0;
    }
  }
  if (delta_norm.empty() || delta_abn.empty())
    throw SingleClassError("separability_stats: labels are uniform");

  auto moments = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return std::pair<double, double>{mean, var};
  };
  const auto [m0, v0] = moments(delta_norm);
  const auto [m1, v1] = moments(delta_abn);
  const double n0 = static_cast<double>(delta_norm.size());
  const double n1 = static_cast<double>(delta_abn.size());

  SeparabilityStats stats;
  stats.overlap_bins = overlap_bins;
  stats.delta_mu = std::abs(m1 - m0);
  stats.sigma_delta = std::sqrt((n0 * v0 + n1 * v1) / (n0 + n1));
  stats.fisher = v0 + v1 > 0.0 ? (m1 - m0) * (m1 - m0) / (v0 + v1) : 0.0;
  double overlap = 0.0;
  for (std::size_t b = 0; b < static_cast<std::size_t>(overlap_bins); ++b)
    overlap += std::min(mass_norm[b] / n0, mass_abn[b] / n1);
  stats.score_overlap = overlap;
  return stats;
}

}  // namespace geovad
