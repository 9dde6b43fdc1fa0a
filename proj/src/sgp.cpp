#include "geovad/sgp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geovad/errors.hpp"
#include "geovad/sphere.hpp"
#include "geovad/vmf.hpp"

namespace geovad {

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    const double lower =
        *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

AmbiguityInterval mad_interval(const std::vector<double>& scores, const SgpParams& params) {
  if (scores.empty()) throw Error("mad_interval: empty score list");
  const double med = median(scores);
  std::vector<double> dev(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) dev[i] = std::abs(scores[i] - med);
  AmbiguityInterval interval;
  interval.mad = median(std::move(dev));
  interval.radius =
      params.r_min +
      (params.r_max - params.r_min) * sigmoid(-params.lambda_r * (interval.mad - params.tau_r));
  interval.rho_low = std::max(0.0, 0.5 - interval.radius);
  interval.rho_high = std::min(1.0, 0.5 + interval.radius);
  return interval;
}

std::vector<TriLabel> tri_classify(const std::vector<double>& scores,
                                   const AmbiguityInterval& interval) {
  std::vector<TriLabel> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] < interval.rho_low) {
      labels[i] = TriLabel::norm;
    } else if (scores[i] > interval.rho_high) {
      labels[i] = TriLabel::abn;
    } else {
      labels[i] = TriLabel::amb;
    }
  }
  return labels;
}

namespace {

// Majority winner of nearest-prototype votes; count ties resolve to the
// lowest prototype index. Returns -1 when no voter exists.
Index majority_vote(const MatX& feats, const std::vector<Index>& voters, const MatX& protos) {
  if (voters.empty()) return -1;
  std::vector<Index> counts(static_cast<std::size_t>(protos.rows()), 0);
  for (Index i : voters) {
    Index best = 0;
    (protos * feats.row(i).transpose()).maxCoeff(&best);
    ++counts[static_cast<std::size_t>(best)];
  }
  Index winner = 0;
  for (Index k = 1; k < protos.rows(); ++k)
    if (counts[static_cast<std::size_t>(k)] > counts[static_cast<std::size_t>(winner)]) winner = k;
  return winner;
}

std::vector<VecX> normal_dominants(const MatX& feats, const std::vector<Index>& norm_voters,
                                   const MatX& norm_protos) {
  std::vector<Index> counts(static_cast<std::size_t>(norm_protos.rows()), 0);
  for (Index i : norm_voters) {
    Index best = 0;
    (norm_protos * feats.row(i).transpose()).maxCoeff(&best);
    ++counts[static_cast<std::size_t>(best)];
  }
  // Top-2 voted prototypes, ties to the lowest index; prototypes without
  // votes are never dominant.
  std::vector<Index> order(counts.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (counts[static_cast<std::size_t>(a)] != counts[static_cast<std::size_t>(b)])
      return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
    return a < b;
  });
  std::vector<VecX> dominants;
  for (Index k : order) {
    if (counts[static_cast<std::size_t>(k)] == 0 || dominants.size() == 2) break;
    dominants.push_back(norm_protos.row(k).transpose());
  }
  return dominants;
}

}  // namespace

DominantSet vote_dominant(const MatX& feats, const std::vector<TriLabel>& labels,
                          const PrototypeBank& bank, const SgpParams& params, Index t_total) {
  if (bank.norm_protos.rows() == 0 || bank.abn_protos.rows() == 0)
    throw EmptyBankError("vote_dominant: bank must hold at least one prototype per class");

  std::vector<Index> norm_voters;
  std::vector<Index> abn_voters;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == TriLabel::norm) norm_voters.push_back(static_cast<Index>(i));
    if (labels[i] == TriLabel::abn) abn_voters.push_back(static_cast<Index>(i));
  }

  DominantSet dom;
  dom.norms = normal_dominants(feats, norm_voters, bank.norm_protos);
  if (dom.norms.empty()) {
    // No clearly-normal clip: fall back to the normal prototype nearest the
    // clip centroid of the whole video.
    VecX centroid = feats.colwise().mean().transpose();
    const double n = centroid.norm();
    Index best = 0;
    if (n > sphere::kZeroNormTol) {
      centroid /= n;
      (bank.norm_protos * centroid).maxCoeff(&best);
    }
    dom.norms.push_back(bank.norm_protos.row(best).transpose());
  }

  const auto n_min = static_cast<Index>(
      std::max(3.0, std::floor(params.gamma_min * static_cast<double>(t_total))));
  if (static_cast<Index>(abn_voters.size()) < n_min) {
    dom.fully_normal = true;
    return dom;
  }
  dom.abn = bank.abn_protos.row(majority_vote(feats, abn_voters, bank.abn_protos)).transpose();
  return dom;
}

std::vector<bool> neighbor_assign(const std::vector<Index>& amb_indices,
                                  const SparseAttention& attn, const MatX& enh_feats,
                                  const DominantSet& dom, double delta_margin) {
  if (dom.fully_normal || !dom.abn.has_value())
    throw Error("neighbor_assign: requires a dominant anomalous prototype");
  std::vector<bool> is_abn(amb_indices.size(), false);
  for (std::size_t a = 0; a < amb_indices.size(); ++a) {
    const Index i = amb_indices[a];
    VecX g;
    const auto& row = attn.rows[static_cast<std::size_t>(i)];
    if (!row.empty()) {
      VecX agg = VecX::Zero(enh_feats.cols());
      for (const auto& [j, w] : row) agg += w * enh_feats.row(j).transpose();
      g = sphere::normalize(agg);
    } else {
      g = enh_feats.row(i).transpose();  // isolated clip: self-fallback
    }
    double sim_norm = -2.0;
    for (const auto& proto : dom.norms) sim_norm = std::max(sim_norm, g.dot(proto));
    const double sim_abn = g.dot(*dom.abn);
    is_abn[a] = sim_abn > sim_norm + delta_margin;
  }
  return is_abn;
}

double adaptive_beta(double score, const AmbiguityInterval& interval, double beta_base) {
  if (score < interval.rho_low || score > interval.rho_high)
    throw OutOfIntervalError("adaptive_beta: score outside the ambiguity interval");
  double dhat;
  if (score >= 0.5) {
    const double denom = interval.rho_high - 0.5;
    dhat = denom > 0.0 ? (score - 0.5) / denom : 1.0;
  } else {
    const double denom = 0.5 - interval.rho_low;
    dhat = denom > 0.0 ? (0.5 - score) / denom : 1.0;
  }
  return beta_base * (1.0 - 0.5 * dhat);
}

namespace {

// SLERP pull toward the target, skipped for degenerate arcs.
void pull_feature(MatX& pulled, Index i, const VecX& target, double beta) {
  const VecX f = pulled.row(i).transpose();
  const double omega = sphere::geodesic_distance(f, target);
  if (std::sin(omega) < sphere::kSlerpDegenerateSin) return;
  pulled.row(i) = sphere::slerp(f, target, beta).transpose();
}

const VecX& nearest_normal_dominant(const VecX& f, const std::vector<VecX>& norms) {
  std::size_t best = 0;
  double best_sim = f.dot(norms[0]);
  for (std::size_t m = 1; m < norms.size(); ++m) {
    const double s = f.dot(norms[m]);
    if (s > best_sim) {
      best_sim = s;
      best = m;
    }
  }
  return norms[best];
}

}  // namespace

SgpResult sgp_video(const MatX& enh_feats, const MatX& vis_feats,
                    const std::vector<double>& init_scores, const PrototypeBank& bank,
                    const SgpParams& params) {
  const Index t_total = enh_feats.rows();
  if (t_total == 0 || vis_feats.rows() != t_total ||
      static_cast<Index>(init_scores.size()) != t_total)
    throw DimensionMismatchError("sgp_video: feature and score lengths disagree");

  SgpResult result;
  result.interval = mad_interval(init_scores, params);
  const std::vector<TriLabel> labels = tri_classify(init_scores, result.interval);
  std::vector<Index> amb_indices;
  for (Index i = 0; i < t_total; ++i)
    if (labels[static_cast<std::size_t>(i)] == TriLabel::amb) amb_indices.push_back(i);

  const DominantSet dom = vote_dominant(enh_feats, labels, bank, params, t_total);
  result.fully_normal = dom.fully_normal;
  result.pulled_feats = enh_feats;  // non-ambiguous rows stay bit-identical

  if (dom.fully_normal) {
    // Below the anomalous-evidence threshold: ambiguous clips are pulled only
    // toward the nearest dominant normal prototype.
    for (Index i : amb_indices) {
      const VecX f = enh_feats.row(i).transpose();
      const VecX& target = nearest_normal_dominant(f, dom.norms);
      const double beta =
          adaptive_beta(init_scores[static_cast<std::size_t>(i)], result.interval,
                        params.beta_base);
      pull_feature(result.pulled_feats, i, target, beta);
    }
  } else if (!amb_indices.empty()) {
    const SparseAttention attn = build_sparse_attention(vis_feats, params.attention);
    const std::vector<bool> assign_abn =
        neighbor_assign(amb_indices, attn, enh_feats, dom, params.delta_margin);
    for (std::size_t a = 0; a < amb_indices.size(); ++a) {
      const Index i = amb_indices[a];
      const VecX f = enh_feats.row(i).transpose();
      const VecX& target = assign_abn[a] ? *dom.abn : nearest_normal_dominant(f, dom.norms);
      const double beta =
          adaptive_beta(init_scores[static_cast<std::size_t>(i)], result.interval,
                        params.beta_base);
      pull_feature(result.pulled_feats, i, target, beta);
    }
  }

  result.final_scores.resize(static_cast<std::size_t>(t_total));
  for (Index i = 0; i < t_total; ++i)
    result.final_scores[static_cast<std::size_t>(i)] =
        vmf_score(result.pulled_feats.row(i).transpose(), bank);
  return result;
}

}  // namespace geovad
