#include "geovad/attention.hpp"

#include <algorithm>
#include <cmath>

#include "geovad/errors.hpp"
#include "geovad/parallel.hpp"
#include "geovad/sphere.hpp"

namespace geovad {

// Raw similarities are symmetric; after per-row top-k the kept edge set may
// be asymmetric (i keeping j does not force j to keep i).
SparseAttention build_sparse_attention(const MatX& feats, const AttentionParams& params) {
  const Index n = feats.rows();
  SparseAttention attn;
  attn.n = n;
  attn.rows.resize(static_cast<std::size_t>(n));

  // Tile height trades similarity-pass memory (block x n doubles) against
  // re-packing the shared right-hand operand once per tile.
  const Index block = std::clamp<Index>(4'000'000 / std::max<Index>(n, 1), 64, 512);
  parallel::for_chunks(n, block, [&](Index row_begin, Index row_end) {
    // One similarity tile per block of rows.
    const MatX sims = feats.middleRows(row_begin, row_end - row_begin) * feats.transpose();
    // Keep the best top_k survivors per row in a bounded heap whose front is
    // the worst kept entry; ranking is (similarity desc, column asc).
    auto better = [](const std::pair<Index, double>& a, const std::pair<Index, double>& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    };
    std::vector<std::pair<Index, double>> kept;
    kept.reserve(static_cast<std::size_t>(params.top_k) + 1);
    for (Index i = row_begin; i < row_end; ++i) {
      const auto sim_row = sims.row(i - row_begin);
      kept.clear();
      for (Index j = 0; j < n; ++j) {
        if (params.exclude_self && j == i) continue;
        const double s = sim_row[j];
        if (s < params.tau) continue;
        if (static_cast<int>(kept.size()) == params.top_k) {
          if (!better({j, s}, kept.front())) continue;
          std::pop_heap(kept.begin(), kept.end(), better);
          kept.back() = {j, s};
          std::push_heap(kept.begin(), kept.end(), better);
        } else {
          kept.emplace_back(j, s);
          std::push_heap(kept.begin(), kept.end(), better);
        }
      }
      std::sort(kept.begin(), kept.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (kept.empty()) continue;

      // Max-shifted softmax at the configured temperature.
      double max_sim = kept.front().second;
      for (const auto& [j, s] : kept) max_sim = std::max(max_sim, s);
      double denom = 0.0;
      auto& out = attn.rows[static_cast<std::size_t>(i)];
      out.reserve(kept.size());
      for (const auto& [j, s] : kept) {
        const double w = std::exp((s - max_sim) / params.temperature);
        out.emplace_back(j, w);
        denom += w;
      }
      for (auto& [j, w] : out) w /= denom;
    }
  });
  return attn;
}

MatX hsa_enhance(const MatX& main_feats, const SparseAttention& attn, double alpha_g) {
  if (attn.n != main_feats.rows())
    throw DimensionMismatchError("hsa_enhance: attention size and feature count disagree");
  MatX out = main_feats;
  if (alpha_g == 0.0) return out;
  parallel::for_chunks(main_feats.rows(), 64, [&](Index begin, Index end) {
    VecX agg(main_feats.cols());
    for (Index i = begin; i < end; ++i) {
      const auto& row = attn.rows[static_cast<std::size_t>(i)];
      if (row.empty()) continue;  // feature passes through unchanged
      agg.setZero();
      for (const auto& [j, w] : row) agg += w * main_feats.row(j).transpose();
      const VecX blended =
          (1.0 - alpha_g) * main_feats.row(i).transpose() + alpha_g * agg;
      out.row(i) = sphere::normalize(blended).transpose();
    }
  });
  return out;
}

}  // namespace geovad
