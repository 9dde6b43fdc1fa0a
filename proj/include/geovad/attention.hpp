#pragma once

#include <utility>
#include <vector>

#include "geovad/types.hpp"

namespace geovad {

struct AttentionParams {
  double tau = 0.70;        // similarity threshold in [-1, 1]
  int top_k = 20;           // per-row neighbor cap, >= 1
  double temperature = 1.0; // softmax temperature > 0
  bool exclude_self = true;
};

// Row-normalized sparse similarity matrix. Nonempty rows sum to 1; rows with
// no surviving neighbor stay empty. Storage is 16 bytes per edge (column
// index + weight); the dense similarity pass is tiled and never materialized.
struct SparseAttention {
  Index n = 0;
  std::vector<std::vector<std::pair<Index, double>>> rows;

  Index edge_count() const {
    std::size_t total = 0;
    for (const auto& row : rows) total += row.size();
    return static_cast<Index>(total);
  }
};

// Pairwise cosine similarities sparsified by threshold then per-row top-k
// (ties to the lower column index), optional self-exclusion, then row softmax
// at the given temperature over the survivors. Features one unit row per
// sample; similarity tiles are computed in row blocks.
SparseAttention build_sparse_attention(const MatX& feats, const AttentionParams& params);

// Blends each feature with its attention-weighted neighborhood aggregate and
// projects back to the sphere. Rows with empty attention pass through
// unchanged, as does the alpha_g = 0 identity.
MatX hsa_enhance(const MatX& main_feats, const SparseAttention& attn, double alpha_g);

}  // namespace geovad
