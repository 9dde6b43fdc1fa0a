#pragma once

#include <cstdint>
#include <functional>

#include "geovad/types.hpp"

namespace geovad::parallel {

// Global worker count (1 = sequential). Set from the CLI --threads flag.
void set_threads(int n);
int threads();

// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries do
// not depend on the worker count, so any computation whose chunks write to
// disjoint outputs produces identical results for every thread count.
void for_chunks(Index n, Index chunk, const std::function<void(Index, Index)>& fn);

// Convenience wrapper: fn(i) per index.
void for_each_index(Index n, const std::function<void(Index)>& fn);

}  // namespace geovad::parallel
