#pragma once

// Random sparse integer matrices for tests and rank benchmarks.

#include <cstddef>
#include <cstdint>

#include "l2approx/linearize.hpp"

namespace l2approx {

struct RandomSparseSpec {
  std::size_t rows = 0, cols = 0;
  std::size_t max_row_nnz = 5;   // nonzeros per row drawn from [1, max_row_nnz]
  std::int64_t max_abs = 9;      // entries drawn from [-max_abs, max_abs] \ {0}
  double dependent_fraction = 0; // rows replaced by sums of two earlier rows
};

SparseIntMatrix random_sparse_matrix(const RandomSparseSpec& spec, std::uint64_t seed);

// `blocks` independent random square blocks of side `block`, each with up to
// `row_nnz` nonzeros per row and about 10% dependent rows, placed on the
// diagonal and then hidden by random row and column permutations.
SparseIntMatrix hidden_block_matrix(std::size_t blocks, std::size_t block, std::size_t row_nnz,
                                    std::uint64_t seed);

}  // namespace l2approx
