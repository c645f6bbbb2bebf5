#include "l2approx/benchmark.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "l2approx/error.hpp"

namespace l2approx {

namespace {

using RowMap = std::map<std::uint32_t, mpz_class>;

std::vector<RowMap> random_rows(const RandomSparseSpec& spec, std::mt19937_64& rng) {
  if (spec.rows == 0 || spec.cols == 0 || spec.max_row_nnz == 0 || spec.max_abs <= 0)
    throw InvalidArgument("random sparse matrix needs positive shape, density and range");
  std::uniform_int_distribution<std::size_t> count(1, std::min(spec.max_row_nnz, spec.cols));
  std::uniform_int_distribution<std::uint32_t> col(0, static_cast<std::uint32_t>(spec.cols - 1));
  std::uniform_int_distribution<std::int64_t> value(-spec.max_abs, spec.max_abs - 1);
  std::bernoulli_distribution dependent(spec.dependent_fraction);
  std::vector<RowMap> rows(spec.rows);
  for (std::size_t i = 0; i < spec.rows; ++i) {
    if (i >= 2 && dependent(rng)) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      const auto& a = rows[pick(rng)];
      const auto& b = rows[pick(rng)];
      if (a.size() + b.size() <= spec.max_row_nnz) {
        RowMap sum = a;
        for (auto& [c, v] : b) sum[c] += v;
        std::erase_if(sum, [](const auto& e) { return e.second == 0; });
        rows[i] = std::move(sum);
        continue;
      }
    }
    const std::size_t k = count(rng);
    while (rows[i].size() < k) {
      std::int64_t v = value(rng);
      if (v >= 0) ++v;  // skip zero
      rows[i].emplace(col(rng), v);
    }
  }
  return rows;
}

}  // namespace

SparseIntMatrix random_sparse_matrix(const RandomSparseSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto rows = random_rows(spec, rng);
  std::vector<Triplet> t;
  for (std::uint32_t i = 0; i < rows.size(); ++i)
    for (auto& [c, v] : rows[i]) t.push_back({i, c, v});
  return SparseIntMatrix(spec.rows, spec.cols, std::move(t));
}

SparseIntMatrix hidden_block_matrix(std::size_t blocks, std::size_t block, std::size_t row_nnz,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = blocks * block;
  std::vector<std::uint32_t> row_perm(n), col_perm(n);
  std::iota(row_perm.begin(), row_perm.end(), 0u);
  std::iota(col_perm.begin(), col_perm.end(), 0u);
  std::shuffle(row_perm.begin(), row_perm.end(), rng);
  std::shuffle(col_perm.begin(), col_perm.end(), rng);
  RandomSparseSpec spec{block, block, row_nnz, 9, 0.1};
  std::vector<Triplet> t;
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto rows = random_rows(spec, rng);
    for (std::size_t i = 0; i < block; ++i)
      for (auto& [c, v] : rows[i])
        t.push_back({row_perm[b * block + i], col_perm[b * block + c], v});
  }
  return SparseIntMatrix(n, n, std::move(t));
}

}  // namespace l2approx
