#pragma once

// Finite-stage shadows of group-ring matrices: a matrix over ZG together
// with a permutation model of degree d becomes an integer matrix of d times
// the size.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "l2approx/group.hpp"
#include "l2approx/group_ring.hpp"

namespace l2approx {

struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  mpz_class value;
};

// Sparse integer matrix in canonical (row, col) order, no duplicates, no
// explicit zeros.
class SparseIntMatrix {
 public:
  SparseIntMatrix() = default;
  SparseIntMatrix(std::size_t rows, std::size_t cols);
  // Sorts, sums duplicate positions and drops zeros. Throws on out-of-range
  // indices.
  SparseIntMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

  template <class Int>
  static SparseIntMatrix from_dense(const std::vector<std::vector<Int>>& rows) {
    const std::size_t r = rows.size(), c = rows.empty() ? 0 : rows[0].size();
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (rows[i][j] != 0)
          t.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                       mpz_class(rows[i][j])});
    return SparseIntMatrix(r, c, std::move(t));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return entries_.size(); }
  std::size_t total_dimension() const { return rows_ + cols_; }
  std::span<const Triplet> entries() const { return entries_; }

  std::vector<std::vector<mpz_class>> to_dense() const;
  SparseIntMatrix transposed() const;
  bool is_zero() const { return entries_.empty(); }

  static SparseIntMatrix block_diagonal(const SparseIntMatrix& a, const SparseIntMatrix& b);
  // Rows of `top` followed by rows of `bottom`.
  static SparseIntMatrix stack(const SparseIntMatrix& top, const SparseIntMatrix& bottom);

  bool operator==(const SparseIntMatrix& rhs) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Triplet> entries_;
};

SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b);

// MatrixMarket coordinate format, integer field, 1-based indices.
void write_matrix_market(std::ostream& out, const SparseIntMatrix& m);
SparseIntMatrix read_matrix_market(std::istream& in);

inline constexpr std::size_t default_size_cap = 200000;

// Replaces every group element s by the d x d permutation matrix P(s) with
// P(s) e_v = e_{s.v}. Basis index of (point v, block j) is v * blocks + j.
// linearize(A * B, q) == linearize(A, q) * linearize(B, q) for genuine q.
// Throws ResourceExhausted when (rows + cols) * d exceeds size_cap.
SparseIntMatrix linearize(const RingMatrix& f, const FiniteQuotient& q,
                          std::size_t size_cap = default_size_cap);

// linearize(d_j, q) for j = 1..top; element j-1 is the image of d_j.
// Requires a genuine quotient.
std::vector<SparseIntMatrix> quotient_complex(const ChainComplex& c,
                                              const FiniteQuotient& q,
                                              std::size_t size_cap = default_size_cap);

}  // namespace l2approx
