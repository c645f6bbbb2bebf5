#pragma once

// Exact arithmetic in the integral group ring, matrices over it, and chain
// complexes of finitely generated free modules.
//
// Conventions: modules are row vectors and a matrix f acts by right
// multiplication x -> x f. A differential d_j : C_j -> C_{j-1} therefore has
// shape n_j x n_{j-1}, and a complex requires the product d_{j+1} * d_j = 0.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "l2approx/group.hpp"

namespace l2approx {

// Finitely supported function group -> Z. Zero coefficients are never
// stored; the empty map is 0.
class RingElement {
 public:
  using Terms = std::map<GroupElement, mpz_class>;

  explicit RingElement(GroupPtr group);
  RingElement(GroupPtr group, Terms terms);

  static RingElement integer(GroupPtr group, const mpz_class& n);
  static RingElement monomial(GroupPtr group, GroupElement g,
                              const mpz_class& coefficient = 1);

  const GroupPtr& group() const { return group_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t support_size() const { return terms_.size(); }
  // Coefficient of g (0 when g is outside the support).
  mpz_class coefficient(const GroupElement& g) const;

  RingElement operator+(const RingElement& rhs) const;
  RingElement operator-(const RingElement& rhs) const;
  RingElement operator-() const;
  RingElement operator*(const RingElement& rhs) const;
  RingElement scaled(const mpz_class& k) const;
  RingElement& operator+=(const RingElement& rhs);

  // Left translate: g * f.
  RingElement translated(const GroupElement& g) const;

  bool operator==(const RingElement& rhs) const;

  // Sum of coefficients; a ring homomorphism to Z.
  mpz_class augmentation() const;

  // Canonical text: terms in increasing canonical group order.
  std::string to_string() const;

 private:
  void add_term(const GroupElement& g, const mpz_class& c);

  GroupPtr group_;
  Terms terms_;
};

inline mpz_class augmentation(const RingElement& f) { return f.augmentation(); }

// Parses the ring-element grammar:
//   expr   := term (('+'|'-') term)*
//   term   := [int] ['*'] factor ( ['*'] factor )*   (or a bare int)
//   factor := gen ['^' int]
// gen is a generator name of `group` or 'e' for the identity. Coefficients
// are arbitrary precision. Throws ParseError.
RingElement parse_ring_element(std::string_view text, const GroupPtr& group);

class RingMatrix {
 public:
  // rows x cols matrix of zeros; both dimensions must be positive.
  RingMatrix(GroupPtr group, std::size_t rows, std::size_t cols);
  // Row-major entries; throws InvalidArgument on a ragged or empty array.
  RingMatrix(GroupPtr group, const std::vector<std::vector<RingElement>>& entries);

  static RingMatrix identity(GroupPtr group, std::size_t n);
  static RingMatrix parse(const std::vector<std::vector<std::string>>& texts,
                          const GroupPtr& group);

  const GroupPtr& group() const { return group_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const RingElement& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }
  void set(std::size_t i, std::size_t j, RingElement value);

  bool is_zero() const;
  bool operator==(const RingMatrix& rhs) const;

  // Rows of `top` followed by rows of `bottom`.
  static RingMatrix stack(const RingMatrix& top, const RingMatrix& bottom);
  static RingMatrix block_diagonal(const RingMatrix& a, const RingMatrix& b);

  std::vector<std::vector<std::string>> to_strings() const;

 private:
  GroupPtr group_;
  std::size_t rows_, cols_;
  std::vector<RingElement> entries_;
};

// Shapes must chain (A.cols == B.rows); throws InvalidArgument otherwise.
RingMatrix matrix_mul(const RingMatrix& a, const RingMatrix& b);

class ChainComplex {
 public:
  // ranks[j] = n_j and differentials[j-1] = d_j (bottom-up). Verifies shapes
  // and d_{j+1} * d_j == 0 symbolically.
  ChainComplex(std::vector<std::size_t> ranks, std::vector<RingMatrix> differentials);

  const GroupPtr& group() const { return group_; }
  // Highest degree k with C_k present.
  std::size_t top_degree() const { return ranks_.size() - 1; }
  std::size_t rank(std::size_t j) const { return j < ranks_.size() ? ranks_[j] : 0; }
  const std::vector<std::size_t>& ranks() const { return ranks_; }
  // d_j for 1 <= j <= top_degree().
  const RingMatrix& differential(std::size_t j) const;
  bool has_differential(std::size_t j) const { return j >= 1 && j <= top_degree(); }

  static ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b);

 private:
  GroupPtr group_;
  std::vector<std::size_t> ranks_;
  std::vector<RingMatrix> differentials_;
};

// Ranks listed n_k, ..., n_0 and differentials d_k, ..., d_1 (top-down).
ChainComplex build_complex(const std::vector<std::size_t>& ranks_top_down,
                           std::vector<RingMatrix> differentials_top_down);

}  // namespace l2approx
