#pragma once

// Exact ranks of sparse integer matrices: sparse elimination over F_p with
// Markowitz pivoting, a multi-modular rank over Q with a certification
// policy, dense fraction-free (Bareiss) elimination, and Smith normal form.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "l2approx/linearize.hpp"

namespace l2approx {

enum class RankMethod { sparse_mod_p, dense_fraction_free, snf };

std::string to_string(RankMethod m);

struct RankResult {
  std::size_t rank = 0;
  RankMethod method = RankMethod::sparse_mod_p;
  std::vector<std::uint64_t> primes_used;
  bool certified = false;
};

// Agreement of `primes` random primes of min_bits..max_bits bits certifies
// the rank. On disagreement the prime count doubles up to `max_escalations`
// times; matrices of total dimension <= dense_threshold are settled by
// Bareiss instead. Primes are drawn from a generator seeded by `seed` mixed
// with a fingerprint of the matrix, so results are reproducible.
struct RankPolicy {
  std::size_t primes = 3;
  unsigned min_bits = 50;
  unsigned max_bits = 62;
  std::size_t dense_threshold = 500;
  std::size_t max_escalations = 2;
  std::uint64_t seed = 0x4c32'6170'7072'6f78ULL;
  bool parallel = true;
};

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n);

// Smallest prime >= a uniformly drawn odd number with a uniformly drawn bit
// length in [min_bits, max_bits].
std::uint64_t random_prime(std::mt19937_64& rng, unsigned min_bits, unsigned max_bits);

struct EliminationStats {
  std::size_t rank = 0;
  std::size_t initial_nnz = 0;  // nonzeros after reduction mod p
  std::size_t peak_nnz = 0;     // largest active nonzero count seen
  std::size_t fill_in = 0;      // entries created during elimination
};

// Rank over F_p. Throws InvalidArgument when p is not prime or p >= 2^63.
std::size_t rank_mod_p(const SparseIntMatrix& m, std::uint64_t p);
EliminationStats rank_mod_p_stats(const SparseIntMatrix& m, std::uint64_t p);

RankResult rank_over_rationals(const SparseIntMatrix& m, const RankPolicy& policy = {});

// Exact rank by dense fraction-free elimination.
std::size_t bareiss_rank(std::vector<std::vector<mpz_class>> dense);
std::size_t bareiss_rank(const SparseIntMatrix& m);

inline constexpr std::size_t default_snf_threshold = 200;

// Invariant factors d_1 | d_2 | ... (nonnegative), min(rows, cols) of them,
// zeros last. Throws ResourceExhausted above the threshold.
std::vector<mpz_class> smith_normal_form(const SparseIntMatrix& m,
                                         std::size_t threshold = default_snf_threshold);

}  // namespace l2approx
