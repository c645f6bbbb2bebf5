#include "l2approx/exact_rank.hpp"

#include <algorithm>
#include <future>
#include <set>

#include "l2approx/error.hpp"

namespace l2approx {

std::string to_string(RankMethod m) {
  switch (m) {
    case RankMethod::sparse_mod_p:
      return "sparse_mod_p";
    case RankMethod::dense_fraction_free:
      return "dense_fraction_free";
    default:
      return "snf";
  }
}

namespace {

using u64 = std::uint64_t;

u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 pow_mod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  for (; e; e >>= 1, a = mul_mod(a, a, m))
    if (e & 1) r = mul_mod(r, a, m);
  return r;
}

u64 fingerprint(const SparseIntMatrix& m) {
  u64 h = 0xcbf29ce484222325ULL;
  auto mix = [&h](u64 v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  mix(m.rows());
  mix(m.cols());
  for (auto& t : m.entries()) {
    mix(t.row);
    mix(t.col);
    mix(mpz_fdiv_ui(t.value.get_mpz_t(), 0xffffffffffffffc5ULL));
  }
  return h;
}

bool less_abs(const mpz_class& a, const mpz_class& b) {
  return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()) < 0;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (u64 small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
    if (n % small == 0) return n == small;
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // witnesses sufficient for all n < 2^64
  for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    a %= n;
    if (a == 0) continue;
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t random_prime(std::mt19937_64& rng, unsigned min_bits, unsigned max_bits) {
  if (min_bits < 3 || max_bits > 62 || min_bits > max_bits)
    throw InvalidArgument("prime bit window must lie within [3, 62]");
  std::uniform_int_distribution<unsigned> bits_dist(min_bits, max_bits);
  const unsigned bits = bits_dist(rng);
  const u64 low = u64{1} << (bits - 1);
  u64 candidate = (rng() & (low - 1)) | low | 1;
  while (!is_prime(candidate)) candidate += 2;
  return candidate;
}

RankResult rank_over_rationals(const SparseIntMatrix& m, const RankPolicy& policy) {
  RankResult result;
  if (m.nnz() == 0) {
    result.certified = true;
    return result;
  }
  std::mt19937_64 rng(policy.seed ^ fingerprint(m));
  std::set<u64> used;
  auto draw = [&](std::size_t k) {
    std::vector<u64> primes;
    for (std::size_t misses = 0; primes.size() < k;) {
      const u64 p = random_prime(rng, policy.min_bits, policy.max_bits);
      if (used.insert(p).second) primes.push_back(p);
      else if (++misses > 1000)
        throw InvalidArgument("prime window too small for " + std::to_string(k) +
                              " distinct primes");
    }
    return primes;
  };
  auto ranks_for = [&](const std::vector<u64>& primes) {
    std::vector<std::size_t> ranks(primes.size());
    if (policy.parallel && primes.size() > 1) {
      std::vector<std::future<std::size_t>> jobs;
      for (auto p : primes)
        jobs.push_back(std::async(std::launch::async, [&m, p] { return rank_mod_p(m, p); }));
      for (std::size_t i = 0; i < jobs.size(); ++i) ranks[i] = jobs[i].get();
    } else {
      for (std::size_t i = 0; i < primes.size(); ++i) ranks[i] = rank_mod_p(m, primes[i]);
    }
    return ranks;
  };

  std::size_t k = std::max<std::size_t>(policy.primes, 1);
  std::size_t best = 0;
  for (std::size_t round = 0;; ++round) {
    const auto primes = draw(k);
    const auto ranks = ranks_for(primes);
    result.primes_used.insert(result.primes_used.end(), primes.begin(), primes.end());
    const auto [lo, hi] = std::minmax_element(ranks.begin(), ranks.end());
    const bool agree = *lo == *hi;
    if (agree && *hi >= best) {
      result.rank = *hi;
      result.certified = true;
      return result;
    }
    best = std::max(best, *hi);
    if (m.total_dimension() <= policy.dense_threshold) {
      result.rank = bareiss_rank(m);
      result.method = RankMethod::dense_fraction_free;
      result.certified = true;
      return result;
    }
    if (round >= policy.max_escalations) break;
    k *= 2;
  }
  result.rank = best;
  result.certified = false;
  return result;
}

// ---------------------------------------------------------------------------
// Bareiss

std::size_t bareiss_rank(std::vector<std::vector<mpz_class>> a) {
  const std::size_t rows = a.size();
  if (rows == 0) return 0;
  const std::size_t cols = a[0].size();
  mpz_class prev = 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    const auto& prow = a[rank];
    mpz_srcptr pc = prow[c].get_mpz_t();
    const bool unit_prev = prev == 1;
    for (std::size_t i = rank + 1; i < rows; ++i) {
      auto& row = a[i];
      mpz_ptr ic = row[c].get_mpz_t();
      const bool zero_ic = mpz_sgn(ic) == 0;
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_ptr ij = row[j].get_mpz_t();
        mpz_mul(ij, ij, pc);
        if (!zero_ic) mpz_submul(ij, ic, prow[j].get_mpz_t());
        if (!unit_prev) mpz_divexact(ij, ij, prev.get_mpz_t());
      }
      mpz_set_ui(ic, 0);
    }
    prev = prow[c];
    ++rank;
  }
  return rank;
}

std::size_t bareiss_rank(const SparseIntMatrix& m) {
  if (m.rows() <= m.cols()) return bareiss_rank(m.to_dense());
  return bareiss_rank(m.transposed().to_dense());
}

// ---------------------------------------------------------------------------
// Smith normal form

std::vector<mpz_class> smith_normal_form(const SparseIntMatrix& m, std::size_t threshold) {
  if (m.total_dimension() > threshold)
    throw ResourceExhausted("Smith normal form limited to total dimension " +
                            std::to_string(threshold) + ", got " +
                            std::to_string(m.total_dimension()));
  auto a = m.to_dense();
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::size_t n = std::min(rows, cols);
  std::vector<mpz_class> diag(n, 0);
  mpz_class q;

  auto swap_cols = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (auto& row : a) std::swap(row[x], row[y]);
  };

  for (std::size_t t = 0; t < n; ++t) {
    // smallest nonzero in the trailing block
    std::size_t pr = rows, pc = cols;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (a[i][j] != 0 && (pr == rows || less_abs(a[i][j], a[pr][pc]))) {
          pr = i;
          pc = j;
        }
    if (pr == rows) break;
    std::swap(a[t], a[pr]);
    swap_cols(t, pc);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
        for (std::size_t j = t; j < cols; ++j)
          if (a[t][j] != 0) a[i][j] -= q * a[t][j];
        if (a[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
        for (std::size_t i = t; i < rows; ++i)
          if (a[i][t] != 0) a[i][j] -= q * a[i][t];
        if (a[t][j] != 0) clean = false;
      }
      if (clean) {
        // every trailing entry must be a multiple of the pivot
        std::size_t bad = rows;
        for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
          for (std::size_t j = t + 1; j < cols; ++j)
            if (!mpz_divisible_p(a[i][j].get_mpz_t(), a[t][t].get_mpz_t())) {
              bad = i;
              break;
            }
        if (bad == rows) break;
        for (std::size_t j = t; j < cols; ++j) a[t][j] += a[bad][j];
        continue;
      }
      // move the smallest remainder in row t / column t onto the pivot
      std::size_t br = t, bc = t;
      for (std::size_t i = t + 1; i < rows; ++i)
        if (a[i][t] != 0 && less_abs(a[i][t], a[br][bc])) {
          br = i;
          bc = t;
        }
      for (std::size_t j = t + 1; j < cols; ++j)
        if (a[t][j] != 0 && less_abs(a[t][j], a[br][bc])) {
          br = t;
          bc = j;
        }
      std::swap(a[t], a[br]);
      swap_cols(t, bc);
    }
    diag[t] = abs(a[t][t]);
  }
  return diag;
}

}  // namespace l2approx
