// Sparse Gaussian elimination over F_p with Markowitz pivot selection.

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

#include "l2approx/error.hpp"
#include "l2approx/exact_rank.hpp"

namespace l2approx {
namespace {

using u64 = std::uint64_t;
using u32 = std::uint32_t;

u64 mul_mod(u64 a, u64 b, u64 p) {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % p);
}

u64 pow_mod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  for (; e; e >>= 1, a = mul_mod(a, a, p))
    if (e & 1) r = mul_mod(r, a, p);
  return r;
}

struct Row {
  std::vector<u32> idx;
  std::vector<u64> val;
};

class ModularEliminator {
 public:
  ModularEliminator(const SparseIntMatrix& m, u64 p)
      : p_(p), rows_(m.rows()), col_rows_(m.cols()), col_count_(m.cols(), 0),
        row_active_(m.rows(), 1) {
    for (auto& t : m.entries()) {
      const u64 v = mpz_fdiv_ui(t.value.get_mpz_t(), p_);
      if (v == 0) continue;
      rows_[t.row].idx.push_back(t.col);
      rows_[t.row].val.push_back(v);
      col_rows_[t.col].push_back(t.row);
      ++col_count_[t.col];
      ++stats_.initial_nnz;
    }
    active_nnz_ = stats_.initial_nnz;
    stats_.peak_nnz = active_nnz_;
    for (u32 r = 0; r < rows_.size(); ++r)
      if (!rows_[r].idx.empty()) row_queue_.emplace(rows_[r].idx.size(), r);
      else row_active_[r] = 0;
    for (u32 c = 0; c < col_count_.size(); ++c)
      if (col_count_[c]) col_queue_.emplace(col_count_[c], c);
  }

  EliminationStats run() {
    while (!row_queue_.empty() && !col_queue_.empty()) {
      auto [r, c] = choose_pivot();
      eliminate(r, c);
      ++stats_.rank;
    }
    return stats_;
  }

 private:
  static constexpr std::size_t search_width = 4;
  static constexpr u64 no_cost = std::numeric_limits<u64>::max();

  bool row_has(u32 r, u32 c) const {
    const auto& idx = rows_[r].idx;
    return std::binary_search(idx.begin(), idx.end(), c);
  }

  u64 value_at(u32 r, u32 c) const {
    const auto& idx = rows_[r].idx;
    auto it = std::lower_bound(idx.begin(), idx.end(), c);
    return rows_[r].val[static_cast<std::size_t>(it - idx.begin())];
  }

  // Drops stale row references from a column list.
  const std::vector<u32>& live_rows(u32 c) {
    auto& list = col_rows_[c];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    list.erase(std::remove_if(list.begin(), list.end(),
                              [&](u32 r) { return !row_active_[r] || !row_has(r, c); }),
               list.end());
    return list;
  }

  // Markowitz cost (r-1)(c-1) over the sparsest few rows and columns; ties
  // go to the lowest row index, then the lowest column index.
  std::pair<u32, u32> choose_pivot() {
    u64 best = no_cost;
    u32 best_r = 0, best_c = 0;
    auto consider = [&](u64 cost, u32 r, u32 c) {
      if (cost < best || (cost == best && (r < best_r || (r == best_r && c < best_c)))) {
        best = cost;
        best_r = r;
        best_c = c;
      }
    };
    std::size_t seen = 0;
    for (auto it = col_queue_.begin(); it != col_queue_.end() && seen < search_width;
         ++it, ++seen) {
      const u32 c = it->second;
      const u64 cc = it->first - 1;
      for (u32 r : live_rows(c)) consider(cc * (rows_[r].idx.size() - 1), r, c);
      if (best == 0) break;
    }
    seen = 0;
    for (auto it = row_queue_.begin(); it != row_queue_.end() && seen < search_width;
         ++it, ++seen) {
      const u32 r = it->second;
      const u64 rc = it->first - 1;
      for (u32 c : rows_[r].idx) consider(rc * (col_count_[c] - 1), r, c);
      if (best == 0 && rc == 0) break;
    }
    return {best_r, best_c};
  }

  void set_col_count(u32 c, u32 count) {
    if (col_count_[c] == count) return;
    if (col_count_[c]) col_queue_.erase({col_count_[c], c});
    col_count_[c] = count;
    if (count) col_queue_.emplace(count, c);
  }

  void eliminate(u32 r, u32 c) {
    const u64 inv = pow_mod(value_at(r, c), p_ - 2, p_);
    std::vector<u32> targets = live_rows(c);
    col_queue_.erase({col_count_[c], c});
    const Row& pivot = rows_[r];
    Row merged;
    for (u32 i : targets) {
      if (i == r) continue;
      Row& row = rows_[i];
      const u64 factor = p_ - mul_mod(value_at(i, c), inv, p_);  // -a_ic / a_rc
      merged.idx.clear();
      merged.val.clear();
      merged.idx.reserve(row.idx.size() + pivot.idx.size());
      merged.val.reserve(row.idx.size() + pivot.idx.size());
      std::size_t a = 0, b = 0;
      const std::size_t old_len = row.idx.size();
      while (a < row.idx.size() || b < pivot.idx.size()) {
        if (b == pivot.idx.size() || (a < row.idx.size() && row.idx[a] < pivot.idx[b])) {
          merged.idx.push_back(row.idx[a]);
          merged.val.push_back(row.val[a]);
          ++a;
        } else if (a == row.idx.size() || pivot.idx[b] < row.idx[a]) {
          const u32 col = pivot.idx[b];
          merged.idx.push_back(col);
          merged.val.push_back(mul_mod(pivot.val[b], factor, p_));
          if (col != c) {
            col_rows_[col].push_back(i);
            set_col_count(col, col_count_[col] + 1);
          }
          ++stats_.fill_in;
          ++active_nnz_;
          ++b;
        } else {
          const u32 col = row.idx[a];
          u64 v = row.val[a] + mul_mod(pivot.val[b], factor, p_);
          if (v >= p_) v -= p_;
          if (v) {
            merged.idx.push_back(col);
            merged.val.push_back(v);
          } else {
            --active_nnz_;
            if (col != c) set_col_count(col, col_count_[col] - 1);
          }
          ++a;
          ++b;
        }
      }
      std::swap(row.idx, merged.idx);
      std::swap(row.val, merged.val);
      row_queue_.erase({old_len, i});
      if (row.idx.empty()) row_active_[i] = 0;
      else row_queue_.emplace(row.idx.size(), i);
      stats_.peak_nnz = std::max(stats_.peak_nnz, active_nnz_);
    }
    // retire the pivot row and column
    row_queue_.erase({pivot.idx.size(), r});
    row_active_[r] = 0;
    for (u32 col : pivot.idx)
      if (col != c) set_col_count(col, col_count_[col] - 1);
    active_nnz_ -= pivot.idx.size();
    col_count_[c] = 0;
    col_rows_[c].clear();
    col_rows_[c].shrink_to_fit();
    rows_[r] = Row{};
  }

  u64 p_;
  std::vector<Row> rows_;
  std::vector<std::vector<u32>> col_rows_;
  std::vector<u32> col_count_;
  std::vector<char> row_active_;
  std::set<std::pair<std::size_t, u32>> row_queue_;
  std::set<std::pair<u32, u32>> col_queue_;
  std::size_t active_nnz_ = 0;
  EliminationStats stats_;
};

}  // namespace

EliminationStats rank_mod_p_stats(const SparseIntMatrix& m, std::uint64_t p) {
  if (p >= (std::uint64_t{1} << 63) || !is_prime(p))
    throw InvalidArgument(std::to_string(p) + " is not a prime below 2^63");
  return ModularEliminator(m, p).run();
}

std::size_t rank_mod_p(const SparseIntMatrix& m, std::uint64_t p) {
  return rank_mod_p_stats(m, p).rank;
}

}  // namespace l2approx
