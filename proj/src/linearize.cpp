#include "l2approx/linearize.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "l2approx/error.hpp"

namespace l2approx {

namespace {

void check_index_range(std::size_t rows, std::size_t cols) {
  constexpr auto limit = std::numeric_limits<std::uint32_t>::max();
  if (rows > limit || cols > limit)
    throw ResourceExhausted("sparse matrix dimension exceeds 32-bit indices");
}

}  // namespace

SparseIntMatrix::SparseIntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  check_index_range(rows, cols);
}

SparseIntMatrix::SparseIntMatrix(std::size_t rows, std::size_t cols,
                                 std::vector<Triplet> triplets)
    : SparseIntMatrix(rows, cols) {
  for (auto& t : triplets)
    if (t.row >= rows_ || t.col >= cols_)
      throw InvalidArgument("triplet index out of range");
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  entries_.reserve(triplets.size());
  for (auto& t : triplets) {
    if (!entries_.empty() && entries_.back().row == t.row && entries_.back().col == t.col) {
      entries_.back().value += t.value;
    } else {
      if (!entries_.empty() && entries_.back().value == 0) entries_.pop_back();
      entries_.push_back(std::move(t));
    }
  }
  if (!entries_.empty() && entries_.back().value == 0) entries_.pop_back();
}

std::vector<std::vector<mpz_class>> SparseIntMatrix::to_dense() const {
  std::vector<std::vector<mpz_class>> out(rows_, std::vector<mpz_class>(cols_));
  for (auto& t : entries_) out[t.row][t.col] = t.value;
  return out;
}

SparseIntMatrix SparseIntMatrix::transposed() const {
  std::vector<Triplet> t;
  t.reserve(entries_.size());
  for (auto& e : entries_) t.push_back({e.col, e.row, e.value});
  return SparseIntMatrix(cols_, rows_, std::move(t));
}

SparseIntMatrix SparseIntMatrix::block_diagonal(const SparseIntMatrix& a,
                                                const SparseIntMatrix& b) {
  std::vector<Triplet> t(a.entries_.begin(), a.entries_.end());
  const auto r0 = static_cast<std::uint32_t>(a.rows_);
  const auto c0 = static_cast<std::uint32_t>(a.cols_);
  for (auto& e : b.entries_) t.push_back({e.row + r0, e.col + c0, e.value});
  return SparseIntMatrix(a.rows_ + b.rows_, a.cols_ + b.cols_, std::move(t));
}

SparseIntMatrix SparseIntMatrix::stack(const SparseIntMatrix& top,
                                       const SparseIntMatrix& bottom) {
  if (top.cols_ != bottom.cols_)
    throw InvalidArgument("stacking sparse matrices with different column counts");
  std::vector<Triplet> t(top.entries_.begin(), top.entries_.end());
  const auto r0 = static_cast<std::uint32_t>(top.rows_);
  for (auto& e : bottom.entries_) t.push_back({e.row + r0, e.col, e.value});
  return SparseIntMatrix(top.rows_ + bottom.rows_, top.cols_, std::move(t));
}

bool SparseIntMatrix::operator==(const SparseIntMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_ || nnz() != rhs.nnz()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto &a = entries_[i], &b = rhs.entries_[i];
    if (a.row != b.row || a.col != b.col || a.value != b.value) return false;
  }
  return true;
}

SparseIntMatrix multiply(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("sparse product shape mismatch");
  // row pointers into b
  std::vector<std::size_t> start(b.rows() + 1, 0);
  for (auto& e : b.entries()) ++start[e.row + 1];
  for (std::size_t i = 0; i < b.rows(); ++i) start[i + 1] += start[i];
  std::vector<Triplet> out;
  auto be = b.entries();
  for (auto& e : a.entries())
    for (std::size_t k = start[e.col]; k < start[e.col + 1]; ++k)
      out.push_back({e.row, be[k].col, e.value * be[k].value});
  return SparseIntMatrix(a.rows(), b.cols(), std::move(out));
}

void write_matrix_market(std::ostream& out, const SparseIntMatrix& m) {
  out << "%%MatrixMarket matrix coordinate integer general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  for (auto& t : m.entries())
    out << t.row + 1 << ' ' << t.col + 1 << ' ' << t.value.get_str() << '\n';
}

SparseIntMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw InvalidArgument("MatrixMarket: missing banner");
  {
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" ||
        (field != "integer" && field != "pattern") || symmetry != "general")
      throw InvalidArgument("MatrixMarket: only 'matrix coordinate integer general' is supported");
  }
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::size_t rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz))
      throw InvalidArgument("MatrixMarket: bad size line");
  }
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    std::string value;
    if (!(in >> i >> j >> value)) throw InvalidArgument("MatrixMarket: truncated entries");
    if (i == 0 || j == 0 || i > rows || j > cols)
      throw InvalidArgument("MatrixMarket: index out of range");
    mpz_class v;
    if (v.set_str(value, 10) != 0) throw InvalidArgument("MatrixMarket: bad integer " + value);
    t.push_back({static_cast<std::uint32_t>(i - 1), static_cast<std::uint32_t>(j - 1),
                 std::move(v)});
  }
  return SparseIntMatrix(rows, cols, std::move(t));
}

SparseIntMatrix linearize(const RingMatrix& f, const FiniteQuotient& q,
                          std::size_t size_cap) {
  require_same_group(f.group(), q.group());
  const std::size_t d = q.degree();
  const std::size_t m = f.rows(), n = f.cols();
  if ((m + n) > size_cap / d + 1 || (m + n) * d > size_cap)
    throw ResourceExhausted("linearized matrix of total dimension " +
                            std::to_string((m + n) * d) + " exceeds the size cap " +
                            std::to_string(size_cap));
  std::unordered_map<GroupElement, Permutation> images;
  std::size_t terms = 0;
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < n; ++k) terms += f(j, k).support_size();
  std::vector<Triplet> t;
  t.reserve(terms * d);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < n; ++k)
      for (auto& [s, c] : f(j, k).terms()) {
        auto it = images.find(s);
        if (it == images.end()) it = images.emplace(s, q.image(s)).first;
        const auto& p = it->second;
        for (std::uint32_t v = 0; v < d; ++v)
          t.push_back({static_cast<std::uint32_t>(p(v) * m + j),
                       static_cast<std::uint32_t>(v * n + k), c});
      }
  return SparseIntMatrix(m * d, n * d, std::move(t));
}

std::vector<SparseIntMatrix> quotient_complex(const ChainComplex& c,
                                              const FiniteQuotient& q,
                                              std::size_t size_cap) {
  if (!q.genuine())
    throw NotGenuine("quotient complex needs a genuine quotient; '" + q.label() +
                     "' is heuristic");
  std::vector<SparseIntMatrix> out;
  for (std::size_t j = 1; j <= c.top_degree(); ++j)
    out.push_back(linearize(c.differential(j), q, size_cap));
  return out;
}

}  // namespace l2approx
