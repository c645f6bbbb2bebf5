#include "l2approx/group_ring.hpp"

#include <algorithm>
#include <sstream>

#include "l2approx/error.hpp"

namespace l2approx {

RingElement::RingElement(GroupPtr group) : group_(std::move(group)) {
  if (!group_) throw InvalidArgument("ring element without a group");
}

RingElement::RingElement(GroupPtr group, Terms terms) : RingElement(std::move(group)) {
  for (auto& [g, c] : terms) {
    group_->check(g);
    if (c != 0) terms_.emplace(g, c);
  }
}

RingElement RingElement::integer(GroupPtr group, const mpz_class& n) {
  RingElement r(std::move(group));
  r.add_term(r.group_->identity(), n);
  return r;
}

RingElement RingElement::monomial(GroupPtr group, GroupElement g,
                                  const mpz_class& coefficient) {
  RingElement r(std::move(group));
  r.group_->check(g);
  r.add_term(g, coefficient);
  return r;
}

mpz_class RingElement::coefficient(const GroupElement& g) const {
  auto it = terms_.find(g);
  return it == terms_.end() ? mpz_class(0) : it->second;
}

void RingElement::add_term(const GroupElement& g, const mpz_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(g, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

RingElement& RingElement::operator+=(const RingElement& rhs) {
  require_same_group(group_, rhs.group_);
  for (auto& [g, c] : rhs.terms_) add_term(g, c);
  return *this;
}

RingElement RingElement::operator+(const RingElement& rhs) const {
  RingElement r = *this;
  r += rhs;
  return r;
}

RingElement RingElement::operator-() const { return scaled(-1); }

RingElement RingElement::operator-(const RingElement& rhs) const {
  require_same_group(group_, rhs.group_);
  RingElement r = *this;
  for (auto& [g, c] : rhs.terms_) r.add_term(g, -c);
  return r;
}

RingElement RingElement::scaled(const mpz_class& k) const {
  RingElement r(group_);
  if (k == 0) return r;
  for (auto& [g, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), g, c * k);
  return r;
}

RingElement RingElement::operator*(const RingElement& rhs) const {
  require_same_group(group_, rhs.group_);
  RingElement r(group_);
  for (auto& [s, fs] : terms_)
    for (auto& [t, gt] : rhs.terms_) r.add_term(group_->multiply(s, t), fs * gt);
  return r;
}

RingElement RingElement::translated(const GroupElement& g) const {
  RingElement r(group_);
  for (auto& [s, c] : terms_) r.add_term(group_->multiply(g, s), c);
  return r;
}

bool RingElement::operator==(const RingElement& rhs) const {
  return group_->same_as(*rhs.group_) && terms_ == rhs.terms_;
}

mpz_class RingElement::augmentation() const {
  mpz_class s = 0;
  for (auto& [g, c] : terms_) s += c;
  return s;
}

std::string RingElement::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [g, c] : terms_) {
    const bool negative = c < 0;
    mpz_class mag = abs(c);
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    if (group_->is_identity(g)) {
      os << mag.get_str();
    } else {
      if (mag != 1) os << mag.get_str() << '*';
      os << group_->format(g);
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// RingMatrix

RingMatrix::RingMatrix(GroupPtr group, std::size_t rows, std::size_t cols)
    : group_(std::move(group)), rows_(rows), cols_(cols) {
  if (!group_) throw InvalidArgument("matrix without a group");
  if (rows_ == 0 || cols_ == 0)
    throw InvalidArgument("matrix dimensions must be positive");
  entries_.assign(rows_ * cols_, RingElement(group_));
}

RingMatrix::RingMatrix(GroupPtr group,
                       const std::vector<std::vector<RingElement>>& entries)
    : RingMatrix(group, entries.size(), entries.empty() ? 0 : entries[0].size()) {
  for (std::size_t i = 0; i < rows_; ++i) {
    if (entries[i].size() != cols_) throw InvalidArgument("ragged matrix");
    for (std::size_t j = 0; j < cols_; ++j) set(i, j, entries[i][j]);
  }
}

RingMatrix RingMatrix::identity(GroupPtr group, std::size_t n) {
  RingMatrix m(group, n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, RingElement::integer(group, 1));
  return m;
}

RingMatrix RingMatrix::parse(const std::vector<std::vector<std::string>>& texts,
                             const GroupPtr& group) {
  std::vector<std::vector<RingElement>> rows;
  for (auto& row : texts) {
    std::vector<RingElement> r;
    for (auto& t : row) r.push_back(parse_ring_element(t, group));
    rows.push_back(std::move(r));
  }
  return RingMatrix(group, rows);
}

void RingMatrix::set(std::size_t i, std::size_t j, RingElement value) {
  require_same_group(group_, value.group());
  if (i >= rows_ || j >= cols_) throw InvalidArgument("matrix index out of range");
  entries_[i * cols_ + j] = std::move(value);
}

bool RingMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const RingElement& e) { return e.is_zero(); });
}

bool RingMatrix::operator==(const RingMatrix& rhs) const {
  return rows_ == rhs.rows_ && cols_ == rhs.cols_ && entries_ == rhs.entries_;
}

RingMatrix RingMatrix::stack(const RingMatrix& top, const RingMatrix& bottom) {
  require_same_group(top.group_, bottom.group_);
  if (top.cols_ != bottom.cols_)
    throw InvalidArgument("stacking matrices with different column counts");
  RingMatrix m(top.group_, top.rows_ + bottom.rows_, top.cols_);
  std::copy(top.entries_.begin(), top.entries_.end(), m.entries_.begin());
  std::copy(bottom.entries_.begin(), bottom.entries_.end(),
            m.entries_.begin() + static_cast<std::ptrdiff_t>(top.entries_.size()));
  return m;
}

RingMatrix RingMatrix::block_diagonal(const RingMatrix& a, const RingMatrix& b) {
  require_same_group(a.group_, b.group_);
  RingMatrix m(a.group_, a.rows_ + b.rows_, a.cols_ + b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t j = 0; j < a.cols_; ++j) m.set(i, j, a(i, j));
  for (std::size_t i = 0; i < b.rows_; ++i)
    for (std::size_t j = 0; j < b.cols_; ++j) m.set(a.rows_ + i, a.cols_ + j, b(i, j));
  return m;
}

std::vector<std::vector<std::string>> RingMatrix::to_strings() const {
  std::vector<std::vector<std::string>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out[i].push_back((*this)(i, j).to_string());
  return out;
}

RingMatrix matrix_mul(const RingMatrix& a, const RingMatrix& b) {
  require_same_group(a.group(), b.group());
  if (a.cols() != b.rows())
    throw InvalidArgument("shape mismatch: " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " times " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  RingMatrix c(a.group(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      RingElement sum(a.group());
      for (std::size_t k = 0; k < a.cols(); ++k)
        if (!a(i, k).is_zero() && !b(k, j).is_zero()) sum += a(i, k) * b(k, j);
      c.set(i, j, std::move(sum));
    }
  return c;
}

// ---------------------------------------------------------------------------
// ChainComplex

ChainComplex::ChainComplex(std::vector<std::size_t> ranks,
                           std::vector<RingMatrix> differentials)
    : ranks_(std::move(ranks)), differentials_(std::move(differentials)) {
  if (ranks_.empty()) throw InvalidArgument("complex needs at least C_0");
  if (differentials_.size() + 1 != ranks_.size())
    throw InvalidArgument("complex with " + std::to_string(ranks_.size()) +
                          " modules needs " + std::to_string(ranks_.size() - 1) +
                          " differentials");
  if (differentials_.empty())
    throw InvalidArgument("complex needs at least one differential to fix its group");
  group_ = differentials_.front().group();
  for (std::size_t j = 1; j <= differentials_.size(); ++j) {
    const auto& d = differentials_[j - 1];
    require_same_group(group_, d.group());
    if (d.rows() != ranks_[j] || d.cols() != ranks_[j - 1])
      throw InvalidArgument("d_" + std::to_string(j) + " has shape " +
                            std::to_string(d.rows()) + "x" + std::to_string(d.cols()) +
                            ", expected " + std::to_string(ranks_[j]) + "x" +
                            std::to_string(ranks_[j - 1]));
  }
  for (std::size_t j = 1; j < differentials_.size(); ++j) {
    const auto composite = matrix_mul(differentials_[j], differentials_[j - 1]);
    for (std::size_t r = 0; r < composite.rows(); ++r)
      for (std::size_t c = 0; c < composite.cols(); ++c)
        if (!composite(r, c).is_zero())
          throw NonzeroComposite(
              j, r, c,
              "d_" + std::to_string(j + 1) + " * d_" + std::to_string(j) +
                  " is nonzero: entry (" + std::to_string(r + 1) + ", " +
                  std::to_string(c + 1) + ") = " + composite(r, c).to_string());
  }
}

const RingMatrix& ChainComplex::differential(std::size_t j) const {
  if (!has_differential(j))
    throw InvalidArgument("no differential d_" + std::to_string(j));
  return differentials_[j - 1];
}

ChainComplex ChainComplex::direct_sum(const ChainComplex& a, const ChainComplex& b) {
  if (a.top_degree() != b.top_degree())
    throw InvalidArgument("direct sum of complexes of different length");
  std::vector<std::size_t> ranks(a.ranks_.size());
  for (std::size_t j = 0; j < ranks.size(); ++j) ranks[j] = a.ranks_[j] + b.ranks_[j];
  std::vector<RingMatrix> ds;
  for (std::size_t j = 1; j <= a.top_degree(); ++j)
    ds.push_back(RingMatrix::block_diagonal(a.differential(j), b.differential(j)));
  return ChainComplex(std::move(ranks), std::move(ds));
}

ChainComplex build_complex(const std::vector<std::size_t>& ranks_top_down,
                           std::vector<RingMatrix> differentials_top_down) {
  std::vector<std::size_t> ranks(ranks_top_down.rbegin(), ranks_top_down.rend());
  std::reverse(differentials_top_down.begin(), differentials_top_down.end());
  return ChainComplex(std::move(ranks), std::move(differentials_top_down));
}

}  // namespace l2approx
