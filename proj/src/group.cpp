#include "l2approx/group.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "l2approx/error.hpp"

namespace l2approx {

// ---------------------------------------------------------------------------
// Permutation

Permutation::Permutation(std::vector<std::uint32_t> images) {
  std::vector<bool> seen(images.size(), false);
  for (auto v : images) {
    if (v >= images.size() || seen[v])
      throw InvalidArgument("permutation images are not a bijection");
    seen[v] = true;
  }
  images_ = std::move(images);
}

Permutation Permutation::identity(std::size_t degree) {
  std::vector<std::uint32_t> id(degree);
  std::iota(id.begin(), id.end(), 0u);
  return Permutation(Unchecked{}, std::move(id));
}

Permutation Permutation::operator*(const Permutation& rhs) const {
  if (rhs.degree() != degree())
    throw InvalidArgument("composing permutations of different degree");
  std::vector<std::uint32_t> out(degree());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = images_[rhs.images_[v]];
  return Permutation(Unchecked{}, std::move(out));
}

Permutation Permutation::inverse() const {
  std::vector<std::uint32_t> out(degree());
  for (std::size_t v = 0; v < out.size(); ++v)
    out[images_[v]] = static_cast<std::uint32_t>(v);
  return Permutation(Unchecked{}, std::move(out));
}

Permutation Permutation::pow(std::int64_t exponent) const {
  const std::size_t d = degree();
  std::vector<std::uint32_t> out(d);
  std::vector<bool> done(d, false);
  std::vector<std::uint32_t> cycle;
  for (std::size_t start = 0; start < d; ++start) {
    if (done[start]) continue;
    cycle.clear();
    for (auto v = static_cast<std::uint32_t>(start); !done[v]; v = images_[v]) {
      done[v] = true;
      cycle.push_back(v);
    }
    const auto len = static_cast<std::int64_t>(cycle.size());
    std::int64_t shift = exponent % len;
    if (shift < 0) shift += len;
    for (std::int64_t i = 0; i < len; ++i)
      out[cycle[i]] = cycle[(i + shift) % len];
  }
  return Permutation(Unchecked{}, std::move(out));
}

bool Permutation::is_identity() const {
  for (std::size_t v = 0; v < images_.size(); ++v)
    if (images_[v] != v) return false;
  return true;
}

// ---------------------------------------------------------------------------
// GroupElement

GroupElement GroupElement::abelian(Vector exponents) {
  GroupElement g;
  g.payload_ = std::move(exponents);
  return g;
}

GroupElement GroupElement::word(Word word) {
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (word[i].exponent == 0)
      throw InvalidArgument("free word has a zero exponent");
    if (i > 0 && word[i].generator == word[i - 1].generator)
      throw InvalidArgument("free word is not reduced");
  }
  GroupElement g;
  g.payload_ = std::move(word);
  return g;
}

GroupElement GroupElement::table_index(Index index) {
  GroupElement g;
  g.payload_ = index;
  return g;
}

namespace {

unsigned __int128 abs_sum(const GroupElement::Vector& v) {
  unsigned __int128 s = 0;
  for (auto e : v) s += e < 0 ? -static_cast<unsigned __int128>(e) : e;
  return s;
}

unsigned __int128 abs_sum(const GroupElement::Word& w) {
  unsigned __int128 s = 0;
  for (auto& syl : w)
    s += syl.exponent < 0 ? -static_cast<unsigned __int128>(syl.exponent)
                          : syl.exponent;
  return s;
}

template <class Seq>
std::strong_ordering shortlex(const Seq& a, const Seq& b) {
  auto la = abs_sum(a), lb = abs_sum(b);
  if (la != lb) return la < lb ? std::strong_ordering::less
                               : std::strong_ordering::greater;
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(),
                                                b.end());
}

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::strong_ordering GroupElement::operator<=>(const GroupElement& rhs) const {
  if (payload_.index() != rhs.payload_.index())
    return payload_.index() <=> rhs.payload_.index();
  switch (payload_.index()) {
    case 0:
      return shortlex(exponents(), rhs.exponents());
    case 1:
      return shortlex(syllables(), rhs.syllables());
    default:
      return index() <=> rhs.index();
  }
}

std::size_t GroupElement::hash() const {
  std::size_t h = payload_.index();
  switch (payload_.index()) {
    case 0:
      for (auto e : exponents()) h = mix(h, static_cast<std::size_t>(e));
      break;
    case 1:
      for (auto& s : syllables()) {
        h = mix(h, s.generator);
        h = mix(h, static_cast<std::size_t>(s.exponent));
      }
      break;
    default:
      h = mix(h, index());
  }
  return h;
}

// ---------------------------------------------------------------------------
// FiniteTable

FiniteTable::FiniteTable(std::size_t order, std::vector<std::uint32_t> products,
                         std::vector<std::uint32_t> inverses)
    : order_(order),
      products_(std::move(products)),
      inverses_(std::move(inverses)) {
  if (order_ == 0) throw InvalidArgument("finite group of order 0");
  if (products_.size() != order_ * order_ || inverses_.size() != order_)
    throw InvalidArgument("multiplication table has the wrong size");
  for (auto v : products_)
    if (v >= order_) throw InvalidArgument("table entry out of range");
  for (auto v : inverses_)
    if (v >= order_) throw InvalidArgument("inverse entry out of range");
  const auto g = static_cast<std::uint32_t>(order_);
  for (std::uint32_t i = 0; i < g; ++i) {
    if (product(0, i) != i || product(i, 0) != i)
      throw InvalidArgument("index 1 is not a two-sided identity");
    if (product(i, inverse(i)) != 0 || product(inverse(i), i) != 0)
      throw InvalidArgument("inverse table is wrong for element " +
                            std::to_string(i + 1));
  }
  for (std::uint32_t i = 0; i < g; ++i)
    for (std::uint32_t j = 0; j < g; ++j) {
      const auto ij = product(i, j);
      for (std::uint32_t k = 0; k < g; ++k)
        if (product(ij, k) != product(i, product(j, k)))
          throw InvalidArgument("multiplication table is not associative");
    }
}

FiniteTable FiniteTable::read(std::istream& in) {
  long long g = 0;
  if (!(in >> g) || g <= 0)
    throw InvalidArgument("finite table: expected a positive order");
  const auto order = static_cast<std::size_t>(g);
  auto next = [&](const char* what) {
    long long v = 0;
    if (!(in >> v)) throw InvalidArgument(std::string("finite table: missing ") + what);
    if (v < 1 || v > g)
      throw InvalidArgument(std::string("finite table: ") + what +
                            " index out of range");
    return static_cast<std::uint32_t>(v - 1);
  };
  std::vector<std::uint32_t> products(order * order), inverses(order);
  for (auto& p : products) p = next("product");
  for (auto& v : inverses) v = next("inverse");
  return FiniteTable(order, std::move(products), std::move(inverses));
}

void FiniteTable::write(std::ostream& out) const {
  out << order_ << '\n';
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = 0; j < order_; ++j)
      out << (j ? " " : "") << products_[i * order_ + j] + 1;
    out << '\n';
  }
  for (std::size_t i = 0; i < order_; ++i)
    out << (i ? " " : "") << inverses_[i] + 1;
  out << '\n';
}

FiniteTable FiniteTable::cyclic(std::size_t n) {
  if (n == 0) throw InvalidArgument("cyclic group of order 0");
  std::vector<std::uint32_t> products(n * n), inverses(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      products[i * n + j] = static_cast<std::uint32_t>((i + j) % n);
    inverses[i] = static_cast<std::uint32_t>((n - i) % n);
  }
  return FiniteTable(n, std::move(products), std::move(inverses));
}

FiniteTable FiniteTable::symmetric(std::size_t n) {
  if (n == 0 || n > 5) throw InvalidArgument("symmetric group degree must be 1..5");
  std::vector<std::vector<std::uint32_t>> perms;
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::map<std::vector<std::uint32_t>, std::uint32_t> index;
  for (std::size_t i = 0; i < perms.size(); ++i)
    index[perms[i]] = static_cast<std::uint32_t>(i);
  const std::size_t g = perms.size();
  std::vector<std::uint32_t> products(g * g), inverses(g);
  std::vector<std::uint32_t> r(n);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      // apply perms[i] first, then perms[j]
      for (std::size_t v = 0; v < n; ++v) r[v] = perms[j][perms[i][v]];
      products[i * g + j] = index.at(r);
    }
    for (std::size_t v = 0; v < n; ++v) r[perms[i][v]] = static_cast<std::uint32_t>(v);
    inverses[i] = index.at(r);
  }
  return FiniteTable(g, std::move(products), std::move(inverses));
}

// ---------------------------------------------------------------------------
// Group

Group::Group(FamilyKind kind, std::vector<std::string> names,
             std::optional<FiniteTable> table)
    : kind_(kind), names_(std::move(names)), table_(std::move(table)) {
  std::set<std::string> seen;
  for (auto& n : names_) {
    if (n.empty()) throw InvalidArgument("empty generator name");
    if (!(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_'))
      throw InvalidArgument("generator name must start with a letter: " + n);
    for (char c : n)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw InvalidArgument("bad character in generator name: " + n);
    if (!seen.insert(n).second)
      throw InvalidArgument("duplicate generator name: " + n);
  }
}

GroupPtr Group::free_abelian(std::size_t rank, std::vector<std::string> names) {
  if (rank == 0) throw InvalidArgument("free abelian rank must be positive");
  if (names.empty()) {
    if (rank == 1) names = {"t"};
    else if (rank == 2) names = {"x", "y"};
    else if (rank == 3) names = {"x", "y", "z"};
    else
      for (std::size_t i = 1; i <= rank; ++i) names.push_back("x" + std::to_string(i));
  }
  if (names.size() != rank) throw InvalidArgument("wrong number of generator names");
  for (auto& n : names)
    if (n == "e") throw InvalidArgument("'e' is reserved for the identity");
  return GroupPtr(new Group(FamilyKind::free_abelian, std::move(names), std::nullopt));
}

GroupPtr Group::free(std::size_t rank, std::vector<std::string> names) {
  if (rank == 0) throw InvalidArgument("free group rank must be positive");
  if (names.empty()) {
    if (rank <= 25) {
      for (char c = 'a'; names.size() < rank; ++c)
        if (c != 'e') names.emplace_back(1, c);
    } else {
      for (std::size_t i = 1; i <= rank; ++i) names.push_back("x" + std::to_string(i));
    }
  }
  if (names.size() != rank) throw InvalidArgument("wrong number of generator names");
  for (auto& n : names)
    if (n == "e") throw InvalidArgument("'e' is reserved for the identity");
  return GroupPtr(new Group(FamilyKind::free, std::move(names), std::nullopt));
}

GroupPtr Group::finite(FiniteTable table, std::vector<std::string> names) {
  const std::size_t g = table.order();
  if (names.empty()) {
    names.push_back("e");
    for (std::size_t i = 2; i <= g; ++i) names.push_back("g" + std::to_string(i));
  }
  if (names.size() != g) throw InvalidArgument("wrong number of element names");
  if (names[0] != "e") throw InvalidArgument("the identity must be named 'e'");
  for (std::size_t i = 1; i < g; ++i)
    if (names[i] == "e") throw InvalidArgument("'e' is reserved for the identity");
  return GroupPtr(new Group(FamilyKind::finite_table, std::move(names), std::move(table)));
}

std::optional<std::size_t> Group::find_generator(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

const FiniteTable& Group::table() const {
  if (!table_) throw FamilyMismatch("group " + describe() + " is not finite");
  return *table_;
}

std::string Group::describe() const {
  switch (kind_) {
    case FamilyKind::free_abelian:
      return "Z^" + std::to_string(names_.size());
    case FamilyKind::free:
      return "F_" + std::to_string(names_.size());
    default:
      return "finite(" + std::to_string(table_->order()) + ")";
  }
}

GroupElement Group::identity() const {
  switch (kind_) {
    case FamilyKind::free_abelian:
      return GroupElement::abelian(GroupElement::Vector(names_.size(), 0));
    case FamilyKind::free:
      return GroupElement::word({});
    default:
      return GroupElement::table_index(0);
  }
}

GroupElement Group::generator(std::size_t i, std::int64_t exponent) const {
  if (i >= names_.size()) throw InvalidArgument("generator index out of range");
  switch (kind_) {
    case FamilyKind::free_abelian: {
      GroupElement::Vector v(names_.size(), 0);
      v[i] = exponent;
      return GroupElement::abelian(std::move(v));
    }
    case FamilyKind::free:
      if (exponent == 0) return identity();
      return GroupElement::word({{static_cast<std::uint32_t>(i), exponent}});
    default:
      return power(GroupElement::table_index(static_cast<std::uint32_t>(i)), exponent);
  }
}

void Group::check(const GroupElement& a) const {
  switch (kind_) {
    case FamilyKind::free_abelian:
      if (!a.is_abelian() || a.exponents().size() != names_.size())
        throw FamilyMismatch("element is not in " + describe());
      return;
    case FamilyKind::free:
      if (!a.is_word()) throw FamilyMismatch("element is not in " + describe());
      for (auto& s : a.syllables())
        if (s.generator >= names_.size())
          throw FamilyMismatch("element is not in " + describe());
      return;
    default:
      if (!a.is_table_index() || a.index() >= table_->order())
        throw FamilyMismatch("element is not in " + describe());
  }
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw InvalidArgument("exponent overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw InvalidArgument("exponent overflow");
  return r;
}

}  // namespace

GroupElement Group::multiply(const GroupElement& a, const GroupElement& b) const {
  check(a);
  check(b);
  switch (kind_) {
    case FamilyKind::free_abelian: {
      GroupElement::Vector v = a.exponents();
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = checked_add(v[i], b.exponents()[i]);
      return GroupElement::abelian(std::move(v));
    }
    case FamilyKind::free: {
      GroupElement::Word w = a.syllables();
      const auto& rhs = b.syllables();
      std::size_t k = 0;
      while (k < rhs.size() && !w.empty() && w.back().generator == rhs[k].generator) {
        const auto e = checked_add(w.back().exponent, rhs[k].exponent);
        ++k;
        if (e == 0) {
          w.pop_back();
        } else {
          w.back().exponent = e;
          break;
        }
      }
      w.insert(w.end(), rhs.begin() + static_cast<std::ptrdiff_t>(k), rhs.end());
      return GroupElement::word(std::move(w));
    }
    default:
      return GroupElement::table_index(table_->product(a.index(), b.index()));
  }
}

GroupElement Group::inverse(const GroupElement& a) const {
  check(a);
  switch (kind_) {
    case FamilyKind::free_abelian: {
      GroupElement::Vector v = a.exponents();
      for (auto& e : v) e = checked_mul(e, -1);
      return GroupElement::abelian(std::move(v));
    }
    case FamilyKind::free: {
      GroupElement::Word w(a.syllables().rbegin(), a.syllables().rend());
      for (auto& s : w) s.exponent = checked_mul(s.exponent, -1);
      return GroupElement::word(std::move(w));
    }
    default:
      return GroupElement::table_index(table_->inverse(a.index()));
  }
}

GroupElement Group::power(const GroupElement& a, std::int64_t exponent) const {
  check(a);
  if (kind_ == FamilyKind::free_abelian) {
    GroupElement::Vector v = a.exponents();
    for (auto& e : v) e = checked_mul(e, exponent);
    return GroupElement::abelian(std::move(v));
  }
  if (kind_ == FamilyKind::free && a.syllables().size() == 1) {
    if (exponent == 0) return identity();
    auto s = a.syllables()[0];
    s.exponent = checked_mul(s.exponent, exponent);
    return GroupElement::word({s});
  }
  GroupElement base = exponent < 0 ? inverse(a) : a;
  // |INT64_MIN| does not fit; handled by the unsigned magnitude
  std::uint64_t n = exponent < 0 ? 0 - static_cast<std::uint64_t>(exponent)
                                 : static_cast<std::uint64_t>(exponent);
  GroupElement result = identity();
  while (n) {
    if (n & 1) result = multiply(result, base);
    n >>= 1;
    if (n) base = multiply(base, base);
  }
  return result;
}

bool Group::is_identity(const GroupElement& a) const { return a == identity(); }

std::vector<GroupElement> Group::ball(std::size_t radius) const {
  std::set<GroupElement> seen{identity()};
  std::vector<GroupElement> frontier{identity()};
  std::vector<GroupElement> steps;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    steps.push_back(generator(i));
    if (kind_ != FamilyKind::finite_table) steps.push_back(generator(i, -1));
  }
  for (std::size_t r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<GroupElement> next;
    for (auto& g : frontier)
      for (auto& s : steps) {
        auto h = multiply(g, s);
        if (seen.insert(h).second) next.push_back(std::move(h));
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

std::vector<GroupElement> Group::elements() const {
  const auto& t = table();
  std::vector<GroupElement> out;
  out.reserve(t.order());
  for (std::size_t i = 0; i < t.order(); ++i)
    out.push_back(GroupElement::table_index(static_cast<std::uint32_t>(i)));
  return out;
}

std::string Group::format(const GroupElement& a) const {
  check(a);
  std::ostringstream os;
  auto factor = [&](std::size_t gen, std::int64_t e, bool& first) {
    if (!first) os << '*';
    first = false;
    os << names_[gen];
    if (e != 1) os << '^' << e;
  };
  bool first = true;
  switch (kind_) {
    case FamilyKind::free_abelian:
      for (std::size_t i = 0; i < names_.size(); ++i)
        if (a.exponents()[i] != 0) factor(i, a.exponents()[i], first);
      break;
    case FamilyKind::free:
      for (auto& s : a.syllables()) factor(s.generator, s.exponent, first);
      break;
    default:
      return names_[a.index()];
  }
  return first ? std::string("e") : os.str();
}

bool Group::same_as(const Group& other) const {
  if (this == &other) return true;
  return kind_ == other.kind_ && names_ == other.names_ && table_ == other.table_;
}

void require_same_group(const GroupPtr& a, const GroupPtr& b) {
  if (a == b) return;
  if (!a || !b || !a->same_as(*b))
    throw FamilyMismatch("operands belong to different groups: " +
                         (a ? a->describe() : std::string("null")) + " vs " +
                         (b ? b->describe() : std::string("null")));
}

// ---------------------------------------------------------------------------
// FiniteQuotient

FiniteQuotient::FiniteQuotient(GroupPtr group, std::vector<Permutation> images,
                               bool genuine, std::string label)
    : group_(std::move(group)),
      images_(std::move(images)),
      degree_(0),
      genuine_(genuine),
      label_(std::move(label)) {
  if (!group_) throw InvalidArgument("quotient without a group");
  if (images_.size() != group_->generator_count())
    throw InvalidArgument("one generator image per generator is required");
  degree_ = images_.front().degree();
  if (degree_ == 0) throw InvalidArgument("quotient degree must be positive");
  for (auto& p : images_)
    if (p.degree() != degree_)
      throw InvalidArgument("generator images have different degrees");
  if (!genuine_) return;
  if (group_->kind() == FamilyKind::free_abelian) {
    for (std::size_t i = 0; i < images_.size(); ++i)
      for (std::size_t j = i + 1; j < images_.size(); ++j)
        if (images_[i] * images_[j] != images_[j] * images_[i])
          throw InvalidArgument("genuine quotient: generator images do not commute");
  } else if (group_->kind() == FamilyKind::finite_table) {
    const auto& t = group_->table();
    for (std::uint32_t i = 0; i < t.order(); ++i)
      for (std::uint32_t j = 0; j < t.order(); ++j)
        if (images_[i] * images_[j] != images_[t.product(i, j)])
          throw InvalidArgument("genuine quotient: images violate the table");
  }
}

Permutation FiniteQuotient::image(const GroupElement& w) const {
  group_->check(w);
  switch (group_->kind()) {
    case FamilyKind::free_abelian: {
      Permutation p = Permutation::identity(degree_);
      for (std::size_t i = 0; i < images_.size(); ++i)
        if (auto e = w.exponents()[i]; e != 0) p = p * images_[i].pow(e);
      return p;
    }
    case FamilyKind::free: {
      Permutation p = Permutation::identity(degree_);
      for (auto& s : w.syllables()) p = p * images_[s.generator].pow(s.exponent);
      return p;
    }
    default:
      return images_[w.index()];
  }
}

QuotientSequence::QuotientSequence(std::vector<FiniteQuotient> stages, bool chain)
    : stages_(std::move(stages)), chain_(chain) {
  if (stages_.empty()) throw InvalidArgument("empty quotient sequence");
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    require_same_group(stages_[i].group(), stages_[0].group());
    if (i > 0 && stages_[i].degree() <= stages_[i - 1].degree())
      throw InvalidArgument("quotient degrees must strictly increase");
  }
}

// ---------------------------------------------------------------------------
// Providers

FiniteQuotient grid_quotient(const GroupPtr& group, std::size_t modulus) {
  if (group->kind() != FamilyKind::free_abelian)
    throw FamilyMismatch("grid quotients need a free abelian group");
  if (modulus == 0) throw InvalidArgument("grid modulus must be positive");
  const std::size_t rank = group->generator_count();
  std::size_t degree = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    if (degree > (std::size_t{1} << 32) / modulus)
      throw ResourceExhausted("grid quotient degree overflows");
    degree *= modulus;
  }
  std::vector<Permutation> images;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < rank; ++i, stride *= modulus) {
    std::vector<std::uint32_t> img(degree);
    for (std::size_t v = 0; v < degree; ++v) {
      const std::size_t c = (v / stride) % modulus;
      img[v] = static_cast<std::uint32_t>(v - c * stride + ((c + 1) % modulus) * stride);
    }
    images.emplace_back(std::move(img));
  }
  std::string label = "grid Z^" + std::to_string(rank) + " mod " + std::to_string(modulus);
  return FiniteQuotient(group, std::move(images), true, std::move(label));
}

namespace {

using Mat2 = std::array<std::uint32_t, 4>;

Mat2 mul_mod(const Mat2& x, const Mat2& y, std::uint64_t m) {
  auto f = [m](std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return static_cast<std::uint32_t>((a * b + c * d) % m);
  };
  return {f(x[0], y[0], x[1], y[2]), f(x[0], y[1], x[1], y[3]),
          f(x[2], y[0], x[3], y[2]), f(x[2], y[1], x[3], y[3])};
}

std::uint64_t pack(const Mat2& x, std::uint64_t m) {
  return ((x[0] * m + x[1]) * m + x[2]) * m + x[3];
}

void check_sanov_modulus(std::uint32_t m) {
  if (m < 3 || m % 2 == 0)
    throw InvalidArgument("Sanov modulus must be odd and >= 3, got " + std::to_string(m));
  if (m > 65535) throw ResourceExhausted("Sanov modulus too large");
}

}  // namespace

std::vector<std::array<std::uint32_t, 4>> sanov_elements(std::uint32_t m) {
  check_sanov_modulus(m);
  const Mat2 gens[2] = {{1, 2 % m, 0, 1}, {1, 0, 2 % m, 1}};
  std::vector<Mat2> elems{{1, 0, 0, 1}};
  std::unordered_map<std::uint64_t, std::uint32_t> seen{{pack(elems[0], m), 0}};
  for (std::size_t head = 0; head < elems.size(); ++head)
    for (auto& g : gens) {
      auto y = mul_mod(g, elems[head], m);
      if (seen.emplace(pack(y, m), static_cast<std::uint32_t>(elems.size())).second)
        elems.push_back(y);
    }
  return elems;
}

FiniteQuotient sanov_quotient(const GroupPtr& group, std::uint32_t m) {
  if (group->kind() != FamilyKind::free || group->generator_count() != 2)
    throw FamilyMismatch("Sanov quotients need the free group of rank 2");
  auto elems = sanov_elements(m);
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  index.reserve(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i)
    index.emplace(pack(elems[i], m), static_cast<std::uint32_t>(i));
  const Mat2 gens[2] = {{1, 2 % m, 0, 1}, {1, 0, 2 % m, 1}};
  std::vector<Permutation> images;
  for (auto& g : gens) {
    std::vector<std::uint32_t> img(elems.size());
    for (std::size_t v = 0; v < elems.size(); ++v)
      img[v] = index.at(pack(mul_mod(g, elems[v], m), m));
    images.emplace_back(std::move(img));
  }
  return FiniteQuotient(group, std::move(images), true, "Sanov mod " + std::to_string(m));
}

FiniteQuotient regular_quotient(const GroupPtr& group) {
  const auto& t = group->table();
  const auto g = static_cast<std::uint32_t>(t.order());
  std::vector<Permutation> images;
  images.reserve(g);
  for (std::uint32_t s = 0; s < g; ++s) {
    std::vector<std::uint32_t> img(g);
    for (std::uint32_t v = 0; v < g; ++v) img[v] = t.product(s, v);
    images.emplace_back(std::move(img));
  }
  return FiniteQuotient(group, std::move(images), true,
                        "regular " + group->describe());
}

FiniteQuotient random_quotient(const GroupPtr& group, std::size_t degree,
                               std::uint64_t seed) {
  if (degree == 0) throw InvalidArgument("random quotient degree must be positive");
  if (degree > std::numeric_limits<std::uint32_t>::max())
    throw ResourceExhausted("random quotient degree too large");
  std::mt19937_64 rng(seed);
  std::vector<Permutation> images;
  for (std::size_t i = 0; i < group->generator_count(); ++i) {
    std::vector<std::uint32_t> img(degree);
    std::iota(img.begin(), img.end(), 0u);
    std::shuffle(img.begin(), img.end(), rng);
    images.emplace_back(std::move(img));
  }
  return FiniteQuotient(group, std::move(images), false,
                        "random degree " + std::to_string(degree) + " seed " +
                            std::to_string(seed));
}

namespace {

template <class T>
bool divisibility_chain(const std::vector<T>& moduli) {
  for (std::size_t i = 1; i < moduli.size(); ++i)
    if (moduli[i] % moduli[i - 1] != 0) return false;
  return true;
}

}  // namespace

QuotientSequence grid_sequence(const GroupPtr& group,
                               const std::vector<std::size_t>& moduli,
                               bool require_chain) {
  const bool chain = divisibility_chain(moduli);
  if (require_chain && !chain)
    throw InvalidArgument("grid moduli do not form a divisibility chain");
  std::vector<FiniteQuotient> stages;
  for (auto n : moduli) stages.push_back(grid_quotient(group, n));
  return QuotientSequence(std::move(stages), chain);
}

QuotientSequence sanov_sequence(const GroupPtr& group,
                                const std::vector<std::uint32_t>& moduli,
                                bool require_chain) {
  const bool chain = divisibility_chain(moduli);
  if (require_chain && !chain)
    throw InvalidArgument("Sanov moduli do not form a divisibility chain");
  std::vector<FiniteQuotient> stages;
  for (auto m : moduli) stages.push_back(sanov_quotient(group, m));
  return QuotientSequence(std::move(stages), chain);
}

// ---------------------------------------------------------------------------
// Soficity

std::vector<SoficityDefect> soficity_defect(
    const FiniteQuotient& q,
    std::span<const std::pair<GroupElement, GroupElement>> pairs) {
  const auto& group = *q.group();
  const std::size_t d = q.degree();
  std::vector<SoficityDefect> out;
  out.reserve(pairs.size());
  for (auto& [s, t] : pairs) {
    const auto ps = q.image(s);
    const auto pt = q.image(t);
    const auto pst = q.image(group.multiply(s, t));
    std::size_t agree = 0;
    for (std::uint32_t v = 0; v < d; ++v)
      if (ps(pt(v)) == pst(v)) ++agree;
    SoficityDefect r;
    r.mult_defect = mpq_class(static_cast<unsigned long>(d - agree),
                              static_cast<unsigned long>(d));
    r.mult_defect.canonicalize();
    if (!(s == t)) {
      std::size_t differ = 0;
      for (std::uint32_t v = 0; v < d; ++v)
        if (ps(v) != pt(v)) ++differ;
      mpq_class sep(static_cast<unsigned long>(d - differ),
                    static_cast<unsigned long>(d));
      sep.canonicalize();
      r.sep_defect = sep;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace l2approx
