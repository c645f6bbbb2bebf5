#pragma once

// Group families with decidable normal forms (Z^d, free groups, explicit
// finite groups) and their finite permutation models.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace l2approx {

// A permutation of {0, ..., d-1}. Composition follows function notation:
// (p * q)(v) == p(q(v)).
class Permutation {
 public:
  Permutation() = default;
  // Throws InvalidArgument unless `images` is a bijection of [0, size).
  explicit Permutation(std::vector<std::uint32_t> images);

  static Permutation identity(std::size_t degree);

  std::size_t degree() const { return images_.size(); }
  std::uint32_t operator()(std::uint32_t v) const { return images_[v]; }
  std::span<const std::uint32_t> images() const { return images_; }

  Permutation operator*(const Permutation& rhs) const;
  Permutation inverse() const;
  // Cycle-wise shift, so large exponents cost O(d).
  Permutation pow(std::int64_t exponent) const;
  bool is_identity() const;

  bool operator==(const Permutation&) const = default;

 private:
  struct Unchecked {};
  Permutation(Unchecked, std::vector<std::uint32_t> images)
      : images_(std::move(images)) {}

  std::vector<std::uint32_t> images_;
};

// One syllable x_gen^exponent of a reduced free word; exponent != 0.
struct Syllable {
  std::uint32_t generator;
  std::int64_t exponent;
  auto operator<=>(const Syllable&) const = default;
};

// Normal form of a group element. The payload kind must match the owning
// Group; all arithmetic goes through Group.
class GroupElement {
 public:
  using Vector = std::vector<std::int64_t>;
  using Word = std::vector<Syllable>;
  using Index = std::uint32_t;

  GroupElement() = default;

  static GroupElement abelian(Vector exponents);
  // Throws InvalidArgument unless `word` is reduced (nonzero exponents, no
  // two adjacent syllables on the same generator).
  static GroupElement word(Word word);
  static GroupElement table_index(Index index);

  bool is_abelian() const { return payload_.index() == 0; }
  bool is_word() const { return payload_.index() == 1; }
  bool is_table_index() const { return payload_.index() == 2; }

  const Vector& exponents() const { return std::get<Vector>(payload_); }
  const Word& syllables() const { return std::get<Word>(payload_); }
  Index index() const { return std::get<Index>(payload_); }

  bool operator==(const GroupElement&) const = default;
  // Canonical total order: shortlex on word length (sum of |exponents|),
  // then lexicographic; table elements by index.
  std::strong_ordering operator<=>(const GroupElement& rhs) const;

  std::size_t hash() const;

 private:
  std::variant<Vector, Word, Index> payload_;
};

// Multiplication table of a finite group, 0-based, identity at index 0.
class FiniteTable {
 public:
  // Validates identity, inverse and associativity axioms.
  FiniteTable(std::size_t order, std::vector<std::uint32_t> products,
              std::vector<std::uint32_t> inverses);

  // Text format: order g, then g rows of g 1-based indices (row i, column j
  // holds i*j), then one row of inverse indices. Identity is index 1.
  static FiniteTable read(std::istream& in);
  void write(std::ostream& out) const;

  static FiniteTable cyclic(std::size_t n);
  // Sym(n) with elements in lexicographic order of their image lists and
  // product p*q meaning "apply p, then q".
  static FiniteTable symmetric(std::size_t n);

  std::size_t order() const { return order_; }
  std::uint32_t product(std::uint32_t i, std::uint32_t j) const {
    return products_[static_cast<std::size_t>(i) * order_ + j];
  }
  std::uint32_t inverse(std::uint32_t i) const { return inverses_[i]; }

  bool operator==(const FiniteTable&) const = default;

 private:
  std::size_t order_;
  std::vector<std::uint32_t> products_;
  std::vector<std::uint32_t> inverses_;
};

enum class FamilyKind { free_abelian, free, finite_table };

class Group;
using GroupPtr = std::shared_ptr<const Group>;

class Group {
 public:
  // Default names: rank 1 -> t; rank 2 -> x, y; rank 3 -> x, y, z;
  // otherwise x1..xd.
  static GroupPtr free_abelian(std::size_t rank,
                               std::vector<std::string> names = {});
  // Default names: a, b, c, d, f, ... ('e' is reserved for the identity).
  static GroupPtr free(std::size_t rank, std::vector<std::string> names = {});
  // Every element is a generator; default names e, g2, ..., gN.
  static GroupPtr finite(FiniteTable table, std::vector<std::string> names = {});

  FamilyKind kind() const { return kind_; }
  std::size_t generator_count() const { return names_.size(); }
  const std::vector<std::string>& generator_names() const { return names_; }
  std::optional<std::size_t> find_generator(std::string_view name) const;
  const FiniteTable& table() const;
  bool is_finite() const { return kind_ == FamilyKind::finite_table; }
  std::string describe() const;

  GroupElement identity() const;
  GroupElement generator(std::size_t i, std::int64_t exponent = 1) const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  GroupElement power(const GroupElement& a, std::int64_t exponent) const;
  bool is_identity(const GroupElement& a) const;

  // Throws FamilyMismatch if `a` is not a valid normal form of this group.
  void check(const GroupElement& a) const;

  // Elements of word length <= radius, in canonical order.
  std::vector<GroupElement> ball(std::size_t radius) const;
  // All elements of a finite group, by index.
  std::vector<GroupElement> elements() const;

  std::string format(const GroupElement& a) const;

  bool same_as(const Group& other) const;

 private:
  Group(FamilyKind kind, std::vector<std::string> names,
        std::optional<FiniteTable> table);

  FamilyKind kind_;
  std::vector<std::string> names_;
  std::optional<FiniteTable> table_;
};

// Throws FamilyMismatch unless both pointers denote the same group.
void require_same_group(const GroupPtr& a, const GroupPtr& b);

// A single stage sigma: Gamma -> Sym(d) given by generator images.
class FiniteQuotient {
 public:
  // For genuine quotients of abelian and finite-table families the relators
  // are checked: generator images must commute (resp. respect the table).
  FiniteQuotient(GroupPtr group, std::vector<Permutation> generator_images,
                 bool genuine, std::string label);

  const GroupPtr& group() const { return group_; }
  std::size_t degree() const { return degree_; }
  const std::vector<Permutation>& generator_images() const {
    return images_;
  }
  bool genuine() const { return genuine_; }
  const std::string& label() const { return label_; }

  // Composes generator images along the normal form of `w`.
  Permutation image(const GroupElement& w) const;

 private:
  GroupPtr group_;
  std::vector<Permutation> images_;
  std::size_t degree_;
  bool genuine_;
  std::string label_;
};

inline Permutation extend_to_word(const FiniteQuotient& q,
                                  const GroupElement& w) {
  return q.image(w);
}

// Finite prefix of a sofic approximation. Degrees strictly increase.
class QuotientSequence {
 public:
  QuotientSequence(std::vector<FiniteQuotient> stages, bool chain);

  const std::vector<FiniteQuotient>& stages() const { return stages_; }
  std::size_t size() const { return stages_.size(); }
  bool chain() const { return chain_; }
  const GroupPtr& group() const { return stages_.front().group(); }

 private:
  std::vector<FiniteQuotient> stages_;
  bool chain_;
};

// Z^d acting by translation on (Z/n)^d; point index is sum c_i n^i.
FiniteQuotient grid_quotient(const GroupPtr& group, std::size_t modulus);

// F_2 -> SL_2(Z) via a -> [[1,2],[0,1]], b -> [[1,0],[2,1]], reduced mod m,
// acting on SL_2(Z/m) by left multiplication. m must be odd and >= 3.
FiniteQuotient sanov_quotient(const GroupPtr& group, std::uint32_t modulus);

// Elements of SL_2(Z/m) as row-major {a, b, c, d}, in the point order used
// by sanov_quotient (breadth-first from the identity).
std::vector<std::array<std::uint32_t, 4>> sanov_elements(std::uint32_t modulus);

// Left regular action of a finite group on itself.
FiniteQuotient regular_quotient(const GroupPtr& group);

// Independent uniform permutations per generator; never genuine.
FiniteQuotient random_quotient(const GroupPtr& group, std::size_t degree,
                               std::uint64_t seed);

// Sequences over the given moduli. `chain` is set when each modulus divides
// the next; require_chain turns a divisibility failure into an error.
QuotientSequence grid_sequence(const GroupPtr& group,
                               const std::vector<std::size_t>& moduli,
                               bool require_chain = false);
QuotientSequence sanov_sequence(const GroupPtr& group,
                                const std::vector<std::uint32_t>& moduli,
                                bool require_chain = false);

struct SoficityDefect {
  mpq_class mult_defect;
  std::optional<mpq_class> sep_defect;  // empty when s == t
};

// mult = 1 - |{v : s(t(v)) == (st)(v)}| / d,
// sep  = 1 - |{v : s(v) != t(v)}| / d.
std::vector<SoficityDefect> soficity_defect(
    const FiniteQuotient& q,
    std::span<const std::pair<GroupElement, GroupElement>> pairs);

}  // namespace l2approx

template <>
struct std::hash<l2approx::GroupElement> {
  std::size_t operator()(const l2approx::GroupElement& g) const {
    return g.hash();
  }
};
