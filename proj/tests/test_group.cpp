#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "l2approx/error.hpp"
#include "l2approx/group.hpp"
#include "oracles.hpp"

using namespace l2approx;

namespace {

FiniteTable load_s3() {
  std::ifstream in(L2_TEST_DATA "/s3.table");
  return FiniteTable::read(in);
}

GroupElement random_word(const GroupPtr& g, std::mt19937_64& rng, std::size_t max_len = 6) {
  std::uniform_int_distribution<std::size_t> len(0, max_len), gen(0, g->generator_count() - 1);
  std::uniform_int_distribution<int> exp(-3, 3);
  auto w = g->identity();
  for (std::size_t k = len(rng); k > 0; --k) w = g->multiply(w, g->generator(gen(rng), exp(rng)));
  return w;
}

}  // namespace

TEST(Permutation, ComposesRightToLeft) {
  Permutation p({1, 2, 0}), q({1, 0, 2});
  auto pq = p * q;
  for (std::uint32_t v = 0; v < 3; ++v) EXPECT_EQ(pq(v), p(q(v)));
  EXPECT_TRUE((p * p.inverse()).is_identity());
  EXPECT_EQ(p.pow(3), Permutation::identity(3));
  EXPECT_EQ(p.pow(-1), p.inverse());
  EXPECT_EQ(p.pow(1000000000001LL), p.pow(1000000000001LL % 3));
}

TEST(Permutation, RejectsNonBijections) {
  EXPECT_THROW(Permutation({0, 0, 1}), InvalidArgument);
  EXPECT_THROW(Permutation({0, 3, 1}), InvalidArgument);
}

TEST(Multiply, FreeAbelian) {
  auto z2 = Group::free_abelian(2);
  EXPECT_EQ(z2->multiply(GroupElement::abelian({1, 0}), GroupElement::abelian({0, 1})),
            GroupElement::abelian({1, 1}));
  EXPECT_EQ(z2->generator_names(), (std::vector<std::string>{"x", "y"}));
}

TEST(Multiply, FreeGroupCancels) {
  auto f2 = Group::free(2);
  auto a = f2->generator(0), b = f2->generator(1);
  auto ab = f2->multiply(a, b);
  EXPECT_EQ(f2->multiply(ab, f2->inverse(b)), a);
  EXPECT_NE(ab, f2->multiply(b, a));
  EXPECT_EQ(f2->format(f2->multiply(ab, f2->generator(1, -3))), "a*b^-2");
  EXPECT_THROW(GroupElement::word({{0, 1}, {0, 2}}), InvalidArgument);
  EXPECT_THROW(GroupElement::word({{0, 0}}), InvalidArgument);
}

TEST(Multiply, FiniteTableS3) {
  auto s3 = Group::finite(load_s3(), {"e", "s12", "s13", "s23", "r", "r2"});
  auto s12 = *s3->find_generator("s12"), s13 = *s3->find_generator("s13");
  auto r = *s3->find_generator("r");
  EXPECT_EQ(s3->multiply(s3->generator(s12), s3->generator(s13)), s3->generator(r));
  EXPECT_TRUE(s3->is_identity(s3->power(s3->generator(r), 3)));
}

TEST(Multiply, FamilyMismatch) {
  auto z = Group::free_abelian(1);
  auto f2 = Group::free(2);
  EXPECT_THROW(z->multiply(z->generator(0), f2->generator(0)), FamilyMismatch);
  EXPECT_THROW(require_same_group(z, f2), FamilyMismatch);
}

TEST(Multiply, GroupAxiomsOnRandomWords) {
  std::mt19937_64 rng(11);
  for (auto g : {Group::free(2), Group::free_abelian(3), Group::finite(load_s3())}) {
    for (int i = 0; i < 200; ++i) {
      auto x = random_word(g, rng), y = random_word(g, rng), z = random_word(g, rng);
      EXPECT_EQ(g->multiply(g->multiply(x, y), z), g->multiply(x, g->multiply(y, z)));
      EXPECT_TRUE(g->is_identity(g->multiply(x, g->inverse(x))));
      EXPECT_EQ(g->multiply(g->identity(), x), x);
    }
  }
}

TEST(FiniteTable, ValidatesAxioms) {
  // not associative: a Latin square that is no group
  std::vector<std::uint32_t> bad{0, 1, 2, 3, 4,  //
                                 1, 0, 3, 4, 2,  //
                                 2, 4, 0, 1, 3,  //
                                 3, 2, 4, 0, 1,  //
                                 4, 3, 1, 2, 0};
  EXPECT_THROW(FiniteTable(5, bad, {0, 1, 2, 3, 4}), InvalidArgument);
  EXPECT_THROW(FiniteTable(2, {0, 1, 1, 1}, {0, 1}), InvalidArgument);
  EXPECT_THROW(FiniteTable(2, {0, 1, 1, 0}, {0, 0}), InvalidArgument);
  EXPECT_NO_THROW(FiniteTable(2, {0, 1, 1, 0}, {0, 1}));
}

TEST(FiniteTable, TextRoundTrip) {
  auto t = load_s3();
  std::ostringstream out;
  t.write(out);
  std::istringstream in(out.str());
  EXPECT_EQ(FiniteTable::read(in), t);
  std::istringstream truncated("3\n1 2 3\n2 3 1\n");
  EXPECT_THROW(FiniteTable::read(truncated), InvalidArgument);
}

TEST(FiniteTable, SymmetricMatchesFileUpToRelabeling) {
  auto sym = FiniteTable::symmetric(3);
  EXPECT_EQ(sym.order(), 6u);
  // same number of involutions as the file's table
  auto count = [](const FiniteTable& t) {
    int n = 0;
    for (std::uint32_t i = 1; i < t.order(); ++i) n += t.product(i, i) == 0;
    return n;
  };
  EXPECT_EQ(count(sym), count(load_s3()));
  EXPECT_EQ(FiniteTable::cyclic(4).product(3, 2), 1u);
}

TEST(ExtendToWord, IdentityAndShifts) {
  auto z = Group::free_abelian(1);
  auto q = grid_quotient(z, 5);
  EXPECT_TRUE(extend_to_word(q, z->identity()).is_identity());
  auto p = extend_to_word(q, z->generator(0, 3));
  for (std::uint32_t v = 0; v < 5; ++v) EXPECT_EQ(p(v), (v + 3) % 5);
}

TEST(ExtendToWord, SanovMatchesMatrixArithmetic) {
  auto f2 = Group::free(2);
  auto q = sanov_quotient(f2, 3);
  const auto elements = sanov_elements(3);
  std::map<std::array<std::uint32_t, 4>, std::uint32_t> index;
  for (std::uint32_t i = 0; i < elements.size(); ++i) index[elements[i]] = i;
  const oracle::Mat2 a{1, 2, 0, 1}, b{1, 0, 2, 1}, a_inv{1, -2, 0, 1};
  const auto w = oracle::mul_mod(oracle::mul_mod(a, b, 3), a_inv, 3);
  auto word = f2->multiply(f2->multiply(f2->generator(0), f2->generator(1)), f2->generator(0, -1));
  auto p = extend_to_word(q, word);
  ASSERT_EQ(p.degree(), 24u);
  for (std::uint32_t v = 0; v < 24; ++v) {
    const auto& e = elements[v];
    auto image = oracle::mul_mod(w, {e[0], e[1], e[2], e[3]}, 3);
    std::array<std::uint32_t, 4> key{static_cast<std::uint32_t>(image[0]),
                                     static_cast<std::uint32_t>(image[1]),
                                     static_cast<std::uint32_t>(image[2]),
                                     static_cast<std::uint32_t>(image[3])};
    EXPECT_EQ(p(v), index.at(key));
  }
}

TEST(ExtendToWord, HomomorphismOnGenuineQuotients) {
  std::mt19937_64 rng(5);
  auto f2 = Group::free(2);
  auto z2 = Group::free_abelian(2);
  auto s3 = Group::finite(load_s3());
  std::vector<FiniteQuotient> qs{sanov_quotient(f2, 5), grid_quotient(z2, 4), regular_quotient(s3)};
  for (auto& q : qs)
    for (int i = 0; i < 50; ++i) {
      auto x = random_word(q.group(), rng), y = random_word(q.group(), rng);
      EXPECT_EQ(q.image(q.group()->multiply(x, y)), q.image(x) * q.image(y));
    }
}

TEST(Providers, Degrees) {
  auto f2 = Group::free(2);
  for (auto [m, order] : {std::pair{3u, 24u}, {5u, 120u}, {15u, 2880u}}) {
    EXPECT_EQ(sanov_quotient(f2, m).degree(), order);
    EXPECT_EQ(oracle::count_sl2(m), order);
  }
  EXPECT_EQ(grid_quotient(Group::free_abelian(2), 3).degree(), 9u);
  auto g1 = grid_quotient(Group::free_abelian(1), 5);
  EXPECT_EQ(g1.generator_images()[0], Permutation({1, 2, 3, 4, 0}));
  auto s3 = Group::finite(load_s3());
  auto reg = regular_quotient(s3);
  EXPECT_EQ(reg.degree(), 6u);
  for (std::uint32_t g = 0; g < 6; ++g)
    for (std::uint32_t v = 0; v < 6; ++v)
      EXPECT_EQ(reg.generator_images()[g](v), s3->table().product(g, v));
}

TEST(Providers, RejectBadParameters) {
  auto f2 = Group::free(2);
  EXPECT_THROW(sanov_quotient(f2, 4), InvalidArgument);
  EXPECT_THROW(sanov_quotient(f2, 1), InvalidArgument);
  EXPECT_THROW(sanov_quotient(Group::free(3), 3), FamilyMismatch);
  EXPECT_THROW(grid_quotient(f2, 3), FamilyMismatch);
  EXPECT_THROW(grid_quotient(Group::free_abelian(1), 0), InvalidArgument);
  EXPECT_THROW(regular_quotient(f2), FamilyMismatch);
}

TEST(Providers, GenuineRelatorCheck) {
  auto z2 = Group::free_abelian(2);
  Permutation s({1, 0, 2}), t({0, 2, 1});
  EXPECT_THROW(FiniteQuotient(z2, {s, t}, true, "noncommuting"), InvalidArgument);
  EXPECT_NO_THROW(FiniteQuotient(z2, {s, t}, false, "heuristic"));
}

TEST(Providers, RandomIsReproducible) {
  auto f2 = Group::free(2);
  auto a = random_quotient(f2, 100, 7), b = random_quotient(f2, 100, 7);
  auto c = random_quotient(f2, 100, 8);
  EXPECT_EQ(a.generator_images(), b.generator_images());
  EXPECT_NE(a.generator_images(), c.generator_images());
  EXPECT_FALSE(a.genuine());
}

TEST(Sequences, ChainFlagAndOrdering) {
  auto f2 = Group::free(2);
  EXPECT_TRUE(sanov_sequence(f2, {3, 9, 27}).chain());
  EXPECT_FALSE(sanov_sequence(f2, {3, 5, 15}).chain());
  EXPECT_THROW(sanov_sequence(f2, {3, 5}, true), InvalidArgument);
  EXPECT_THROW(sanov_sequence(f2, {5, 3}), InvalidArgument);
  auto z = Group::free_abelian(1);
  EXPECT_TRUE(grid_sequence(z, {2, 4, 8}).chain());
}

TEST(Soficity, GenuineQuotientsAreMultiplicative) {
  std::mt19937_64 rng(3);
  auto f2 = Group::free(2);
  auto q = sanov_quotient(f2, 5);
  std::vector<std::pair<GroupElement, GroupElement>> pairs;
  for (int i = 0; i < 10; ++i) pairs.emplace_back(random_word(f2, rng), random_word(f2, rng));
  for (auto& d : soficity_defect(q, pairs)) EXPECT_EQ(d.mult_defect, 0);
}

TEST(Soficity, EqualImagesGiveFullSeparationDefect) {
  auto z = Group::free_abelian(1);
  auto q = grid_quotient(z, 3);
  std::vector<std::pair<GroupElement, GroupElement>> pairs{{z->generator(0), z->generator(0, 4)},
                                                           {z->generator(0), z->generator(0)}};
  auto d = soficity_defect(q, pairs);
  EXPECT_EQ(*d[0].sep_defect, 1);
  EXPECT_FALSE(d[1].sep_defect.has_value());
}

TEST(Soficity, RandomModelMatchesDirectCount) {
  auto f2 = Group::free(2);
  auto q = random_quotient(f2, 100, 7);
  auto a = f2->generator(0), b = f2->generator(1);
  auto ab = f2->multiply(a, b), ba = f2->multiply(b, a);
  std::vector<std::pair<GroupElement, GroupElement>> pairs{{a, b}, {ab, ba}};
  auto d = soficity_defect(q, pairs);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto s = q.image(pairs[i].first), t = q.image(pairs[i].second);
    auto st = q.image(f2->multiply(pairs[i].first, pairs[i].second));
    int agree = 0, differ = 0;
    for (std::uint32_t v = 0; v < 100; ++v) {
      agree += s(t(v)) == st(v);
      differ += s(v) != t(v);
    }
    mpq_class agree_q(agree, 100), differ_q(differ, 100);
    agree_q.canonicalize();
    differ_q.canonicalize();
    EXPECT_EQ(d[i].mult_defect, 1 - agree_q);
    EXPECT_EQ(*d[i].sep_defect, 1 - differ_q);
  }
}

TEST(Soficity, RandomAbelianModelFailsMultiplicativity) {
  auto z2 = Group::free_abelian(2);
  auto q = random_quotient(z2, 50, 1);
  auto x = z2->generator(0), y = z2->generator(1);
  std::vector<std::pair<GroupElement, GroupElement>> pairs{{y, x}};
  EXPECT_GT(soficity_defect(q, pairs)[0].mult_defect, 0);
}
