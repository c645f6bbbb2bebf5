#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "l2approx/error.hpp"
#include "l2approx/invariants.hpp"
#include "oracles.hpp"

using namespace l2approx;

namespace {

mpq_class Q(long a, long b = 1) {
  mpq_class q(a, b);
  q.canonicalize();
  return q;
}

GroupPtr s3_group() {
  std::ifstream in(L2_TEST_DATA "/s3.table");
  return Group::finite(FiniteTable::read(in), {"e", "s12", "s13", "s23", "r", "r2"});
}

QuotientSequence regular_sequence(const GroupPtr& g) {
  return QuotientSequence({regular_quotient(g)}, true);
}

ChainComplex koszul(const GroupPtr& z2) {
  return build_complex({1, 2, 1}, {RingMatrix::parse({{"y - 1", "1 - x"}}, z2),
                                   RingMatrix::parse({{"x - 1"}, {"y - 1"}}, z2)});
}

ChainComplex f2_complex(const GroupPtr& f2) {
  return build_complex({2, 1}, {RingMatrix::parse({{"a - 1"}, {"b - 1"}}, f2)});
}

RingMatrix random_matrix(const GroupPtr& g, std::size_t rows, std::size_t cols,
                         std::mt19937_64& rng) {
  RingMatrix m(g, rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) m.set(i, k, oracle::random_element(g, rng, 3));
  return m;
}

// Rank over Q of the right regular action x -> x * f on (QG)^{1 x m}, from
// the multiplication table alone.
std::size_t right_regular_rank(const RingMatrix& f) {
  const auto& table = f.group()->table();
  const std::size_t g = table.order();
  oracle::QMatrix a(f.rows() * g, std::vector<mpq_class>(f.cols() * g));
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t k = 0; k < f.cols(); ++k)
      for (auto& [s, c] : f(i, k).terms())
        for (std::uint32_t x = 0; x < g; ++x)
          a[i * g + x][k * g + table.product(x, s.index())] += c;
  return oracle::rank_q(a);
}

// Literal mean rank over a finite group, straight from the definition with
// dense rational vectors indexed by (v, h, k).
mpq_class mean_rank_oracle(const ModulePresentation& m, const FiniteSubgroupSpec& a,
                           const FiniteSubgroupSpec& b, const std::vector<GroupElement>& f,
                           const FiniteQuotient& q) {
  const auto& table = m.group->table();
  const std::size_t g = table.order(), n = m.free_rank, d = q.degree();
  const std::size_t dim = d * g * n;
  auto vec = [&](std::size_t v, std::uint32_t left, const std::vector<RingElement>& x, int sign) {
    std::vector<mpq_class> out(dim);
    for (std::size_t k = 0; k < n; ++k)
      for (auto& [h, c] : x[k].terms())
        out[(v * g + table.product(left, h.index())) * n + k] += sign * mpq_class(c);
    return out;
  };
  auto add = [](std::vector<mpq_class> x, const std::vector<mpq_class>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return x;
  };
  oracle::QMatrix rel;
  if (m.relations)
    for (std::size_t i = 0; i < m.relations->rows(); ++i) {
      std::vector<RingElement> row;
      for (std::size_t k = 0; k < n; ++k) row.push_back((*m.relations)(i, k));
      for (std::uint32_t h = 0; h < g; ++h)
        for (std::size_t v = 0; v < d; ++v) rel.push_back(vec(v, h, row, 1));
    }
  for (auto& s : f) {
    auto p = q.image(s);
    for (auto& bv : b.generators)
      for (std::uint32_t v = 0; v < d; ++v)
        rel.push_back(add(vec(v, 0, bv, 1), vec(p(v), s.index(), bv, -1)));
  }
  oracle::QMatrix both = rel;
  for (auto& av : a.generators)
    for (std::size_t v = 0; v < d; ++v) both.push_back(vec(v, 0, av, 1));
  const auto r_both = oracle::rank_q(both);
  const auto r_rel = rel.empty() ? 0 : oracle::rank_q(rel);
  return Q(static_cast<long>(r_both - r_rel), static_cast<long>(d));
}

}  // namespace

TEST(Betti, FreeGroupExample) {
  auto f2 = Group::free(2);
  auto seq = sanov_sequence(f2, {3, 5});
  auto b1 = betti_approximants(f2_complex(f2), seq, 1);
  auto b0 = betti_approximants(f2_complex(f2), seq, 0);
  ASSERT_EQ(b1.points.size(), 2u);
  EXPECT_EQ(b1.points[0].degree, 24u);
  EXPECT_EQ(b1.points[0].value, Q(25, 24));
  EXPECT_EQ(b1.points[1].value, Q(121, 120));
  EXPECT_EQ(b0.points[0].value, Q(1, 24));
  EXPECT_EQ(b0.points[1].value, Q(1, 120));
  EXPECT_TRUE(b1.certified());
  EXPECT_EQ(b1.invariant_label, "betti_1");
}

TEST(Betti, InvertibleCirculantVanishes) {
  auto z = Group::free_abelian(1);
  auto c = build_complex({1, 1}, {RingMatrix::parse({{"t - 2"}}, z)});
  auto seq = grid_sequence(z, {2, 4, 8, 16});
  for (std::size_t j : {0u, 1u})
    for (auto& p : betti_approximants(c, seq, j).points) EXPECT_EQ(p.value, 0);
}

TEST(Betti, KoszulComplex) {
  auto z2 = Group::free_abelian(2);
  auto seq = grid_sequence(z2, {2, 3, 4});
  auto c = koszul(z2);
  for (std::size_t j = 0; j <= 2; ++j) {
    auto s = betti_approximants(c, seq, j);
    for (auto& p : s.points) {
      const long d = static_cast<long>(p.degree);
      EXPECT_EQ(p.value, Q(j == 1 ? 2 : 1, d)) << "j=" << j << " d=" << d;
    }
  }
  EXPECT_THROW(betti_approximants(c, seq, 3), InvalidArgument);
}

TEST(Betti, ZeroComplex) {
  auto z = Group::free_abelian(1);
  auto c = build_complex({2, 3}, {RingMatrix(z, 2, 3)});
  auto seq = grid_sequence(z, {3, 5});
  for (auto& p : betti_approximants(c, seq, 1).points) EXPECT_EQ(p.value, 2);
  for (auto& p : betti_approximants(c, seq, 0).points) EXPECT_EQ(p.value, 3);
}

TEST(Betti, RejectsHeuristicQuotients) {
  auto f2 = Group::free(2);
  QuotientSequence seq({random_quotient(f2, 10, 1)}, false);
  EXPECT_THROW(betti_approximants(f2_complex(f2), seq, 1), NotGenuine);
  EXPECT_THROW(vrk_approximants(ModulePresentation::free(f2, 1), seq), NotGenuine);
  auto diag = stage_diagnostics(f2_complex(f2), seq.stages()[0], 1);
  EXPECT_EQ(diag.degree, 10u);
  EXPECT_FALSE(diag.composite_nonzero);
}

TEST(Betti, SequentialAndParallelAgree) {
  auto z2 = Group::free_abelian(2);
  auto seq = grid_sequence(z2, {2, 3, 5});
  PipelineOptions serial;
  serial.parallel = false;
  serial.policy.parallel = false;
  auto a = betti_approximants(koszul(z2), seq, 1);
  auto b = betti_approximants(koszul(z2), seq, 1, serial);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].value, b.points[i].value);
}

TEST(FiniteGroupOracle, CyclicOfOrderTwo) {
  auto g = Group::finite(FiniteTable::cyclic(2));
  auto c = build_complex({1, 1}, {RingMatrix::parse({{"1 + g2"}}, g)});
  auto exact = finite_group_exact_betti(c);
  ASSERT_EQ(exact.size(), 2u);
  EXPECT_EQ(exact[0], Q(1, 2));
  EXPECT_EQ(exact[1], Q(1, 2));
  EXPECT_EQ(betti_approximants(c, regular_sequence(g), 1).points[0].value, Q(1, 2));
  auto ones = build_complex({2, 2}, {RingMatrix::parse({{"1", "1"}, {"1", "1"}}, g)});
  EXPECT_EQ(finite_group_exact_betti(ones)[1], 1);
  EXPECT_EQ(finite_group_exact_betti(ones)[0], 1);
}

TEST(FiniteGroupOracle, SymmetricGroupReflection) {
  auto s3 = s3_group();
  auto c = build_complex({1, 1}, {RingMatrix::parse({{"s12 - 1"}}, s3)});
  EXPECT_EQ(right_regular_rank(c.differential(1)), 3u);
  auto exact = finite_group_exact_betti(c);
  EXPECT_EQ(exact[1], Q(1, 2));
  EXPECT_EQ(exact[0], Q(1, 2));
  EXPECT_EQ(betti_approximants(c, regular_sequence(s3), 0).points[0].value, Q(1, 2));
  EXPECT_THROW(finite_group_exact_betti(f2_complex(Group::free(2))), FamilyMismatch);
}

TEST(FiniteGroupOracle, AgreesWithPipelineOnRandomMatrices) {
  std::mt19937_64 rng(17);
  for (auto g : {Group::finite(FiniteTable::cyclic(4)), s3_group()}) {
    for (int i = 0; i < 8; ++i) {
      auto f = random_matrix(g, 2, 2, rng);
      auto c = build_complex({2, 2}, {f});
      const long order = static_cast<long>(g->table().order());
      const auto r = static_cast<long>(right_regular_rank(f));
      auto exact = finite_group_exact_betti(c);
      EXPECT_EQ(exact[1], Q(2 * order - r, order));
      EXPECT_EQ(exact[0], Q(2 * order - r, order));
      EXPECT_EQ(betti_approximants(c, regular_sequence(g), 1).points[0].value, exact[1]);
    }
  }
}

TEST(Vrk, RelativeRankOfAugmentationIdeal) {
  auto f2 = Group::free(2);
  FiniteSubgroupSpec ideal{{{parse_ring_element("a - 1", f2)}, {parse_ring_element("b - 1", f2)}}};
  auto s = relative_vrk_approximants(ModulePresentation::free(f2, 1), ideal,
                                     sanov_sequence(f2, {3, 5}));
  EXPECT_EQ(s.points[0].value, Q(23, 24));
  EXPECT_EQ(s.points[1].value, Q(119, 120));
  auto whole = relative_vrk_approximants(ModulePresentation::free(f2, 2),
                                         FiniteSubgroupSpec::standard_basis(f2, 2),
                                         sanov_sequence(f2, {3}));
  EXPECT_EQ(whole.points[0].value, 2);
}

TEST(Vrk, DirectSumIsAdditive) {
  std::mt19937_64 rng(5);
  auto z2 = Group::free_abelian(2);
  auto seq = grid_sequence(z2, {2, 3});
  for (int i = 0; i < 5; ++i) {
    auto m1 = ModulePresentation::cokernel(random_matrix(z2, 1, 2, rng));
    auto m2 = ModulePresentation::cokernel(random_matrix(z2, 2, 1, rng));
    auto sum = vrk_approximants(direct_sum(m1, m2), seq);
    auto a = vrk_approximants(m1, seq), b = vrk_approximants(m2, seq);
    for (std::size_t k = 0; k < seq.size(); ++k)
      EXPECT_EQ(sum.points[k].value, a.points[k].value + b.points[k].value);
  }
}

TEST(Mrk, MatchesBettiAndEulerIdentityHolds) {
  std::mt19937_64 rng(6);
  auto z2 = Group::free_abelian(2);
  auto seq = grid_sequence(z2, {2, 3});
  auto c = koszul(z2);
  for (std::size_t j = 0; j <= 2; ++j) {
    auto m = mrk_j_approximants(c, seq, j), b = betti_approximants(c, seq, j);
    for (std::size_t k = 0; k < seq.size(); ++k) EXPECT_EQ(m.points[k].value, b.points[k].value);
  }
  EXPECT_EQ(euler_characteristic(c), 0);
  for (auto& r : euler_identity_check(c, seq)) EXPECT_EQ(r.residual, 0);

  auto f2 = Group::free(2);
  EXPECT_EQ(euler_characteristic(f2_complex(f2)), -1);
  for (auto& r : euler_identity_check(f2_complex(f2), sanov_sequence(f2, {3, 5})))
    EXPECT_EQ(r.residual, 0);
  auto random = build_complex({3, 2}, {random_matrix(f2, 3, 2, rng)});
  for (auto& r : euler_identity_check(random, sanov_sequence(f2, {3}))) EXPECT_EQ(r.residual, 0);
}

TEST(Betti, DirectSumOfComplexesIsAdditive) {
  auto z2 = Group::free_abelian(2);
  auto seq = grid_sequence(z2, {3});
  auto k = koszul(z2);
  auto s = ChainComplex::direct_sum(k, k);
  for (std::size_t j = 0; j <= 2; ++j)
    EXPECT_EQ(betti_approximants(s, seq, j).points[0].value,
              2 * betti_approximants(k, seq, j).points[0].value);
}

TEST(Juzvinskii, Examples) {
  auto f2 = Group::free(2);
  auto d1 = RingMatrix::parse({{"a - 1"}, {"b - 1"}}, f2);
  auto s = juzvinskii_defect(d1, std::nullopt, sanov_sequence(f2, {3, 5}));
  EXPECT_EQ(s.points[0].value, Q(25, 24));
  EXPECT_EQ(s.points[1].value, Q(121, 120));

  auto z = Group::free_abelian(1);
  auto seq = grid_sequence(z, {3, 7});
  for (auto& p : juzvinskii_defect(RingMatrix::parse({{"t - 2"}}, z), std::nullopt, seq).points)
    EXPECT_EQ(p.value, 0);
  for (auto& p : juzvinskii_defect(RingMatrix::parse({{"t - 1"}}, z), std::nullopt, seq).points)
    EXPECT_EQ(p.value, Q(1, static_cast<long>(p.degree)));

  EXPECT_THROW(juzvinskii_defect(RingMatrix::parse({{"t - 1"}}, z), RingMatrix::parse({{"1"}}, z), seq),
               InvalidArgument);
  // Koszul: the image of d2 lies in ker d1
  auto z2 = Group::free_abelian(2);
  auto k = koszul(z2);
  auto with_kernel = juzvinskii_defect(k.differential(1), k.differential(2), grid_sequence(z2, {3}));
  EXPECT_EQ(with_kernel.points[0].value, Q(2, 9));
}

TEST(MeanRank, CyclicOfOrderTwoExamples) {
  auto g = Group::finite(FiniteTable::cyclic(2));
  auto q = regular_quotient(g);
  auto m = ModulePresentation::free(g, 1);
  auto basis = FiniteSubgroupSpec::standard_basis(g, 1);
  auto t = g->generator(1);
  auto r = literal_mean_rank(m, basis, basis, {t}, q);
  EXPECT_EQ(r.value, 1);
  EXPECT_FALSE(r.heuristic);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(mean_rank_oracle(m, basis, basis, {t}, q), 1);

  EXPECT_EQ(literal_mean_rank(m, basis, basis, g->elements(), q).value, 1);
  FiniteSubgroupSpec zero{{{RingElement(g)}}};
  EXPECT_EQ(literal_mean_rank(m, zero, zero, {t}, q).value, 0);
}

TEST(MeanRank, TinyCaseAgreesWithExhaustiveMinors) {
  // two copies of C2 acting trivially on a degree 1 stage: 2 x 4 sized matrices
  auto g = Group::finite(FiniteTable::cyclic(2));
  auto q = regular_quotient(g);
  auto m = ModulePresentation::cokernel(RingMatrix::parse({{"1 - g2"}}, g));
  auto basis = FiniteSubgroupSpec::standard_basis(g, 1);
  // rank of [A; R] minus rank of R via largest nonzero minors of dense blocks
  oracle::QMatrix rel, both;
  const mpq_class one = 1;
  // columns (v, h): relations (1 - g)h translated at both v, plus the B rows
  for (std::size_t v = 0; v < 2; ++v)
    for (std::size_t h = 0; h < 2; ++h) {
      std::vector<mpq_class> row(4);
      row[v * 2 + h] += one;
      row[v * 2 + (1 - h)] -= one;
      rel.push_back(row);
    }
  for (std::size_t v = 0; v < 2; ++v) {
    std::vector<mpq_class> row(4);
    row[v * 2] += one;
    row[(1 - v) * 2 + 1] -= one;
    rel.push_back(row);
  }
  both = rel;
  for (std::size_t v = 0; v < 2; ++v) {
    std::vector<mpq_class> row(4);
    row[v * 2] = one;
    both.push_back(row);
  }
  const auto expected = Q(static_cast<long>(oracle::largest_nonzero_minor(both)) -
                              static_cast<long>(oracle::largest_nonzero_minor(rel)),
                          2);
  EXPECT_EQ(literal_mean_rank(m, basis, basis, {g->generator(1)}, q).value, expected);
  EXPECT_EQ(expected, Q(1, 2));
}

TEST(MeanRank, MatchesDefinitionOracleOnFiniteGroups) {
  std::mt19937_64 rng(21);
  for (auto g : {Group::finite(FiniteTable::cyclic(4)), s3_group()}) {
    auto q = regular_quotient(g);
    auto elements = g->elements();
    for (int i = 0; i < 6; ++i) {
      auto m = ModulePresentation::cokernel(random_matrix(g, 1, 2, rng));
      FiniteSubgroupSpec a{{{oracle::random_element(g, rng, 2), oracle::random_element(g, rng, 2)}}};
      FiniteSubgroupSpec b = FiniteSubgroupSpec::standard_basis(g, 2);
      std::vector<GroupElement> f{elements[1 + rng() % (elements.size() - 1)]};
      EXPECT_EQ(literal_mean_rank(m, a, b, f, q).value, mean_rank_oracle(m, a, b, f, q));
    }
  }
}

TEST(MeanRank, FullTranslationSetRecoversVrk) {
  std::mt19937_64 rng(22);
  for (auto g : {Group::finite(FiniteTable::cyclic(4)), s3_group()}) {
    auto q = regular_quotient(g);
    auto basis = FiniteSubgroupSpec::standard_basis(g, 2);
    for (int i = 0; i < 4; ++i) {
      auto m = ModulePresentation::cokernel(random_matrix(g, 1, 2, rng));
      EXPECT_EQ(literal_mean_rank(m, basis, basis, g->elements(), q).value,
                vrk_approximants(m, regular_sequence(g)).points[0].value);
    }
  }
}

TEST(MeanRank, DirectSumIsAdditive) {
  std::mt19937_64 rng(23);
  auto g = Group::finite(FiniteTable::cyclic(4));
  auto q = regular_quotient(g);
  auto elements = g->elements();
  for (int i = 0; i < 4; ++i) {
    auto m1 = ModulePresentation::cokernel(random_matrix(g, 1, 1, rng));
    auto m2 = ModulePresentation::cokernel(random_matrix(g, 1, 2, rng));
    auto a1 = FiniteSubgroupSpec::standard_basis(g, 1), a2 = FiniteSubgroupSpec::standard_basis(g, 2);
    std::vector<GroupElement> f{elements[1], elements[2]};
    auto whole = literal_mean_rank(direct_sum(m1, m2), direct_sum(a1, 1, a2, 2, g),
                                   direct_sum(a1, 1, a2, 2, g), f, q);
    EXPECT_EQ(whole.value, literal_mean_rank(m1, a1, a1, f, q).value +
                               literal_mean_rank(m2, a2, a2, f, q).value);
  }
}

TEST(MeanRank, InfiniteGroupsNeedAWindow) {
  auto z = Group::free_abelian(1);
  auto q = grid_quotient(z, 4);
  auto m = ModulePresentation::cokernel(RingMatrix::parse({{"t - 2"}}, z));
  auto basis = FiniteSubgroupSpec::standard_basis(z, 1);
  EXPECT_THROW(literal_mean_rank(m, basis, basis, {z->generator(0)}, q), InvalidArgument);
  auto r = literal_mean_rank(m, basis, basis, {z->generator(0)}, q, 2);
  EXPECT_TRUE(r.heuristic);
  EXPECT_EQ(r.degree, 4u);
  EXPECT_GE(r.value, 0);
  EXPECT_LE(r.value, 1);
  PipelineOptions tiny;
  tiny.size_cap = 4;
  EXPECT_THROW(literal_mean_rank(m, basis, basis, {z->generator(0)}, q, 2, tiny), ResourceExhausted);
}

TEST(Csv, WritesExactRationals) {
  ApproximantSeries s{"betti_1", {{24, Q(25, 24), true}, {120, Q(121, 120), false}}, true};
  std::ostringstream out;
  write_csv(out, {s});
  EXPECT_EQ(out.str(),
            "invariant_label,degree,value_num,value_den,certified\n"
            "betti_1,24,25,24,true\n"
            "betti_1,120,121,120,false\n");
  EXPECT_FALSE(s.certified());
}

TEST(ModulePresentation, Validation) {
  auto f2 = Group::free(2);
  EXPECT_THROW(ModulePresentation::free(f2, 0).validate(), InvalidArgument);
  ModulePresentation bad{f2, 2, RingMatrix::parse({{"a"}}, f2)};
  EXPECT_THROW(bad.validate(), InvalidArgument);
  ModulePresentation foreign{f2, 1, RingMatrix::parse({{"t"}}, Group::free_abelian(1))};
  EXPECT_THROW(foreign.validate(), FamilyMismatch);
}
