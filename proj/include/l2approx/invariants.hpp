#pragma once

// Finite-stage approximants of L2-invariants: Betti numbers, von
// Neumann-Lueck rank (absolute and relative), mrk_j, Euler characteristic,
// Juzvinskii defects, the literal mean-rank density, and an exact oracle for
// finite groups.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "l2approx/exact_rank.hpp"
#include "l2approx/group.hpp"
#include "l2approx/group_ring.hpp"
#include "l2approx/linearize.hpp"

namespace l2approx {

struct ApproximantPoint {
  std::size_t degree;
  mpq_class value;
  bool certified;
};

struct ApproximantSeries {
  std::string invariant_label;
  std::vector<ApproximantPoint> points;  // degrees strictly increasing
  bool chain = false;

  bool certified() const;
};

// Header invariant_label,degree,value_num,value_den,certified then one row
// per point.
void write_csv(std::ostream& out, const std::vector<ApproximantSeries>& series);

// The module (ZG)^{1 x n} / (ZG)^{1 x r} R. No relations means free.
struct ModulePresentation {
  GroupPtr group;
  std::size_t free_rank = 0;
  std::optional<RingMatrix> relations;

  static ModulePresentation free(GroupPtr group, std::size_t rank);
  static ModulePresentation cokernel(RingMatrix relations);

  // Throws InvalidArgument on inconsistent shapes, FamilyMismatch on a
  // foreign group.
  void validate() const;
  // Appends rows to the relation matrix.
  ModulePresentation with_relations(const RingMatrix& extra) const;
};

ModulePresentation direct_sum(const ModulePresentation& a, const ModulePresentation& b);

// Finitely many elements of (ZG)^{1 x n}, each a length-n row.
struct FiniteSubgroupSpec {
  std::vector<std::vector<RingElement>> generators;

  static FiniteSubgroupSpec standard_basis(const GroupPtr& group, std::size_t n);
  // Generators as the rows of a matrix; empty when there are none.
  std::optional<RingMatrix> as_matrix(const GroupPtr& group, std::size_t n) const;
};

// Generators of a in the first block, generators of b in the second.
FiniteSubgroupSpec direct_sum(const FiniteSubgroupSpec& a, std::size_t rank_a,
                              const FiniteSubgroupSpec& b, std::size_t rank_b,
                              const GroupPtr& group);

struct PipelineOptions {
  RankPolicy policy;
  std::size_t size_cap = default_size_cap;
  bool parallel = true;  // stages and paired ranks run concurrently
};

// (n_j d - rank L(d_j) - rank L(d_{j+1})) / d per stage. Throws NotGenuine
// for heuristic quotients and InvalidArgument when j > top degree.
ApproximantSeries betti_approximants(const ChainComplex& c, const QuotientSequence& q,
                                     std::size_t j, const PipelineOptions& opts = {});

// (n d - rank L(R)) / d per stage.
ApproximantSeries vrk_approximants(const ModulePresentation& m, const QuotientSequence& q,
                                   const PipelineOptions& opts = {});

// vrk(M2) - vrk(M2 / M1) per stage, M1 generated by `m1`.
ApproximantSeries relative_vrk_approximants(const ModulePresentation& m2,
                                            const FiniteSubgroupSpec& m1,
                                            const QuotientSequence& q,
                                            const PipelineOptions& opts = {});

// vrk(coker d_{j+1}) - (n_{j-1} - vrk(coker d_j)) per stage. Cross-checked
// against betti_approximants; a mismatch throws InternalError.
ApproximantSeries mrk_j_approximants(const ChainComplex& c, const QuotientSequence& q,
                                     std::size_t j, const PipelineOptions& opts = {});

std::int64_t euler_characteristic(const ChainComplex& c);

struct EulerResidual {
  std::size_t degree;
  mpq_class residual;
  bool certified;
};

// sum_j (-1)^j b_j(d) - chi at every stage.
std::vector<EulerResidual> euler_identity_check(const ChainComplex& c,
                                                const QuotientSequence& q,
                                                const PipelineOptions& opts = {});

// d1 : C_1 -> C_0 and optional rows K generating ker d1 (K * d1 must be 0).
// Per stage: vrk(C_1 / K) - (n_0 - vrk(coker d1)).
ApproximantSeries juzvinskii_defect(const RingMatrix& d1, const std::optional<RingMatrix>& kernel,
                                    const QuotientSequence& q, const PipelineOptions& opts = {});

// Exact L2-Betti numbers over a finite group, one per degree 0..top, from
// the right regular representation and dense fraction-free elimination.
std::vector<mpq_class> finite_group_exact_betti(const ChainComplex& c);

struct MeanRankResult {
  mpq_class value;
  std::size_t degree;
  bool certified;
  bool heuristic;  // true when a window truncation was used
};

// rank density of M(A, B, F, sigma) in M^d. Infinite groups need a window
// radius: supports are restricted to the ball of that radius and only
// relations supported inside it are imposed.
MeanRankResult literal_mean_rank(const ModulePresentation& m, const FiniteSubgroupSpec& a,
                                 const FiniteSubgroupSpec& b,
                                 const std::vector<GroupElement>& f, const FiniteQuotient& q,
                                 std::optional<std::size_t> window_radius = std::nullopt,
                                 const PipelineOptions& opts = {});

// Raw ranks for one stage that need not be genuine, plus whether
// L(d_{j+1}) L(d_j) is nonzero there.
struct StageDiagnostics {
  std::size_t degree;
  std::size_t rank_j;
  std::size_t rank_j_plus_1;
  bool composite_nonzero;
  bool certified;
};

StageDiagnostics stage_diagnostics(const ChainComplex& c, const FiniteQuotient& q,
                                   std::size_t j, const PipelineOptions& opts = {});

}  // namespace l2approx
