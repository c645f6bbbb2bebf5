#include "l2approx/invariants.hpp"

#include <future>
#include <ostream>
#include <unordered_map>

#include "l2approx/error.hpp"

namespace l2approx {

namespace {

std::launch launch_policy(const PipelineOptions& opts) {
  return opts.parallel ? std::launch::async : std::launch::deferred;
}

void require_genuine(const QuotientSequence& q) {
  for (auto& stage : q.stages())
    if (!stage.genuine())
      throw NotGenuine("homology pipelines need genuine quotients; '" + stage.label() +
                       "' is heuristic");
}

// Runs f(stage) for every stage, possibly concurrently, in stage order.
template <class F>
auto per_stage(const QuotientSequence& q, const PipelineOptions& opts, F f) {
  using R = decltype(f(q.stages().front()));
  std::vector<std::future<R>> jobs;
  for (auto& stage : q.stages())
    jobs.push_back(std::async(launch_policy(opts), [&f, &stage] { return f(stage); }));
  std::vector<R> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

RankResult matrix_rank(const RingMatrix& m, const FiniteQuotient& q, const PipelineOptions& opts) {
  return rank_over_rationals(linearize(m, q, opts.size_cap), opts.policy);
}

RankResult no_rank() {
  RankResult r;
  r.certified = true;
  return r;
}

// Ranks of L(d_1), ..., L(d_top) at one stage; index j-1 holds d_j.
std::vector<RankResult> complex_ranks(const ChainComplex& c, const FiniteQuotient& q,
                                      const PipelineOptions& opts) {
  std::vector<std::future<RankResult>> jobs;
  for (std::size_t j = 1; j <= c.top_degree(); ++j)
    jobs.push_back(std::async(launch_policy(opts), [&, j] {
      return matrix_rank(c.differential(j), q, opts);
    }));
  std::vector<RankResult> out;
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

struct StageValue {
  mpq_class value;
  bool certified;
};

StageValue betti_at(const ChainComplex& c, const FiniteQuotient& q, std::size_t j,
                    const PipelineOptions& opts) {
  const std::size_t d = q.degree();
  auto lower = std::async(launch_policy(opts), [&] {
    return c.has_differential(j) ? matrix_rank(c.differential(j), q, opts) : no_rank();
  });
  RankResult upper =
      c.has_differential(j + 1) ? matrix_rank(c.differential(j + 1), q, opts) : no_rank();
  RankResult low = lower.get();
  mpq_class v(mpz_class(c.rank(j) * d) - low.rank - upper.rank, d);
  v.canonicalize();
  return {v, low.certified && upper.certified};
}

// vrk at one stage; returns the value times d as an integer together with
// certification.
std::pair<mpz_class, bool> vrk_numerator(const ModulePresentation& m, const FiniteQuotient& q,
                                         const PipelineOptions& opts) {
  mpz_class n = mpz_class(m.free_rank * q.degree());
  if (!m.relations) return {n, true};
  auto r = matrix_rank(*m.relations, q, opts);
  return {n - r.rank, r.certified};
}

ApproximantSeries make_series(std::string label, const QuotientSequence& q,
                              const std::vector<StageValue>& values) {
  ApproximantSeries s;
  s.invariant_label = std::move(label);
  s.chain = q.chain();
  for (std::size_t i = 0; i < values.size(); ++i)
    s.points.push_back({q.stages()[i].degree(), values[i].value, values[i].certified});
  return s;
}

void check_degree(const ChainComplex& c, std::size_t j) {
  if (j > c.top_degree())
    throw InvalidArgument("degree " + std::to_string(j) + " exceeds the top degree " +
                          std::to_string(c.top_degree()));
}

RingElement zero(const GroupPtr& g) { return RingElement(g); }

}  // namespace

bool ApproximantSeries::certified() const {
  for (auto& p : points)
    if (!p.certified) return false;
  return true;
}

void write_csv(std::ostream& out, const std::vector<ApproximantSeries>& series) {
  out << "invariant_label,degree,value_num,value_den,certified\n";
  for (auto& s : series)
    for (auto& p : s.points)
      out << s.invariant_label << ',' << p.degree << ',' << p.value.get_num().get_str() << ','
          << p.value.get_den().get_str() << ',' << (p.certified ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------------------
// presentations

ModulePresentation ModulePresentation::free(GroupPtr group, std::size_t rank) {
  ModulePresentation m{std::move(group), rank, std::nullopt};
  m.validate();
  return m;
}

ModulePresentation ModulePresentation::cokernel(RingMatrix relations) {
  ModulePresentation m{relations.group(), relations.cols(), std::move(relations)};
  m.validate();
  return m;
}

void ModulePresentation::validate() const {
  if (!group) throw InvalidArgument("module presentation without a group");
  if (free_rank == 0) throw InvalidArgument("module presentation of free rank 0");
  if (relations) {
    require_same_group(group, relations->group());
    if (relations->cols() != free_rank)
      throw InvalidArgument("relation matrix has " + std::to_string(relations->cols()) +
                            " columns, expected " + std::to_string(free_rank));
  }
}

ModulePresentation ModulePresentation::with_relations(const RingMatrix& extra) const {
  validate();
  require_same_group(group, extra.group());
  if (extra.cols() != free_rank)
    throw InvalidArgument("extra relations have the wrong number of columns");
  ModulePresentation out = *this;
  out.relations = relations ? RingMatrix::stack(*relations, extra) : extra;
  return out;
}

ModulePresentation direct_sum(const ModulePresentation& a, const ModulePresentation& b) {
  a.validate();
  b.validate();
  require_same_group(a.group, b.group);
  ModulePresentation out{a.group, a.free_rank + b.free_rank, std::nullopt};
  auto pad = [&](const RingMatrix& r, std::size_t before) {
    RingMatrix m(a.group, r.rows(), out.free_rank);
    for (std::size_t i = 0; i < r.rows(); ++i)
      for (std::size_t k = 0; k < r.cols(); ++k) m.set(i, before + k, r(i, k));
    return m;
  };
  if (a.relations) out.relations = pad(*a.relations, 0);
  if (b.relations) {
    auto rb = pad(*b.relations, a.free_rank);
    out.relations = out.relations ? RingMatrix::stack(*out.relations, rb) : rb;
  }
  return out;
}

FiniteSubgroupSpec FiniteSubgroupSpec::standard_basis(const GroupPtr& group, std::size_t n) {
  FiniteSubgroupSpec s;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<RingElement> row(n, zero(group));
    row[i] = RingElement::integer(group, 1);
    s.generators.push_back(std::move(row));
  }
  return s;
}

std::optional<RingMatrix> FiniteSubgroupSpec::as_matrix(const GroupPtr& group,
                                                        std::size_t n) const {
  if (generators.empty()) return std::nullopt;
  for (auto& g : generators) {
    if (g.size() != n)
      throw InvalidArgument("generator of length " + std::to_string(g.size()) +
                            " in a module of rank " + std::to_string(n));
    for (auto& e : g) require_same_group(group, e.group());
  }
  return RingMatrix(group, generators);
}

FiniteSubgroupSpec direct_sum(const FiniteSubgroupSpec& a, std::size_t rank_a,
                              const FiniteSubgroupSpec& b, std::size_t rank_b,
                              const GroupPtr& group) {
  FiniteSubgroupSpec out;
  for (auto& g : a.generators) {
    std::vector<RingElement> row(g);
    row.resize(rank_a + rank_b, zero(group));
    out.generators.push_back(std::move(row));
  }
  for (auto& g : b.generators) {
    std::vector<RingElement> row(rank_a, zero(group));
    row.insert(row.end(), g.begin(), g.end());
    out.generators.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// pipelines

ApproximantSeries betti_approximants(const ChainComplex& c, const QuotientSequence& q,
                                     std::size_t j, const PipelineOptions& opts) {
  check_degree(c, j);
  require_same_group(c.group(), q.group());
  require_genuine(q);
  auto values = per_stage(q, opts, [&](const FiniteQuotient& s) { return betti_at(c, s, j, opts); });
  return make_series("betti_" + std::to_string(j), q, values);
}

ApproximantSeries vrk_approximants(const ModulePresentation& m, const QuotientSequence& q,
                                   const PipelineOptions& opts) {
  m.validate();
  require_same_group(m.group, q.group());
  require_genuine(q);
  auto values = per_stage(q, opts, [&](const FiniteQuotient& s) {
    auto [num, cert] = vrk_numerator(m, s, opts);
    mpq_class v(num, s.degree());
    v.canonicalize();
    return StageValue{v, cert};
  });
  return make_series("vrk", q, values);
}

ApproximantSeries relative_vrk_approximants(const ModulePresentation& m2,
                                            const FiniteSubgroupSpec& m1,
                                            const QuotientSequence& q,
                                            const PipelineOptions& opts) {
  m2.validate();
  require_same_group(m2.group, q.group());
  require_genuine(q);
  auto extra = m1.as_matrix(m2.group, m2.free_rank);
  const ModulePresentation quotient = extra ? m2.with_relations(*extra) : m2;
  auto values = per_stage(q, opts, [&](const FiniteQuotient& s) {
    auto whole = std::async(launch_policy(opts), [&] { return vrk_numerator(m2, s, opts); });
    auto part = vrk_numerator(quotient, s, opts);
    auto total = whole.get();
    mpq_class v(total.first - part.first, s.degree());
    v.canonicalize();
    return StageValue{v, total.second && part.second};
  });
  return make_series("relative_vrk", q, values);
}

ApproximantSeries mrk_j_approximants(const ChainComplex& c, const QuotientSequence& q,
                                     std::size_t j, const PipelineOptions& opts) {
  check_degree(c, j);
  require_same_group(c.group(), q.group());
  require_genuine(q);
  const auto& g = c.group();
  ModulePresentation top{g, c.rank(j), std::nullopt};
  if (c.has_differential(j + 1)) top.relations = c.differential(j + 1);
  std::optional<ModulePresentation> bottom;
  if (j >= 1) bottom = ModulePresentation{g, c.rank(j - 1), c.differential(j)};

  auto values = per_stage(q, opts, [&](const FiniteQuotient& s) {
    const std::size_t d = s.degree();
    auto [top_num, top_cert] = vrk_numerator(top, s, opts);
    mpz_class image_num = 0;
    bool image_cert = true;
    if (bottom) {
      auto [bottom_num, bottom_cert] = vrk_numerator(*bottom, s, opts);
      image_num = mpz_class(bottom->free_rank * d) - bottom_num;
      image_cert = bottom_cert;
    }
    mpq_class v(top_num - image_num, d);
    v.canonicalize();
    return StageValue{v, top_cert && image_cert};
  });
  auto series = make_series("mrk_" + std::to_string(j), q, values);

  auto check = betti_approximants(c, q, j, opts);
  for (std::size_t i = 0; i < series.points.size(); ++i)
    if (series.points[i].value != check.points[i].value)
      throw InternalError("mrk_" + std::to_string(j) + " disagrees with betti_" +
                          std::to_string(j) + " at degree " +
                          std::to_string(series.points[i].degree) + ": " +
                          series.points[i].value.get_str() + " vs " +
                          check.points[i].value.get_str());
  return series;
}

std::int64_t euler_characteristic(const ChainComplex& c) {
  std::int64_t chi = 0;
  for (std::size_t j = 0; j <= c.top_degree(); ++j) {
    const auto n = static_cast<std::int64_t>(c.rank(j));
    chi += (j % 2 == 0) ? n : -n;
  }
  return chi;
}

std::vector<EulerResidual> euler_identity_check(const ChainComplex& c,
                                                const QuotientSequence& q,
                                                const PipelineOptions& opts) {
  require_same_group(c.group(), q.group());
  require_genuine(q);
  const std::int64_t chi = euler_characteristic(c);
  return per_stage(q, opts, [&](const FiniteQuotient& s) {
    const std::size_t d = s.degree();
    auto ranks = complex_ranks(c, s, opts);
    auto rank_of = [&](std::size_t j) -> std::size_t {
      return c.has_differential(j) ? ranks[j - 1].rank : 0;
    };
    mpq_class sum = 0;
    bool cert = true;
    for (auto& r : ranks) cert = cert && r.certified;
    for (std::size_t j = 0; j <= c.top_degree(); ++j) {
      mpq_class b(mpz_class(c.rank(j) * d) - rank_of(j) - rank_of(j + 1), d);
      b.canonicalize();
      if (j % 2 == 0) sum += b;
      else sum -= b;
    }
    return EulerResidual{d, sum - chi, cert};
  });
}

ApproximantSeries juzvinskii_defect(const RingMatrix& d1, const std::optional<RingMatrix>& kernel,
                                    const QuotientSequence& q, const PipelineOptions& opts) {
  require_same_group(d1.group(), q.group());
  require_genuine(q);
  ModulePresentation source{d1.group(), d1.rows(), std::nullopt};
  if (kernel) {
    require_same_group(d1.group(), kernel->group());
    if (kernel->cols() != d1.rows())
      throw InvalidArgument("kernel rows must have length " + std::to_string(d1.rows()));
    if (!matrix_mul(*kernel, d1).is_zero())
      throw InvalidArgument("kernel rows are not annihilated by the differential");
    source.relations = *kernel;
  }
  const ModulePresentation target = ModulePresentation::cokernel(d1);
  auto values = per_stage(q, opts, [&](const FiniteQuotient& s) {
    const std::size_t d = s.degree();
    auto kernel_part = std::async(launch_policy(opts), [&] { return vrk_numerator(source, s, opts); });
    auto [coker_num, coker_cert] = vrk_numerator(target, s, opts);
    auto [ker_num, ker_cert] = kernel_part.get();
    const mpz_class image_num = mpz_class(target.free_rank * d) - coker_num;
    mpq_class v(ker_num - image_num, d);
    v.canonicalize();
    return StageValue{v, ker_cert && coker_cert};
  });
  return make_series("juzvinskii_defect", q, values);
}

// ---------------------------------------------------------------------------
// finite-group oracle

namespace {

// Matrix of x -> x f on Z[G]^m, basis (block, group index).
std::vector<std::vector<mpz_class>> right_regular_matrix(const RingMatrix& f,
                                                         const FiniteTable& table) {
  const std::size_t g = table.order();
  std::vector<std::vector<mpz_class>> out(f.rows() * g, std::vector<mpz_class>(f.cols() * g));
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t k = 0; k < f.cols(); ++k)
      for (auto& [s, c] : f(i, k).terms())
        for (std::uint32_t x = 0; x < g; ++x)
          out[i * g + x][k * g + table.product(x, s.index())] += c;
  return out;
}

}  // namespace

std::vector<mpq_class> finite_group_exact_betti(const ChainComplex& c) {
  if (!c.group()->is_finite())
    throw FamilyMismatch("the exact oracle needs a finite group, got " + c.group()->describe());
  const auto& table = c.group()->table();
  const std::size_t g = table.order();
  std::vector<std::size_t> ranks(c.top_degree() + 2, 0);
  for (std::size_t j = 1; j <= c.top_degree(); ++j)
    ranks[j] = bareiss_rank(right_regular_matrix(c.differential(j), table));
  std::vector<mpq_class> out;
  for (std::size_t j = 0; j <= c.top_degree(); ++j) {
    mpq_class b(mpz_class(c.rank(j) * g) - ranks[j] - ranks[j + 1], g);
    b.canonicalize();
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// literal mean rank

MeanRankResult literal_mean_rank(const ModulePresentation& m, const FiniteSubgroupSpec& a,
                                 const FiniteSubgroupSpec& b,
                                 const std::vector<GroupElement>& f, const FiniteQuotient& q,
                                 std::optional<std::size_t> window_radius,
                                 const PipelineOptions& opts) {
  m.validate();
  const auto& group = m.group;
  require_same_group(group, q.group());
  const bool finite = group->is_finite();
  if (!finite && !window_radius)
    throw InvalidArgument("literal mean rank over an infinite group needs a window radius");

  const std::vector<GroupElement> window =
      finite ? group->elements() : group->ball(*window_radius);
  std::unordered_map<GroupElement, std::uint32_t> position;
  for (std::uint32_t i = 0; i < window.size(); ++i) position.emplace(window[i], i);

  const std::size_t n = m.free_rank, d = q.degree(), w = window.size();
  const std::size_t columns = d * w * n;
  if (columns > opts.size_cap)
    throw ResourceExhausted("literal mean rank needs " + std::to_string(columns) +
                            " columns, above the size cap " + std::to_string(opts.size_cap));

  auto column = [&](std::size_t v, std::uint32_t h, std::size_t k) {
    return static_cast<std::uint32_t>((v * w + h) * n + k);
  };
  auto fits = [&](const std::vector<RingElement>& vec) {
    for (auto& e : vec)
      for (auto& [g, c] : e.terms())
        if (!position.count(g)) return false;
    return true;
  };
  // adds delta_v (x) sign * vec to `row`
  auto emit = [&](std::vector<Triplet>& t, std::uint32_t row, std::size_t v,
                  const std::vector<RingElement>& vec, int sign) {
    for (std::size_t k = 0; k < n; ++k)
      for (auto& [g, c] : vec[k].terms())
        t.push_back({row, column(v, position.at(g), k), sign > 0 ? c : mpz_class(-c)});
  };
  auto translate = [&](const std::vector<RingElement>& vec, const GroupElement& s) {
    std::vector<RingElement> out;
    for (auto& e : vec) out.push_back(e.translated(s));
    return out;
  };
  auto check_spec = [&](const FiniteSubgroupSpec& spec, const char* name) {
    spec.as_matrix(group, n);
    for (auto& gvec : spec.generators)
      if (!fits(gvec))
        throw InvalidArgument(std::string(name) + " has support outside the window");
  };
  check_spec(a, "A");
  check_spec(b, "B");
  for (auto& s : f) group->check(s);

  std::vector<Triplet> rel;
  std::uint32_t rel_rows = 0;
  if (m.relations) {
    for (std::size_t i = 0; i < m.relations->rows(); ++i) {
      std::vector<RingElement> row;
      for (std::size_t k = 0; k < n; ++k) row.push_back((*m.relations)(i, k));
      for (auto& h : window) {
        auto moved = translate(row, h);
        if (!fits(moved)) continue;
        for (std::size_t v = 0; v < d; ++v) emit(rel, rel_rows++, v, moved, +1);
      }
    }
  }
  for (auto& s : f) {
    const Permutation p = q.image(s);
    for (auto& gvec : b.generators) {
      auto moved = translate(gvec, s);
      if (!fits(moved)) continue;
      for (std::size_t v = 0; v < d; ++v) {
        emit(rel, rel_rows, v, gvec, +1);
        emit(rel, rel_rows, p(static_cast<std::uint32_t>(v)), moved, -1);
        ++rel_rows;
      }
    }
  }
  std::vector<Triplet> gen;
  std::uint32_t gen_rows = 0;
  for (auto& gvec : a.generators)
    for (std::size_t v = 0; v < d; ++v) emit(gen, gen_rows++, v, gvec, +1);

  const SparseIntMatrix relations(rel_rows, columns, rel);
  const SparseIntMatrix both =
      SparseIntMatrix::stack(SparseIntMatrix(gen_rows, columns, std::move(gen)), relations);
  auto full = std::async(launch_policy(opts), [&] { return rank_over_rationals(both, opts.policy); });
  const RankResult r = rank_over_rationals(relations, opts.policy);
  const RankResult rf = full.get();
  mpq_class value(mpz_class(rf.rank) - r.rank, d);
  value.canonicalize();
  return {value, d, rf.certified && r.certified, !finite};
}

// ---------------------------------------------------------------------------
// diagnostics

StageDiagnostics stage_diagnostics(const ChainComplex& c, const FiniteQuotient& q,
                                   std::size_t j, const PipelineOptions& opts) {
  check_degree(c, j);
  require_same_group(c.group(), q.group());
  std::optional<SparseIntMatrix> lower, upper;
  if (c.has_differential(j)) lower = linearize(c.differential(j), q, opts.size_cap);
  if (c.has_differential(j + 1)) upper = linearize(c.differential(j + 1), q, opts.size_cap);
  StageDiagnostics out{q.degree(), 0, 0, false, true};
  if (lower) {
    auto r = rank_over_rationals(*lower, opts.policy);
    out.rank_j = r.rank;
    out.certified = out.certified && r.certified;
  }
  if (upper) {
    auto r = rank_over_rationals(*upper, opts.policy);
    out.rank_j_plus_1 = r.rank;
    out.certified = out.certified && r.certified;
  }
  if (lower && upper) out.composite_nonzero = !multiply(*upper, *lower).is_zero();
  return out;
}

}  // namespace l2approx
