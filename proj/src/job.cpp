#include "l2approx/job.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace l2approx {

namespace {

using nlohmann::json;

struct Entry {
  json value;
  std::size_t line;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"group", {"family", "rank", "order", "names", "table"}},
      {"complex", {"ranks", "kernel"}},  // plus d1, d2, ...
      {"module", {"free_rank", "relations", "submodule", "a", "b", "f", "window"}},
      {"quotients", {"provider", "moduli", "degrees", "require_chain"}},
      {"run", {"pipeline", "j", "primes", "seed", "size_cap", "strict", "pairs"}},
  };
  return keys;
}

bool is_differential_key(const std::string& key) {
  if (key.size() < 2 || key[0] != 'd') return false;
  for (std::size_t i = 1; i < key.size(); ++i)
    if (key[i] < '0' || key[i] > '9') return false;
  return key[1] != '0';
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment; '#' inside a JSON string is kept.
std::string drop_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && quoted) {
      ++i;
    } else if (s[i] == '"') {
      quoted = !quoted;
    } else if (s[i] == '#' && !quoted) {
      return s.substr(0, i);
    }
  }
  return s;
}

int bracket_depth(const std::string& s) {
  int depth = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && quoted) ++i;
    else if (s[i] == '"') quoted = !quoted;
    else if (!quoted && (s[i] == '[' || s[i] == '{')) ++depth;
    else if (!quoted && (s[i] == ']' || s[i] == '}')) --depth;
  }
  return depth;
}

class Reader {
 public:
  Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(std::size_t line, const std::string& message) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + message);
  }

  std::map<std::string, Section> read(const std::string& text) {
    std::map<std::string, Section> sections;
    std::istringstream in(text);
    std::string raw, current;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = strip(drop_comment(raw));
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
        current = strip(line.substr(1, line.size() - 2));
        if (!known_keys().count(current)) fail(line_no, "unknown section [" + current + "]");
        if (sections.count(current)) fail(line_no, "duplicate section [" + current + "]");
        sections[current];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      if (current.empty()) fail(line_no, "entry outside of a section");
      const std::string key = strip(line.substr(0, eq));
      std::string value = strip(line.substr(eq + 1));
      const std::size_t start = line_no;
      while (bracket_depth(value) > 0 && std::getline(in, raw)) {
        ++line_no;
        value += ' ' + strip(drop_comment(raw));
      }
      const auto& allowed = known_keys().at(current);
      if (!allowed.count(key) && !(current == "complex" && is_differential_key(key)))
        fail(start, "unknown key '" + key + "' in [" + current + "]");
      if (sections[current].count(key)) fail(start, "duplicate key '" + key + "'");
      json parsed = json::parse(value, nullptr, false);
      if (parsed.is_discarded()) fail(start, "value of '" + key + "' is not valid JSON");
      sections[current][key] = {std::move(parsed), start};
    }
    return sections;
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

// Typed access to one section with line-tagged errors.
class SectionView {
 public:
  SectionView(const Reader& r, const Section* s, std::string name)
      : reader_(r), section_(s), name_(std::move(name)) {}

  bool present() const { return section_ != nullptr; }
  bool has(const std::string& key) const { return section_ && section_->count(key); }
  std::size_t line(const std::string& key) const {
    return has(key) ? section_->at(key).line : 0;
  }
  const Section& entries() const { return *section_; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    reader_.fail(line(key), message);
  }

  template <class T>
  T get(const std::string& key) const {
    if (!has(key)) reader_.fail(0, "missing key '" + key + "' in [" + name_ + "]");
    try {
      return section_->at(key).value.get<T>();
    } catch (const json::exception&) {
      fail(key, "'" + key + "' has the wrong type");
    }
  }

  template <class T>
  T get_or(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  template <class T>
  std::optional<T> maybe(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get<T>(key);
  }

 private:
  const Reader& reader_;
  const Section* section_;
  std::string name_;
};

GroupPtr build_group(const GroupConfig& g) {
  if (g.family == "free") return Group::free(g.rank, g.names);
  if (g.family == "free_abelian") return Group::free_abelian(g.rank, g.names);
  if (g.family == "cyclic") return Group::finite(FiniteTable::cyclic(g.rank), g.names);
  if (g.family == "symmetric") return Group::finite(FiniteTable::symmetric(g.rank), g.names);
  if (g.family == "table") {
    std::ifstream in(g.table);
    if (!in) throw InvalidArgument("cannot open table file " + g.table.string());
    return Group::finite(FiniteTable::read(in), g.names);
  }
  throw InvalidArgument("unknown group family '" + g.family + "'");
}

GroupElement parse_element(const std::string& text, const GroupPtr& group) {
  RingElement r = parse_ring_element(text, group);
  if (r.support_size() != 1 || r.terms().begin()->second != 1)
    throw InvalidArgument("'" + text + "' is not a group element");
  return r.terms().begin()->first;
}

RingMatrix build_matrix(const StringMatrix& texts, const GroupPtr& group) {
  return RingMatrix::parse(texts, group);
}

FiniteSubgroupSpec build_spec(const std::optional<StringMatrix>& rows, const GroupPtr& group) {
  FiniteSubgroupSpec spec;
  if (!rows) return spec;
  for (auto& row : *rows) {
    std::vector<RingElement> v;
    for (auto& t : row) v.push_back(parse_ring_element(t, group));
    spec.generators.push_back(std::move(v));
  }
  return spec;
}

ChainComplex build_chain_complex(const ComplexConfig& c, const GroupPtr& group) {
  std::vector<RingMatrix> top_down;
  for (auto it = c.differentials.rbegin(); it != c.differentials.rend(); ++it)
    top_down.push_back(build_matrix(*it, group));
  if (top_down.empty()) throw InvalidArgument("complex needs at least one differential");
  return build_complex(c.ranks, std::move(top_down));
}

ModulePresentation build_module(const ModuleConfig& m, const GroupPtr& group) {
  if (m.relations) return ModulePresentation::cokernel(build_matrix(*m.relations, group));
  return ModulePresentation::free(group, m.free_rank);
}

QuotientSequence build_quotients(const QuotientConfig& q, const GroupPtr& group,
                                 std::uint64_t seed) {
  if (q.provider == "grid") {
    std::vector<std::size_t> moduli(q.moduli.begin(), q.moduli.end());
    return grid_sequence(group, moduli, q.require_chain);
  }
  if (q.provider == "sanov") {
    std::vector<std::uint32_t> moduli;
    for (auto m : q.moduli) {
      if (m > 65535) throw InvalidArgument("sanov modulus " + std::to_string(m) + " too large");
      moduli.push_back(static_cast<std::uint32_t>(m));
    }
    return sanov_sequence(group, moduli, q.require_chain);
  }
  if (q.provider == "regular") return QuotientSequence({regular_quotient(group)}, true);
  if (q.provider == "random") {
    std::vector<FiniteQuotient> stages;
    for (std::size_t i = 0; i < q.moduli.size(); ++i)
      stages.push_back(random_quotient(group, q.moduli[i], seed + i));
    return QuotientSequence(std::move(stages), false);
  }
  throw InvalidArgument("unknown quotient provider '" + q.provider + "'");
}

std::string json_string(const std::string& s) { return json(s).dump(); }

std::string json_matrix(const StringMatrix& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t k = 0; k < m[i].size(); ++k) out += (k ? ", " : "") + json_string(m[i][k]);
    out += "]";
  }
  return out + "]";
}

template <class T>
std::string json_list(const std::vector<T>& v) {
  return json(v).dump();
}

StringMatrix canonical(const StringMatrix& m, const GroupPtr& group) {
  StringMatrix out;
  for (auto& row : m) {
    std::vector<std::string> r;
    for (auto& t : row) r.push_back(parse_ring_element(t, group).to_string());
    out.push_back(std::move(r));
  }
  return out;
}

std::string decimal(const mpq_class& q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", q.get_d());
  return buf;
}

void summarize(std::ostringstream& out, const ApproximantSeries& s) {
  out << s.invariant_label << (s.chain ? " (chain)" : "") << '\n';
  for (auto& p : s.points)
    out << "  d = " << p.degree << "  value = " << p.value.get_str() << "  ~ "
        << decimal(p.value) << (p.certified ? "" : "  [uncertified]") << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------

JobConfig parse_config(const std::string& text, const std::string& origin,
                       const std::filesystem::path& base_dir) {
  Reader reader(origin);
  const auto sections = reader.read(text);
  auto view = [&](const std::string& name) {
    auto it = sections.find(name);
    return SectionView(reader, it == sections.end() ? nullptr : &it->second, name);
  };

  JobConfig cfg;
  const auto group = view("group");
  if (!group.present()) reader.fail(0, "missing section [group]");
  cfg.group.family = group.get<std::string>("family");
  const std::string size_key =
      (cfg.group.family == "cyclic" || cfg.group.family == "symmetric") ? "order" : "rank";
  if (cfg.group.family != "table") cfg.group.rank = group.get<std::size_t>(size_key);
  cfg.group.names = group.get_or<std::vector<std::string>>("names", {});
  if (cfg.group.family == "table") {
    std::filesystem::path p = group.get<std::string>("table");
    cfg.group.table = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  GroupPtr g;
  try {
    g = build_group(cfg.group);
  } catch (const Error& e) {
    group.fail("family", e.what());
  }
  cfg.group.names = g->generator_names();
  if (cfg.group.family == "table")
    cfg.group.table = std::filesystem::absolute(cfg.group.table).lexically_normal();

  auto check_matrix = [&](const SectionView& s, const std::string& key) {
    auto m = s.get<StringMatrix>(key);
    try {
      return canonical(m, g);
    } catch (const Error& e) {
      s.fail(key, "in '" + key + "': " + e.what());
    }
  };

  if (const auto c = view("complex"); c.present()) {
    ComplexConfig cc;
    cc.ranks = c.get<std::vector<std::size_t>>("ranks");
    if (cc.ranks.empty()) c.fail("ranks", "'ranks' is empty");
    for (std::size_t j = 1; j < cc.ranks.size(); ++j) {
      const std::string key = "d" + std::to_string(j);
      if (!c.has(key)) c.fail("ranks", "missing differential " + key);
      cc.differentials.push_back(check_matrix(c, key));
    }
    for (auto& [key, entry] : c.entries())
      if (is_differential_key(key) && std::stoul(key.substr(1)) >= cc.ranks.size())
        reader.fail(entry.line, "differential " + key + " beyond the listed ranks");
    if (c.has("kernel")) cc.kernel = check_matrix(c, "kernel");
    try {
      build_chain_complex(cc, g);
    } catch (const Error& e) {
      c.fail("ranks", e.what());
    }
    cfg.complex = std::move(cc);
  }

  if (const auto m = view("module"); m.present()) {
    ModuleConfig mc;
    if (m.has("relations")) mc.relations = check_matrix(m, "relations");
    mc.free_rank = mc.relations && !mc.relations->empty() ? mc.relations->front().size()
                                                          : m.get<std::size_t>("free_rank");
    if (m.has("free_rank") && m.get<std::size_t>("free_rank") != mc.free_rank)
      m.fail("free_rank", "free_rank disagrees with the relation matrix");
    if (m.has("submodule")) mc.submodule = check_matrix(m, "submodule");
    if (m.has("a")) mc.a = check_matrix(m, "a");
    if (m.has("b")) mc.b = check_matrix(m, "b");
    for (auto& t : m.get_or<std::vector<std::string>>("f", {})) {
      try {
        mc.f.push_back(g->format(parse_element(t, g)));
      } catch (const Error& e) {
        m.fail("f", e.what());
      }
    }
    mc.window = m.maybe<std::size_t>("window");
    try {
      build_module(mc, g);
      for (auto* rows : {&mc.submodule, &mc.a, &mc.b})
        build_spec(*rows, g).as_matrix(g, mc.free_rank);
    } catch (const Error& e) {
      m.fail(m.has("relations") ? "relations" : "free_rank", e.what());
    }
    cfg.module = std::move(mc);
  }

  if (const auto q = view("quotients"); q.present()) {
    QuotientConfig qc;
    qc.provider = q.get<std::string>("provider");
    if (qc.provider == "random") qc.moduli = q.get<std::vector<std::uint64_t>>("degrees");
    else if (qc.provider != "regular") qc.moduli = q.get<std::vector<std::uint64_t>>("moduli");
    qc.require_chain = q.get_or<bool>("require_chain", false);
    const std::set<std::string> providers{"grid", "sanov", "regular", "random"};
    if (!providers.count(qc.provider))
      q.fail("provider", "unknown quotient provider '" + qc.provider + "'");
    if (qc.provider == "sanov")
      for (auto m : qc.moduli)
        if (m < 3 || m % 2 == 0 || m > 65535)
          q.fail("moduli", "sanov moduli must be odd and in [3, 65535], got " + std::to_string(m));
    if (qc.provider != "regular" && qc.moduli.empty())
      q.fail(qc.provider == "random" ? "degrees" : "moduli", "no stages listed");
    if (qc.require_chain && qc.provider != "regular")
      for (std::size_t i = 1; i < qc.moduli.size(); ++i)
        if (qc.moduli[i] % qc.moduli[i - 1] != 0)
          q.fail("moduli", std::to_string(qc.moduli[i - 1]) + " does not divide " +
                               std::to_string(qc.moduli[i]));
    cfg.quotients = std::move(qc);
  }

  const auto r = view("run");
  if (!r.present()) reader.fail(0, "missing section [run]");
  cfg.run.pipeline = r.get<std::string>("pipeline");
  const auto& names = pipeline_names();
  if (std::find(names.begin(), names.end(), cfg.run.pipeline) == names.end())
    r.fail("pipeline", "unknown pipeline '" + cfg.run.pipeline + "'");
  cfg.run.j = r.maybe<std::size_t>("j");
  cfg.run.primes = r.get_or<std::size_t>("primes", cfg.run.primes);
  cfg.run.seed = r.get_or<std::uint64_t>("seed", cfg.run.seed);
  cfg.run.size_cap = r.get_or<std::size_t>("size_cap", cfg.run.size_cap);
  cfg.run.strict = r.get_or<bool>("strict", false);
  for (auto& pair : r.get_or<StringMatrix>("pairs", {})) {
    if (pair.size() != 2) r.fail("pairs", "each pair needs two elements");
    try {
      cfg.run.pairs.emplace_back(g->format(parse_element(pair[0], g)),
                                 g->format(parse_element(pair[1], g)));
    } catch (const Error& e) {
      r.fail("pairs", e.what());
    }
  }
  if (cfg.run.primes == 0) r.fail("primes", "primes must be positive");
  return cfg;
}

JobConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), path.parent_path());
}

std::string normalized_config(const JobConfig& c) {
  std::ostringstream out;
  out << "[group]\nfamily = " << json_string(c.group.family) << '\n';
  if (c.group.family == "cyclic" || c.group.family == "symmetric")
    out << "order = " << c.group.rank << '\n';
  else if (c.group.family != "table")
    out << "rank = " << c.group.rank << '\n';
  else
    out << "table = " << json_string(c.group.table.string()) << '\n';
  out << "names = " << json_list(c.group.names) << '\n';
  if (c.complex) {
    out << "\n[complex]\nranks = " << json_list(c.complex->ranks) << '\n';
    for (std::size_t j = 0; j < c.complex->differentials.size(); ++j)
      out << 'd' << j + 1 << " = " << json_matrix(c.complex->differentials[j]) << '\n';
    if (c.complex->kernel) out << "kernel = " << json_matrix(*c.complex->kernel) << '\n';
  }
  if (c.module) {
    const auto& m = *c.module;
    out << "\n[module]\nfree_rank = " << m.free_rank << '\n';
    if (m.relations) out << "relations = " << json_matrix(*m.relations) << '\n';
    if (m.submodule) out << "submodule = " << json_matrix(*m.submodule) << '\n';
    if (m.a) out << "a = " << json_matrix(*m.a) << '\n';
    if (m.b) out << "b = " << json_matrix(*m.b) << '\n';
    if (!m.f.empty()) out << "f = " << json_list(m.f) << '\n';
    if (m.window) out << "window = " << *m.window << '\n';
  }
  if (c.quotients) {
    const auto& q = *c.quotients;
    out << "\n[quotients]\nprovider = " << json_string(q.provider) << '\n';
    if (q.provider == "random") out << "degrees = " << json_list(q.moduli) << '\n';
    else if (q.provider != "regular") out << "moduli = " << json_list(q.moduli) << '\n';
    out << "require_chain = " << (q.require_chain ? "true" : "false") << '\n';
  }
  out << "\n[run]\npipeline = " << json_string(c.run.pipeline) << '\n';
  if (c.run.j) out << "j = " << *c.run.j << '\n';
  out << "primes = " << c.run.primes << '\n'
      << "seed = " << c.run.seed << '\n'
      << "size_cap = " << c.run.size_cap << '\n'
      << "strict = " << (c.run.strict ? "true" : "false") << '\n';
  if (!c.run.pairs.empty()) {
    StringMatrix pairs;
    for (auto& [s, t] : c.run.pairs) pairs.push_back({s, t});
    out << "pairs = " << json_matrix(pairs) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

JobResult run_job(const JobConfig& c, const JobOptions& options) {
  const GroupPtr g = build_group(c.group);
  PipelineOptions opts;
  opts.policy.primes = c.run.primes;
  opts.policy.seed ^= c.run.seed;
  opts.size_cap = c.run.size_cap;

  const std::string& pipeline = c.run.pipeline;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("pipeline " + pipeline + " needs " + what);
  };
  JobResult result;
  std::ostringstream summary;
  summary << "pipeline: " << pipeline << "\ngroup: " << g->describe() << '\n';

  std::optional<QuotientSequence> q;
  if (pipeline != "oracle") {
    need(c.quotients.has_value(), "a [quotients] section");
    q = build_quotients(*c.quotients, g, c.run.seed);
    summary << "quotients: " << c.quotients->provider << ", degrees";
    for (auto& s : q->stages()) summary << ' ' << s.degree();
    summary << (q->chain() ? " (chain)" : " (not a chain)") << '\n';
  }
  std::optional<ChainComplex> cx;
  if (c.complex) cx = build_chain_complex(*c.complex, g);
  auto degrees = [&]() {
    std::vector<std::size_t> js;
    if (c.run.j) js.push_back(*c.run.j);
    else
      for (std::size_t j = 0; j <= cx->top_degree(); ++j) js.push_back(j);
    return js;
  };
  auto dump = [&]() {
    if (!options.dump_matrices || !cx || !q || !q->stages().front().genuine()) return;
    for (auto& stage : q->stages())
      for (std::size_t j = 1; j <= cx->top_degree(); ++j) {
        auto path = options.out_dir /
                    ("matrix_d" + std::to_string(j) + "_" + std::to_string(stage.degree()) + ".mtx");
        std::ofstream out(path);
        write_matrix_market(out, linearize(cx->differential(j), stage, opts.size_cap));
      }
  };

  if (pipeline == "betti" || pipeline == "mrk_j") {
    need(cx.has_value(), "a [complex] section");
    const bool genuine = q->stages().front().genuine();
    if (pipeline == "betti" && !genuine) {
      // homology ranks are undefined; report the raw ranks instead
      summary << "heuristic quotients: reporting raw ranks and composite diagnostics\n";
      for (auto j : degrees()) {
        ApproximantSeries lo{"raw_rank_d" + std::to_string(j), {}, false};
        ApproximantSeries hi{"raw_rank_d" + std::to_string(j + 1), {}, false};
        ApproximantSeries comp{"composite_nonzero_" + std::to_string(j), {}, false};
        for (auto& stage : q->stages()) {
          auto diag = stage_diagnostics(*cx, stage, j, opts);
          lo.points.push_back({diag.degree, mpq_class(diag.rank_j), diag.certified});
          hi.points.push_back({diag.degree, mpq_class(diag.rank_j_plus_1), diag.certified});
          comp.points.push_back({diag.degree, mpq_class(diag.composite_nonzero ? 1 : 0), true});
        }
        result.series.push_back(std::move(lo));
        result.series.push_back(std::move(hi));
        result.series.push_back(std::move(comp));
      }
    } else {
      for (auto j : degrees())
        result.series.push_back(pipeline == "betti" ? betti_approximants(*cx, *q, j, opts)
                                                    : mrk_j_approximants(*cx, *q, j, opts));
    }
    dump();
  } else if (pipeline == "euler") {
    need(cx.has_value(), "a [complex] section");
    const auto chi = euler_characteristic(*cx);
    summary << "chi = " << chi << '\n';
    ApproximantSeries s{"euler_residual", {}, q->chain()};
    bool all_zero = true;
    for (auto& r : euler_identity_check(*cx, *q, opts)) {
      s.points.push_back({r.degree, r.residual, r.certified});
      all_zero = all_zero && r.residual == 0;
    }
    summary << (all_zero ? "per-stage residual 0\n" : "NONZERO residual\n");
    result.series.push_back(std::move(s));
    dump();
  } else if (pipeline == "vrk" || pipeline == "relative") {
    need(c.module.has_value(), "a [module] section");
    const auto m = build_module(*c.module, g);
    if (pipeline == "vrk") {
      result.series.push_back(vrk_approximants(m, *q, opts));
    } else {
      need(c.module->submodule.has_value(), "[module] submodule");
      result.series.push_back(
          relative_vrk_approximants(m, build_spec(c.module->submodule, g), *q, opts));
    }
  } else if (pipeline == "defect") {
    need(cx.has_value() && cx->top_degree() == 1, "a two-term [complex] with d1");
    std::optional<RingMatrix> kernel;
    if (c.complex->kernel) kernel = build_matrix(*c.complex->kernel, g);
    result.series.push_back(juzvinskii_defect(cx->differential(1), kernel, *q, opts));
  } else if (pipeline == "meanrank") {
    need(c.module.has_value(), "a [module] section");
    const auto m = build_module(*c.module, g);
    std::vector<GroupElement> f;
    for (auto& t : c.module->f) f.push_back(parse_element(t, g));
    ApproximantSeries s{"mean_rank", {}, q->chain()};
    bool heuristic = false;
    for (auto& stage : q->stages()) {
      auto r = literal_mean_rank(m, build_spec(c.module->a, g), build_spec(c.module->b, g), f,
                                 stage, c.module->window, opts);
      heuristic = heuristic || r.heuristic;
      s.points.push_back({r.degree, r.value, r.certified});
    }
    if (heuristic) summary << "window truncation in use: values are heuristic\n";
    result.series.push_back(std::move(s));
  } else if (pipeline == "soficity") {
    need(!c.run.pairs.empty(), "[run] pairs");
    std::vector<std::pair<GroupElement, GroupElement>> pairs;
    for (auto& [s, t] : c.run.pairs) pairs.emplace_back(parse_element(s, g), parse_element(t, g));
    std::vector<ApproximantSeries> mult(pairs.size()), sep(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string tag = "(" + c.run.pairs[i].first + "," + c.run.pairs[i].second + ")";
      mult[i] = {"mult_defect" + tag, {}, q->chain()};
      sep[i] = {"sep_defect" + tag, {}, q->chain()};
    }
    for (auto& stage : q->stages()) {
      auto defects = soficity_defect(stage, pairs);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        mult[i].points.push_back({stage.degree(), defects[i].mult_defect, true});
        if (defects[i].sep_defect)
          sep[i].points.push_back({stage.degree(), *defects[i].sep_defect, true});
      }
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      result.series.push_back(std::move(mult[i]));
      if (!sep[i].points.empty()) result.series.push_back(std::move(sep[i]));
    }
  } else if (pipeline == "oracle") {
    need(cx.has_value(), "a [complex] section");
    const auto betti = finite_group_exact_betti(*cx);
    const std::size_t order = g->table().order();
    for (auto j : degrees()) {
      if (j >= betti.size()) throw InvalidArgument("degree beyond the complex");
      result.series.push_back({"oracle_betti_" + std::to_string(j), {{order, betti[j], true}}, true});
    }
  }

  for (auto& s : result.series) {
    summarize(summary, s);
    result.certified = result.certified && s.certified();
  }
  summary << "note: decimals are 6 significant digit renderings and not authoritative; "
             "the exact rationals are the result\n";
  result.summary = summary.str();
  return result;
}

}  // namespace l2approx
