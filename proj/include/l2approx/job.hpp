#pragma once

// Batch jobs: a line-oriented config names a group, a complex or module, a
// quotient sequence and a pipeline. Sections are [group], [complex],
// [module], [quotients] and [run]; each line is `key = value` with a JSON
// value, which may continue over several lines until its brackets close.
//
//   [group]
//   family = "free"
//   rank = 2
//   [complex]
//   ranks = [2, 1]
//   d1 = [["a - 1"], ["b - 1"]]
//   [quotients]
//   provider = "sanov"
//   moduli = [3, 5, 15]
//   [run]
//   pipeline = "betti"
//   j = 1

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "l2approx/error.hpp"
#include "l2approx/invariants.hpp"

namespace l2approx {

// Bad config: carries the origin and line of the offending entry.
class ConfigError : public Error {
 public:
  using Error::Error;
};

using StringMatrix = std::vector<std::vector<std::string>>;

struct GroupConfig {
  std::string family;  // free, free_abelian, cyclic, symmetric, table
  std::size_t rank = 0;  // free / free_abelian rank, or the order parameter
  std::vector<std::string> names;
  std::filesystem::path table;  // family == table
};

struct ComplexConfig {
  std::vector<std::size_t> ranks;      // n_k, ..., n_0
  std::vector<StringMatrix> differentials;  // d_1, ..., d_k
  std::optional<StringMatrix> kernel;   // rows generating ker d_1
};

struct ModuleConfig {
  std::size_t free_rank = 0;
  std::optional<StringMatrix> relations;
  std::optional<StringMatrix> submodule;
  std::optional<StringMatrix> a, b;
  std::vector<std::string> f;
  std::optional<std::size_t> window;
};

struct QuotientConfig {
  std::string provider;  // grid, sanov, regular, random
  std::vector<std::uint64_t> moduli;  // grid / sanov moduli, random degrees
  bool require_chain = false;
};

struct RunConfig {
  std::string pipeline;
  std::optional<std::size_t> j;
  std::size_t primes = 3;
  std::uint64_t seed = 0;
  std::size_t size_cap = default_size_cap;
  bool strict = false;
  std::vector<std::pair<std::string, std::string>> pairs;
};

struct JobConfig {
  GroupConfig group;
  std::optional<ComplexConfig> complex;
  std::optional<ModuleConfig> module;
  std::optional<QuotientConfig> quotients;
  RunConfig run;
};

inline const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"betti",  "vrk",     "relative",
                                              "mrk_j",  "euler",   "defect",
                                              "meanrank", "soficity", "oracle"};
  return names;
}

// Throws ConfigError with "origin:line: message".
JobConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                       const std::filesystem::path& base_dir = {});
JobConfig load_config(const std::filesystem::path& path);

// Canonical text for the config: fixed key order, canonical ring-element
// strings. Parsing it back yields the same job.
std::string normalized_config(const JobConfig& config);

struct JobResult {
  std::vector<ApproximantSeries> series;
  std::string summary;
  bool certified = true;
};

struct JobOptions {
  bool dump_matrices = false;
  std::filesystem::path out_dir;  // matrix dumps go here
};

JobResult run_job(const JobConfig& config, const JobOptions& options = {});

}  // namespace l2approx
