// Batch front-end for the approximant pipelines.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "l2approx/job.hpp"

namespace fs = std::filesystem;
using namespace l2approx;

namespace {

constexpr int exit_error = 1;
constexpr int exit_uncertified = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-stage approximants of L2-invariants"};
  std::string config_path, pipeline;
  std::optional<std::size_t> j, primes, size_cap;
  std::optional<std::uint64_t> seed;
  bool strict = false, dump_normalized = false, dump_matrices = false;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "job config file")->required()->check(CLI::ExistingFile);
  app.add_option("--pipeline", pipeline, "override the pipeline")
      ->check(CLI::IsMember(pipeline_names()));
  app.add_option("--j", j, "degree index");
  app.add_option("--primes", primes, "primes per rank round")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for primes and random models");
  app.add_flag("--strict", strict, "exit with status 3 on any uncertified rank");
  app.add_option("--size-cap", size_cap, "largest total dimension of a linearized matrix");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--dump-normalized", dump_normalized, "print the normalized config and exit");
  app.add_flag("--dump-matrices", dump_matrices, "write linearized differentials as MatrixMarket");
  CLI11_PARSE(app, argc, argv);

  try {
    JobConfig config = load_config(config_path);
    if (!pipeline.empty()) config.run.pipeline = pipeline;
    if (j) config.run.j = *j;
    if (primes) config.run.primes = *primes;
    if (seed) config.run.seed = *seed;
    if (size_cap) config.run.size_cap = *size_cap;
    if (strict) config.run.strict = true;

    if (dump_normalized) {
      std::cout << normalized_config(config);
      return 0;
    }
    fs::create_directories(out_dir);
    const JobResult result = run_job(config, {dump_matrices, out_dir});
    {
      std::ofstream csv(fs::path(out_dir) / "series.csv");
      write_csv(csv, result.series);
      std::ofstream summary(fs::path(out_dir) / "summary.txt");
      summary << result.summary;
    }
    std::cout << result.summary;
    if (config.run.strict && !result.certified) {
      std::cerr << "error: uncertified rank under --strict\n";
      return exit_uncertified;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_error;
  }
  return 0;
}
