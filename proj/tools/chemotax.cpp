#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chemotax/commands.hpp"
#include "chemotax/config.hpp"
#include "chemotax/error.hpp"
#include "chemotax/kernels.hpp"
#include "chemotax/parallel.hpp"

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace chemotax;

  CLI::App app{"Finite-difference simulator and blow-up bounds for a tumor-immune chemotaxis model"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  std::string isa;
  std::string output_dir;
  app.add_option("--threads", threads, "Worker threads (env CHEMOTAX_THREADS)")
      ->check(CLI::PositiveNumber);
  app.add_option("--isa", isa, "Kernel set: scalar or avx2 (env CHEMOTAX_ISA)");
  app.add_option("--output-dir", output_dir, "Output directory (env CHEMOTAX_OUTPUT_DIR)");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Run the time integration");
  simulate->add_option("config", config_path, "JSON config")->required();
  auto* bound = app.add_subcommand("bound", "Lower bound on the blow-up time");
  bound->add_option("config", config_path, "JSON config")->required();
  bool refine = false;
  bound->add_flag("--refine", refine, "Also evaluate Psi(0) on a 2x refined grid");
  auto* certify = app.add_subcommand("certify", "Boundedness certificate");
  certify->add_option("config", config_path, "JSON config")->required();
  double p = 0.0, eps = 0.0, K = 0.0;
  auto* phi = app.add_subcommand("phi-check", "Check the auxiliary phi construction");
  phi->add_option("--p", p, "Exponent p > 1")->required();
  phi->add_option("--eps", eps, "Epsilon in (0, 1)")->required();
  phi->add_option("--K", K, "Argument range bound K > 0")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  return guarded(
      [&]() -> int {
        if (threads == 0)
          if (auto t = env("CHEMOTAX_THREADS")) {
            try {
              threads = std::stoi(*t);
            } catch (const std::exception&) {
              threads = 0;
            }
            if (threads < 1) throw chemotax::ConfigError("CHEMOTAX_THREADS", "must be a positive integer");
          }
        if (threads > 0) set_num_threads(threads);
        if (!isa.empty()) kernels::select(kernels::parse_isa(isa));

        CommandOptions opts;
        if (!output_dir.empty())
          opts.output_dir = output_dir;
        else
          opts.output_dir = env("CHEMOTAX_OUTPUT_DIR");
        opts.refine = refine;

        if (*phi) return cmd_phi_check(p, eps, K, opts);
        const RunConfig cfg = parse_config(config_path);
        if (*simulate) return cmd_simulate(cfg, opts);
        if (*bound) return cmd_bound(cfg, opts);
        return cmd_certify(cfg, opts);
      },
      std::cerr);
}
