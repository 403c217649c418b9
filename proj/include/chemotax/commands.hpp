#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "chemotax/blowup_bound.hpp"
#include "chemotax/config.hpp"

namespace chemotax {

/// Process exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,  // completed or blow-up detected
  kExitIo = 1,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitGeometry = 4,
};

struct CommandOptions {
  std::optional<std::string> output_dir;  // overrides the config's output.directory
  bool refine = false;                    // bound: also report Psi(0) on a 2x grid
  std::ostream* out = nullptr;            // defaults to std::cout
  std::ostream* err = nullptr;            // defaults to std::cerr
};

/// Writes diagnostics.csv, summary.json and snapshots/ into the output directory.
int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts);

/// Prints the bound report and writes it to bound.json in the output directory.
int cmd_bound(const RunConfig& cfg, const CommandOptions& opts);

/// Prints the boundedness certificate with PASS/FAIL and phi residuals.
int cmd_certify(const RunConfig& cfg, const CommandOptions& opts);

/// Checks the phi construction for one (p, eps, K).
int cmd_phi_check(double p, double eps, double K, const CommandOptions& opts);

/// Runs `body`, mapping library exceptions onto exit codes and printing them to `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

/// JSON text of the bound report.
std::string bound_report_json(const BoundConstants& b, const ModelParams& params,
                              const std::optional<BoundConstants>& refined = std::nullopt);

}  // namespace chemotax
