#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "spdc/correlator.hpp"
#include "spdc/run_config.hpp"

namespace spdc {

inline constexpr const char* kToolName = "spdc_tool";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

struct CommandOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides [run] seed
  int threads = 0;                    // 0 keeps the OpenMP default
  bool json = false;                  // machine-readable summary on `out`
};

/// Runs one of bandwidth, analytic, simulate, correlate, fit, entangle and
/// maps failures to exit codes: configuration or invalid input 2, numerical
/// failure or non-convergence 3, file IO 4. Diagnostics go to `err`.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Histogram CSV (tau_ps,counts,g2,g2_err) plus a JSON sidecar next to it
/// with the same stem, holding binning, duration, rates and provenance.
void write_histogram(const CorrelationHistogram& h, const std::string& csv_path, const std::string& config_hash);
CorrelationHistogram read_histogram(const std::string& csv_path);

}  // namespace spdc
