#include <CLI11.hpp>
#include <iostream>

#include "spdc/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Filtered SPDC photon-pair source toolkit"};
  app.set_version_flag("--version", std::string(spdc::kToolName) + " " + spdc::kToolVersion);
  app.require_subcommand(1);

  spdc::CommandOptions options;
  std::uint64_t seed = 0;
  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"bandwidth", "phase-matching indices, dispersion slope, FWHM bandwidth and spectrum"},
      {"analytic", "model g2 curves and rates versus pump power"},
      {"simulate", "Monte Carlo timestamp streams (pair or thermal process)"},
      {"correlate", "coincidence histogram, g2 and windowed pair rate from streams"},
      {"fit", "characterization, lineshape or fringe fits"},
      {"entangle", "polarization state, fringes and CHSH parameter"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", options.config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed, overriding [run] seed");
    sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", options.threads, "worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--json", options.json, "print a JSON summary on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : spdc::kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) options.seed = seed;
  return spdc::run_command(chosen->get_name(), options, std::cout, std::cerr);
}
