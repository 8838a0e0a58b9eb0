#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "hardcore/config.hpp"
#include "hardcore/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool quick = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "key = value experiment file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "override run.seed");
  cmd->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--quick", flags.quick, "10x fewer replications and 10x smaller core volume");
  cmd->add_option("--out", flags.out, "override output.dir");
}

hardcore::ExperimentConfig resolve(const CommonFlags& flags) {
  hardcore::ExperimentConfig config =
      flags.config.empty() ? hardcore::ExperimentConfig{} : hardcore::load_config(flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (flags.quick) config = config.quick();
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-core thinnings of Boolean models: simulation, quadrature and comparison"};
  app.require_subcommand(1);

  CommonFlags sim_flags, ana_flags, cmp_flags;
  auto* simulate = app.add_subcommand("simulate", "simulate, thin and write grain files plus a summary");
  add_common(simulate, sim_flags);
  auto* analytic = app.add_subcommand("analytic", "evaluate analytic curves and asymptotes");
  add_common(analytic, ana_flags);
  auto* compare = app.add_subcommand("compare", "join estimates, analytic values and asymptotes into a report");
  add_common(compare, cmp_flags);
  bool strict = false;
  compare->add_flag("--strict", strict, "exit with status 3 when a verdict fails");

  std::string fit_input, fit_output;
  double fit_lo = 0.0, fit_hi = 0.0;
  auto* fit = app.add_subcommand("fit-tail", "log-log least-squares slope of a lag,value CSV");
  fit->add_option("input", fit_input, "CSV with lag,value columns")->required()->check(CLI::ExistingFile);
  fit->add_option("--lo", fit_lo, "smallest lag in the fit")->required();
  fit->add_option("--hi", fit_hi, "largest lag in the fit")->required();
  fit->add_option("--out", fit_output, "write the JSON record here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return hardcore::run_simulate(resolve(sim_flags), sim_flags.jobs, std::cout);
    if (*analytic) return hardcore::run_analytic(resolve(ana_flags), ana_flags.jobs, std::cout);
    if (*compare) {
      const hardcore::ExperimentConfig config = resolve(cmp_flags);
      const int status = hardcore::run_compare(config, cmp_flags.jobs, std::cout);
      return status == 3 && !strict ? 0 : status;
    }
    if (*fit) return hardcore::run_fit_tail(fit_input, fit_lo, fit_hi, fit_output, std::cout);
  } catch (const hardcore::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
