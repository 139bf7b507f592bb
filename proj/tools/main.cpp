#include <CLI11.hpp>

#include "symcamel/cli/commands.hpp"

namespace cli = symcamel::cli;

int main(int argc, char** argv) {
  CLI::App app{"Phase-space subsystem dynamics: projections, Williamson forms, capacities"};
  app.require_subcommand(1);

  cli::CommonOptions common;
  std::string config;
  cli::ProjectOptions project;
  cli::MatrixOptions williamson;
  cli::MatrixOptions capacity;
  int n_a = 0, n_b = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Seed for randomized checks")->capture_default_str();
    sub->add_option("--jobs", common.jobs, "Worker threads for parameter sweeps")->capture_default_str();
    sub->add_option("--output", common.output, "Output path (overrides the config)");
    sub->add_option("--config", config, "Run configuration file");
  };

  auto* run = app.add_subcommand("run", "Integrate a configured system and write its subsystem trace");
  add_common(run);
  run->get_option("--config")->required();

  auto* proj = app.add_subcommand("project", "Project the ball B_R through a symplectic matrix");
  add_common(proj);
  proj->add_option("matrix", project.matrix, "Matrix file (whitespace-separated rows)")->required();
  auto* opt_na = proj->add_option("--n-a", n_a, "Modes in subsystem A (default 1)");
  auto* opt_nb = proj->add_option("--n-b", n_b, "Modes in subsystem B (default n - n_A)");
  proj->add_option("--radius", project.radius, "Ball radius R")->capture_default_str();
  proj->add_option("--samples", project.samples, "Containment samples")->capture_default_str();

  auto* will = app.add_subcommand("williamson", "Williamson normal form of a positive definite matrix");
  add_common(will);
  will->add_option("matrix", williamson.matrix, "Matrix file")->required();

  auto* cap = app.add_subcommand("capacity", "Symplectic capacity of the ellipsoid M z.z <= R^2");
  add_common(cap);
  cap->add_option("matrix", capacity.matrix, "Matrix file")->required();
  cap->add_option("--radius", capacity.radius, "Radius R")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  if (run->parsed()) return cli::cmd_run(config, common);
  if (proj->parsed()) {
    if (opt_na->count()) project.n_a = n_a;
    if (opt_nb->count()) project.n_b = n_b;
    return cli::cmd_project(project, common);
  }
  if (will->parsed()) return cli::cmd_williamson(williamson, common);
  if (cap->parsed()) return cli::cmd_capacity(capacity, common);
  return cli::kUsage;
}
