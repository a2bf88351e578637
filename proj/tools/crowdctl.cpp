#include "crowdctl/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace crowdctl;

  CLI::App app{"crowdctl: minimal-time steering of agent crowds by a localized control"};
  app.require_subcommand(1);

  std::string scenario;
  std::string mode = "exact";
  const auto mode_check = CLI::IsMember({"exact", "approx"});

  auto* min_time = app.add_subcommand("min-time", "minimal time and actuation threshold");
  min_time->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  min_time->add_option("--mode", mode, "exact|approx")->check(mode_check);

  std::optional<double> horizon;
  std::string plan_out = "plan.json";
  auto* plan = app.add_subcommand("plan", "synthesize a control and write a plan file");
  plan->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  plan->add_option("--mode", mode, "exact|approx")->check(mode_check);
  plan->add_option("--time", horizon, "horizon T (default: infimum + delta)");
  plan->add_option("--out", plan_out, "output plan file");

  std::string plan_in;
  std::string traj_out = "traj.csv";
  auto* sim = app.add_subcommand("simulate", "closed-loop simulation of a plan");
  sim->add_option("scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--plan", plan_in, "plan file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", traj_out, "output trajectory CSV");

  std::string sizes = "2..8";
  CheckOptions check_opts;
  auto* check = app.add_subcommand("check", "randomized oracle checks");
  check->add_option("--sizes", sizes, "size range a..b");
  check->add_option("--trials", check_opts.trials, "trials per size");
  check->add_option("--seed", check_opts.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*min_time) return cmd_min_time(scenario, parse_mode(mode), std::cout, std::cerr);
    if (*plan) return cmd_plan(scenario, parse_mode(mode), horizon, plan_out, std::cout, std::cerr);
    if (*sim) return cmd_simulate(scenario, plan_in, traj_out, std::cout, std::cerr);
    std::tie(check_opts.min_n, check_opts.max_n) = parse_sizes(sizes);
    return cmd_check(check_opts, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  }
}
