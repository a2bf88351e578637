#pragma once

#include "crowdctl/error.hpp"
#include "crowdctl/minimal_time.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace crowdctl {

/// Process exit status for each error kind: 1 usage/IO, 2 infeasible
/// scenario, 3 synthesis failure, 4 verification failure.
int exit_code(ErrorCode code);

ControlMode parse_mode(const std::string& name);

/// Parses "a..b" (or a single "n") into an inclusive size range.
std::pair<int, int> parse_sizes(const std::string& text);

int cmd_min_time(const std::filesystem::path& scenario, ControlMode mode, std::ostream& out,
                 std::ostream& err);

int cmd_plan(const std::filesystem::path& scenario, ControlMode mode,
             std::optional<double> horizon, const std::filesystem::path& out_path,
             std::ostream& out, std::ostream& err);

/// Writes the trajectory CSV and a JSON summary next to it (extension
/// replaced by `.summary.json`).
int cmd_simulate(const std::filesystem::path& scenario, const std::filesystem::path& plan_path,
                 const std::filesystem::path& out_path, std::ostream& out, std::ostream& err);

struct CheckOptions {
  int min_n = 2;
  int max_n = 8;
  int trials = 200;
  std::uint64_t seed = 0;
};

struct SuiteResult {
  std::string name;
  int n = 0;
  int passed = 0;
  int failed = 0;
};

/// Randomized oracle comparisons: sorted pairing vs brute force, Hungarian vs
/// exhaustive search, and the distance axioms (n <= 6). Deterministic in the seed.
std::vector<SuiteResult> run_checks(const CheckOptions& options);

int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err);

}  // namespace crowdctl
