#pragma once

#include "bootci/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace bootci {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation run: one ExperimentSpec per (dgp, functional, n) cell.
struct ExperimentPlan {
    std::vector<ExperimentSpec> cells;
    std::uint64_t seed = 0;
    bool exact = false;
    std::size_t oracle_draws = ExactOracle::kDefaultDraws;
};

/// Parses a JSON object whose keys mirror ExperimentSpec:
///   dgp, functional, n        name/number, list, or "all"
///   alphas, methods           list ("all" for methods: every bootstrap method)
///   B, B_inner, B_inner_bt, n_rep, seed, exact, oracle_draws, tie_rule
/// Illegal (dgp, functional) pairs are skipped, as are methods that do not
/// apply to a cell. Unknown keys are rejected. Throws ConfigError.
ExperimentPlan parse_plan(std::istream& in);
ExperimentPlan load_plan(const std::filesystem::path& path);

/// The full grid: every legal (dgp, functional) pair at every grid size and
/// grid alpha, with every bootstrap method.
ExperimentPlan full_grid_plan();

/// Number of (dgp, functional, n, alpha) combinations in a plan.
std::size_t combination_count(const ExperimentPlan& plan) noexcept;

} // namespace bootci
