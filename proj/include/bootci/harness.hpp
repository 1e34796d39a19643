#pragma once

#include "bootci/bootstrap.hpp"
#include "bootci/dgp.hpp"
#include "bootci/evaluation.hpp"
#include "bootci/functionals.hpp"
#include "bootci/methods.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bootci {

/// The six endpoint levels of the simulation grid.
inline constexpr std::array<double, 6> kGridAlphas{0.025, 0.05, 0.25, 0.75, 0.95, 0.975};
inline constexpr std::array<std::size_t, 7> kGridSizes{4, 8, 16, 32, 64, 128, 256};

/// One grid cell family: a (dgp, functional, n) triple evaluated with a set of
/// methods at a set of endpoint levels.
struct ExperimentSpec {
    DgpSpec dgp{DgpKind::Normal};
    Functional functional = Functional::Mean;
    std::size_t n = 32;
    std::vector<double> alphas{kGridAlphas.begin(), kGridAlphas.end()};
    std::size_t B = 1000;
    std::size_t b_inner_bt = 50;
    std::size_t b_inner_db = 1000;
    std::size_t n_rep = 1000;
    std::vector<Method> methods;
    std::uint64_t seed = 0;
    bool exact = false;
    std::size_t oracle_draws = ExactOracle::kDefaultDraws;
    TieRule tie_rule = TieRule::Midrank;
};

/// Baseline applicability also depends on the data: binomial intervals need
/// 0/1 data.
[[nodiscard]] bool method_applies(Method m, DgpSpec dgp, Functional f) noexcept;

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const ExperimentSpec& spec);

/// Stream id of a (dgp, functional, n) cell; independent of methods/alphas so
/// adding a method never changes the samples.
std::uint64_t cell_stream_id(DgpSpec dgp, Functional f, std::size_t n) noexcept;

struct ReplicationRecord {
    DgpSpec dgp;
    Functional functional;
    std::size_t n;
    Method method;
    double alpha;
    std::size_t replication;
    double endpoint = 0.0;                 // meaningful when scored
    std::optional<FailureReason> failure;  // set when the method produced nothing
    bool removed = false;                  // constant Bernoulli sample
    bool covered = false;
    double exact = 0.0;                    // NaN when exact scoring is off
    double abs_dist = 0.0;                 // NaN when exact scoring is off

    [[nodiscard]] bool scored() const noexcept { return !removed && !failure; }
};

/// Runs every replication of spec. Records are ordered by (replication,
/// method in spec order, alpha in spec order) and do not depend on `threads`.
/// `oracles` may be null when spec.exact is false.
std::vector<ReplicationRecord> run_cell(const ExperimentSpec& spec, unsigned threads = 1,
                                        ExactOracleCache* oracles = nullptr);

enum class Side { One, Two };
std::string_view to_string(Side s) noexcept;
Side parse_side(std::string_view s);

/// Per-cell summary. For one-sided cells `alpha` is the endpoint level and the
/// nominal coverage; for two-sided cells it is the interval level
/// alpha_hi - alpha_lo.
struct AggregateRecord {
    DgpSpec dgp{DgpKind::Normal};
    Functional functional = Functional::Mean;
    std::size_t n = 0;
    double alpha = 0.0;
    Side side = Side::One;
    Method method = Method::Percentile;
    std::size_t B = 0;
    std::size_t n_rep = 0;
    double coverage = 0.0;    // NaN for an empty cell
    double coverage_se = 0.0;
    double kl = 0.0;
    double dist_norm = 0.0;   // NaN without exact scoring, and for two-sided cells
    double fail_rate = 0.0;
    double removed_rate = 0.0;

    [[nodiscard]] std::size_t n_rep_effective() const noexcept;
    [[nodiscard]] bool empty() const noexcept;
    bool operator==(const AggregateRecord&) const = default;
};

/// Folds the records of one run_cell() call into one-sided cells for every
/// (method, alpha) and two-sided cells for every complementary pair
/// (alpha, 1 - alpha) with alpha < 0.5.
std::vector<AggregateRecord> aggregate(const std::vector<ReplicationRecord>& records, std::size_t B);

/// kl <= multiplier(t) * kl0. Empty cells never meet a threshold.
[[nodiscard]] bool meets_threshold(const AggregateRecord& agg, const ThresholdSet& set, Threshold t);

struct CellVerdict {
    DgpSpec dgp;
    Functional functional;
    std::size_t n;
    double alpha;
    Side side;
    bool a_beats_b = false;
    bool b_beats_a = false;
};

/// A outperforms B in a cell when B misses the criterion and A's KL is at most
/// a fifth of B's, or when B produced no interval and A did. Cells are matched
/// on (dgp, functional, n, alpha, side); throws std::invalid_argument when the
/// two methods were not evaluated on the same cells.
std::vector<CellVerdict> compare_methods(const std::vector<AggregateRecord>& a, const std::vector<AggregateRecord>& b,
                                         Threshold criterion = Threshold::Liberal, const ThresholdSet& set = {});

/// Endpoints of one method for a user sample, drawing randomness the same
/// way a simulation replication does.
struct EstimateOptions {
    std::size_t B = 1000;
    std::size_t b_inner_bt = 50;
    std::size_t b_inner_db = 1000;
    std::uint64_t seed = 0;
    TieRule tie_rule = TieRule::Midrank;
    unsigned threads = 1;
};
std::vector<EndpointEstimate> estimate_endpoints(const Sample& s, Functional f, Method m,
                                                 const std::vector<double>& alphas, const EstimateOptions& opt = {});

/// Lexicographic key order used for CSV output.
bool key_less(const AggregateRecord& lhs, const AggregateRecord& rhs);

} // namespace bootci
