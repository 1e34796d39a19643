#pragma once

#include "bootci/bootstrap.hpp"
#include "bootci/dgp.hpp"
#include "bootci/functionals.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace bootci {

// ---------------------------------------------------------------------------
// Coverage criteria

/// Kullback-Leibler divergence, in bits, between Bernoulli(p) (actual
/// coverage) and Bernoulli(pi) (nominal coverage). 0 log 0 = 0.
/// Throws std::invalid_argument unless 0 <= p <= 1 and 0 < pi < 1.
double kl_coverage(double p, double pi);

struct CoverageBounds {
    double low;
    double high;
};

/// Coverages p < pi < p' at which kl_coverage equals `level` bits, to
/// |dp| < 1e-12. A side whose whole range stays below `level` is reported as
/// 0 or 1.
CoverageBounds kl_bounds(double pi, double level);

/// Bradley's robustness band pi -+ min(pi, 1 - pi) / k (not capped to [0, 1]).
CoverageBounds bradley_bounds(double pi, double k);

enum class Threshold { Stringent, Intermediate, Liberal, VeryLiberal };

inline constexpr std::array<Threshold, 4> kAllThresholds{Threshold::Stringent, Threshold::Intermediate,
                                                         Threshold::Liberal, Threshold::VeryLiberal};

/// Stable names: stringent, intermediate, liberal, very_liberal.
std::string_view to_string(Threshold t) noexcept;
Threshold parse_threshold(std::string_view name);

/// KL thresholds: base = KL(0.945, 0.95); successive levels grow by 5x.
struct ThresholdSet {
    double kl0 = kl_coverage(0.945, 0.95);

    [[nodiscard]] static constexpr double multiplier(Threshold t) noexcept
    {
        switch (t) {
        case Threshold::Stringent: return 1.0;
        case Threshold::Intermediate: return 5.0;
        case Threshold::Liberal: return 25.0;
        case Threshold::VeryLiberal: return 125.0;
        }
        return 0.0;
    }
    [[nodiscard]] double level(Threshold t) const noexcept { return multiplier(t) * kl0; }
};

/// Empirical coverage with its Monte Carlo standard error.
struct CoverageScore {
    double p = 0.0;
    double pi = 0.0;
    std::size_t n_rep_effective = 0;

    [[nodiscard]] double mc_se() const;
};

// ---------------------------------------------------------------------------
// Exact intervals

/// Monte Carlo sampling distribution of theta_hat - theta for one
/// (dgp, functional, n), used as the reference "exact" interval:
/// exact[alpha] = theta_hat_observed - q_{1-alpha}(theta_hat - theta).
class ExactOracle {
public:
    static constexpr std::size_t kDefaultDraws = 100'000;

    /// Draws `draws` samples from their own seed domain derived from `seed`.
    /// Throws std::runtime_error when the functional is degenerate on more
    /// than half of the draws.
    ExactOracle(DgpSpec dgp, Functional f, std::size_t n, std::uint64_t seed, std::size_t draws = kDefaultDraws);

    [[nodiscard]] double endpoint(double theta_hat_observed, double alpha) const;
    /// q_{1-alpha} of theta_hat - theta.
    [[nodiscard]] double offset(double alpha) const;

    [[nodiscard]] const std::vector<double>& deviations() const noexcept { return deviations_; }
    [[nodiscard]] std::size_t degenerate() const noexcept { return degenerate_; }

private:
    std::vector<double> deviations_; // ascending
    std::size_t degenerate_ = 0;
};

/// Thread-safe cache of oracles keyed by (dgp, functional, n). Each key is
/// built once; concurrent requests for the same key wait for that build.
class ExactOracleCache {
public:
    explicit ExactOracleCache(std::uint64_t seed, std::size_t draws = ExactOracle::kDefaultDraws);

    const ExactOracle& get(DgpSpec dgp, Functional f, std::size_t n);

private:
    struct Slot {
        std::once_flag once;
        std::unique_ptr<ExactOracle> oracle;
    };
    using Key = std::tuple<int, int, std::size_t>;

    std::uint64_t seed_;
    std::size_t draws_;
    std::mutex mutex_;
    std::map<Key, std::unique_ptr<Slot>> slots_;
};

/// exact_endpoint() without caching; builds a fresh oracle.
double exact_endpoint(DgpSpec dgp, Functional f, std::size_t n, double alpha, double theta_hat_observed,
                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Per-replication scoring

struct ReplicationScore {
    bool covered;
    double abs_dist; // NaN when no exact endpoint is available
};

/// covered <=> theta_true <= endpoint; abs_dist = |endpoint - exact|.
/// Throws std::invalid_argument for a failed endpoint.
ReplicationScore score_replication(const EndpointEstimate& endpoint, double theta_true, double exact);

/// mean_abs_dist / (2 sd); NaN when sd is not positive.
double normalize_distance(double mean_abs_dist, double exact_endpoint_sd);

struct TwoSidedInterval {
    double lower;
    double upper;
    double level; // alpha_hi - alpha_lo

    [[nodiscard]] double length() const noexcept { return upper - lower; }
    /// lower < theta <= upper.
    [[nodiscard]] bool covers(double theta) const noexcept { return lower < theta && theta <= upper; }
};

/// Combines the alpha_lo and alpha_hi = 1 - alpha_lo endpoints of one method
/// into (lower, upper]. Fails if either side failed or the endpoints cross.
Outcome<TwoSidedInterval> two_sided(const EndpointEstimate& lower, const EndpointEstimate& upper);

} // namespace bootci
