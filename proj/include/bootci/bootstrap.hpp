#pragma once

#include "bootci/functionals.hpp"
#include "bootci/methods.hpp"
#include "bootci/outcome.hpp"
#include "bootci/rng.hpp"
#include "bootci/sample.hpp"

#include <cstddef>
#include <vector>

namespace bootci {

/// How ties between a bootstrap estimate and the plug-in estimate count in a
/// bias fraction: not at all (strict "lower than") or with weight 1/2.
enum class TieRule { Strict, Midrank };

/// The sorted bootstrap estimates of one sample, plus the plug-in estimate.
struct BootstrapDistribution {
    std::vector<double> estimates; // ascending, finite
    std::size_t b_requested = 0;
    double theta_hat = 0.0;

    [[nodiscard]] std::size_t b_valid() const noexcept { return estimates.size(); }
    [[nodiscard]] std::size_t b_degenerate() const noexcept { return b_requested - estimates.size(); }
};

/// A one-sided endpoint: the upper limit of (-inf, value] at level alpha.
struct EndpointEstimate {
    Method method;
    double alpha;
    Outcome<double> value;
};

/// Outer/inner resample counts for the nested methods (B-t and DB).
/// `exhaustive` replaces both random levels by the full enumeration of the
/// n^n ordered index tuples; the counts are then ignored.
struct NestedPlan {
    std::size_t outer = 1000;
    std::size_t inner = 100;
    bool exhaustive = false;
    unsigned threads = 1;
};

// ---------------------------------------------------------------------------
// Resampling

/// B with-replacement resamples of the rows of s (pairs resampled jointly),
/// each evaluated with f. Resample b draws from stream.substream(b), so the
/// result does not depend on `threads`. Resamples on which f is degenerate
/// are dropped and counted.
///
/// Fails with DegenerateEstimate when f is undefined on s itself, and with
/// EmptyDistribution when every resample is degenerate.
Outcome<BootstrapDistribution> resample(const Sample& s, std::size_t B, Functional f, const RngStream& stream,
                                        unsigned threads = 1);

/// Same as resample() over all n^n ordered resamples. Throws
/// std::invalid_argument when n^n exceeds 10^7.
Outcome<BootstrapDistribution> resample_exhaustive(const Sample& s, Functional f);

/// Number of ordered resamples n^n, or 0 on overflow past 10^7.
std::size_t exhaustive_count(std::size_t n) noexcept;

/// Standard deviation of the bootstrap estimates (B-1 denominator).
Outcome<double> bootstrap_sd(const BootstrapDistribution& d);

// ---------------------------------------------------------------------------
// Single-level endpoints

EndpointEstimate pb_endpoint(const BootstrapDistribution& d, double alpha);

/// theta_hat + sigma_hat * z_alpha.
EndpointEstimate bn_endpoint(double theta_hat, double sigma_hat, double alpha);

/// 2 theta_hat - (1 - alpha) quantile.
EndpointEstimate bb_endpoint(const BootstrapDistribution& d, double alpha);

/// Kernel bandwidth h = 0.9 min(sd, IQR / 1.34) of the bootstrap estimates.
Outcome<double> smoothing_bandwidth(const BootstrapDistribution& d);

/// Adds h * N(0, 1) noise to every estimate (noise drawn in estimate order
/// from `stream`) and re-sorts.
Outcome<BootstrapDistribution> smooth(const BootstrapDistribution& d, RngStream stream);

EndpointEstimate sb_endpoint(const BootstrapDistribution& d, double alpha, RngStream stream);

/// (#{estimates < theta_hat} + w * #{estimates == theta_hat}) / b_valid, with
/// w = 0 (Strict) or 1/2 (Midrank).
double bias_fraction(const BootstrapDistribution& d, double theta_hat, TieRule rule = TieRule::Midrank);

/// Adjusted BC level Phi(2 Phi^-1(b) + z_alpha).
Outcome<double> bc_level(double bias, double alpha);

/// Adjusted BCa level Phi(z0 + (z0 + z_alpha) / (1 - ... )) with z0 = Phi^-1(b).
/// Reduces to bc_level() exactly when a == 0.
Outcome<double> bca_level(double bias, double acceleration, double alpha);

EndpointEstimate bc_endpoint(const BootstrapDistribution& d, double theta_hat, double alpha,
                             TieRule rule = TieRule::Midrank);

/// Leave-one-out jackknife estimate of the BCa acceleration constant.
/// Throws std::invalid_argument when n < 3.
Outcome<double> jackknife_acceleration(const Sample& s, Functional f);

EndpointEstimate bca_endpoint(const BootstrapDistribution& d, double theta_hat, double acceleration, double alpha,
                              TieRule rule = TieRule::Midrank);

// ---------------------------------------------------------------------------
// Nested endpoints

/// Pivot pool of the studentized bootstrap. For each outer resample b,
/// T_b = (theta*_b - theta_hat) / sd*_b, where sd*_b comes from the inner
/// resamples of resample b. Resamples with an undefined or zero sd*_b are
/// dropped.
struct StudentizedPool {
    double theta_hat = 0.0;
    double sigma_hat = 0.0;       // sd of the outer estimates
    std::vector<double> pivots;   // ascending
    std::size_t dropped = 0;
};

Outcome<StudentizedPool> studentized_bootstrap(const Sample& s, Functional f, const NestedPlan& plan,
                                               const RngStream& stream);

EndpointEstimate bt_endpoint(const StudentizedPool& pool, double alpha);
EndpointEstimate bt_endpoint(const Sample& s, Functional f, const NestedPlan& plan, double alpha,
                             const RngStream& stream);

/// Calibration pool of the double bootstrap: the outer estimates and, for each
/// outer resample, the fraction of its inner estimates below the original
/// plug-in estimate.
struct DoubleBootstrapPool {
    double theta_hat = 0.0;
    std::vector<double> outer;        // ascending
    std::vector<double> inner_bias;   // ascending
    std::size_t outer_requested = 0;
};

Outcome<DoubleBootstrapPool> double_bootstrap(const Sample& s, Functional f, const NestedPlan& plan,
                                              const RngStream& stream, TieRule rule = TieRule::Midrank);

/// Calibrated level alpha_DB: the alpha quantile of the inner bias fractions,
/// clamped to [1/(B+1), B/(B+1)] for B outer estimates.
double db_level(const DoubleBootstrapPool& pool, double alpha);

EndpointEstimate db_endpoint(const DoubleBootstrapPool& pool, double alpha);
EndpointEstimate db_endpoint(const Sample& s, Functional f, const NestedPlan& plan, double alpha,
                             const RngStream& stream, TieRule rule = TieRule::Midrank);

} // namespace bootci
