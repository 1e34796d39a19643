#include "bootci/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bootci {

namespace {

constexpr std::uint64_t kOracleDomain = 0x6F7261636C650001ull; // "oracle" seed domain

double xlog2(double a, double b)
{
    return a == 0.0 ? 0.0 : a * std::log2(a / b);
}

// Root of kl_coverage(., pi) - level on [lo, hi], where the function is
// monotone in p and changes sign.
double bisect(double pi, double level, double lo, double hi)
{
    const bool increasing = lo >= pi;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        const bool above = kl_coverage(mid, pi) > level;
        if (above == increasing) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

bool all_same(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [&](double d) { return d == v.front(); });
}

} // namespace

double kl_coverage(double p, double pi)
{
    if (!(pi > 0.0 && pi < 1.0)) throw std::invalid_argument("nominal coverage must lie in (0, 1)");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("coverage must lie in [0, 1]");
    return xlog2(p, pi) + xlog2(1.0 - p, 1.0 - pi);
}

CoverageBounds kl_bounds(double pi, double level)
{
    if (!(level > 0.0)) throw std::invalid_argument("KL level must be positive");
    CoverageBounds out{};
    out.low = kl_coverage(0.0, pi) <= level ? 0.0 : bisect(pi, level, 0.0, pi);
    out.high = kl_coverage(1.0, pi) <= level ? 1.0 : bisect(pi, level, pi, 1.0);
    return out;
}

CoverageBounds bradley_bounds(double pi, double k)
{
    if (!(k > 0.0)) throw std::invalid_argument("Bradley k must be positive");
    const double half = std::min(pi, 1.0 - pi) / k;
    return {pi - half, pi + half};
}

std::string_view to_string(Threshold t) noexcept
{
    switch (t) {
    case Threshold::Stringent: return "stringent";
    case Threshold::Intermediate: return "intermediate";
    case Threshold::Liberal: return "liberal";
    case Threshold::VeryLiberal: return "very_liberal";
    }
    return "?";
}

Threshold parse_threshold(std::string_view name)
{
    for (Threshold t : kAllThresholds)
        if (to_string(t) == name) return t;
    throw std::invalid_argument("unknown criterion '" + std::string(name) + "'");
}

double CoverageScore::mc_se() const
{
    if (n_rep_effective == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n_rep_effective));
}

// ---------------------------------------------------------------------------

ExactOracle::ExactOracle(DgpSpec dgp, Functional f, std::size_t n, std::uint64_t seed, std::size_t draws)
{
    if (draws == 0) throw std::invalid_argument("oracle needs at least one draw");
    const double theta = true_parameter(dgp, f);
    const RngStream root(seed ^ kOracleDomain,
                         combine_ids(combine_ids(static_cast<std::uint64_t>(dgp.kind), static_cast<std::uint64_t>(f)),
                                     n));
    deviations_.reserve(draws);
    for (std::size_t i = 0; i < draws; ++i) {
        RngStream rs = root.substream(i);
        const Sample s = draw_sample(dgp, n, rs);
        // Constant Bernoulli samples are removed from scoring, so they are
        // left out of the reference distribution as well.
        if (dgp.is_bernoulli() && all_same(s.x())) continue;
        auto est = evaluate(f, s);
        if (!est) {
            ++degenerate_;
            continue;
        }
        deviations_.push_back(*est - theta);
    }
    if (deviations_.empty() || degenerate_ * 2 > draws)
        throw std::runtime_error("exact-interval oracle: functional degenerate on most draws");
    std::sort(deviations_.begin(), deviations_.end());
}

double ExactOracle::offset(double alpha) const
{
    return quantile_mu(deviations_, 1.0 - alpha);
}

double ExactOracle::endpoint(double theta_hat_observed, double alpha) const
{
    return theta_hat_observed - offset(alpha);
}

ExactOracleCache::ExactOracleCache(std::uint64_t seed, std::size_t draws) : seed_(seed), draws_(draws) {}

const ExactOracle& ExactOracleCache::get(DgpSpec dgp, Functional f, std::size_t n)
{
    Slot* slot = nullptr;
    {
        std::lock_guard lock(mutex_);
        auto& entry = slots_[Key{static_cast<int>(dgp.kind), static_cast<int>(f), n}];
        if (!entry) entry = std::make_unique<Slot>();
        slot = entry.get();
    }
    std::call_once(slot->once, [&] { slot->oracle = std::make_unique<ExactOracle>(dgp, f, n, seed_, draws_); });
    return *slot->oracle;
}

double exact_endpoint(DgpSpec dgp, Functional f, std::size_t n, double alpha, double theta_hat_observed,
                      std::uint64_t seed)
{
    return ExactOracle(dgp, f, n, seed).endpoint(theta_hat_observed, alpha);
}

// ---------------------------------------------------------------------------

ReplicationScore score_replication(const EndpointEstimate& endpoint, double theta_true, double exact)
{
    if (!endpoint.value) throw std::invalid_argument("cannot score a failed endpoint");
    const double e = *endpoint.value;
    return {theta_true <= e, std::abs(e - exact)};
}

double normalize_distance(double mean_abs_dist, double exact_endpoint_sd)
{
    if (!(exact_endpoint_sd > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return mean_abs_dist / (2.0 * exact_endpoint_sd);
}

Outcome<TwoSidedInterval> two_sided(const EndpointEstimate& lower, const EndpointEstimate& upper)
{
    if (!(lower.alpha < upper.alpha) || std::abs(lower.alpha + upper.alpha - 1.0) > 1e-12)
        throw std::invalid_argument("two-sided interval needs alpha_lo < alpha_hi with alpha_lo + alpha_hi = 1");
    if (lower.method != upper.method) throw std::invalid_argument("two-sided interval mixes methods");
    if (!lower.value) return lower.value.failure();
    if (!upper.value) return upper.value.failure();
    if (*upper.value < *lower.value) return FailureReason::CrossedEndpoints;
    return TwoSidedInterval{*lower.value, *upper.value, upper.alpha - lower.alpha};
}

} // namespace bootci
