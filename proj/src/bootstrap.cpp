#include "bootci/bootstrap.hpp"

#include "bootci/parallel.hpp"
#include "special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <type_traits>

namespace bootci {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxExhaustive = 10'000'000;

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

EndpointEstimate finite_or_fail(Method m, double alpha, double value)
{
    if (!std::isfinite(value)) return {m, alpha, FailureReason::NonFiniteResult};
    return {m, alpha, value};
}

// Evaluates f on a resample whose rows are chosen by successive calls to
// pick(). Keeps its own scratch so one instance serves many resamples.
class ResampleEvaluator {
public:
    ResampleEvaluator(Functional f, std::size_t n, bool bivariate)
        : f_(f), x_(n), y_(bivariate ? n : 0)
    {
    }

    template <typename Pick>
    Outcome<double> operator()(std::span<const double> x, std::span<const double> y, Pick&& pick)
    {
        const std::size_t n = x_.size();
        if (f_ == Functional::Mean) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += x[pick()];
            return sum / static_cast<double>(n);
        }
        if (y_.empty()) {
            for (std::size_t i = 0; i < n; ++i) x_[i] = x[pick()];
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const auto k = pick();
                x_[i] = x[k];
                y_[i] = y[k];
            }
        }
        return evaluate_in_place(f_, x_, y_);
    }

    // Copies the rows chosen by pick() into (ox, oy) and evaluates f on them.
    template <typename Pick>
    Outcome<double> materialize(std::span<const double> x, std::span<const double> y, std::vector<double>& ox,
                                std::vector<double>& oy, Pick&& pick)
    {
        const std::size_t n = x_.size();
        ox.resize(n);
        oy.resize(y_.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = pick();
            ox[i] = x[k];
            if (!oy.empty()) oy[i] = y[k];
        }
        std::copy(ox.begin(), ox.end(), x_.begin());
        return evaluate_in_place(f_, x_, oy);
    }

private:
    Functional f_;
    std::vector<double> x_;
    std::vector<double> y_;
};

// Row picker for resample number `index` in the lexicographic enumeration of
// all n^n ordered index tuples (first row is the most significant digit).
class TuplePicker {
public:
    TuplePicker(std::size_t n, std::size_t index) : digits_(n)
    {
        for (std::size_t i = n; i-- > 0;) {
            digits_[i] = index % n;
            index /= n;
        }
    }
    std::size_t operator()() noexcept { return digits_[next_++]; }

private:
    std::vector<std::size_t> digits_;
    std::size_t next_ = 0;
};

std::size_t checked_exhaustive_count(std::size_t n)
{
    const std::size_t count = exhaustive_count(n);
    if (count == 0) throw std::invalid_argument("exhaustive resampling is limited to n^n <= 10^7");
    return count;
}

Outcome<double> plug_in(const Sample& s, Functional f)
{
    auto theta = evaluate(f, s);
    if (!theta) return FailureReason::DegenerateEstimate;
    return theta;
}

Outcome<BootstrapDistribution> collect(std::vector<double> raw, double theta_hat)
{
    BootstrapDistribution d;
    d.b_requested = raw.size();
    d.theta_hat = theta_hat;
    d.estimates.reserve(raw.size());
    for (double v : raw)
        if (!std::isnan(v)) d.estimates.push_back(v);
    if (d.estimates.empty()) return FailureReason::EmptyDistribution;
    std::sort(d.estimates.begin(), d.estimates.end());
    return d;
}

double sd_of(std::span<const double> v)
{
    const auto n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double d : v) mean += d;
    mean /= n;
    if (std::all_of(v.begin(), v.end(), [&](double d) { return d == v.front(); })) return 0.0;
    double ss = 0.0;
    for (double d : v) ss += (d - mean) * (d - mean);
    return std::sqrt(ss / (n - 1.0));
}

double tie_weight(TieRule rule) noexcept
{
    return rule == TieRule::Midrank ? 0.5 : 0.0;
}

EndpointEstimate at_level(Method m, const BootstrapDistribution& d, double alpha, const Outcome<double>& level)
{
    if (!level) return {m, alpha, level.failure()};
    if (d.estimates.empty()) return {m, alpha, FailureReason::EmptyDistribution};
    return finite_or_fail(m, alpha, quantile_mu(d.estimates, *level));
}

// Runs body(b, pick) for every outer resample, where pick draws rows for
// resample b. For Monte Carlo plans pick is backed by stream.substream(b),
// which body may keep drawing from for inner levels.
template <typename Body>
void for_each_outer(const NestedPlan& plan, std::size_t n, const RngStream& stream, Body&& body)
{
    const std::size_t outer = plan.exhaustive ? checked_exhaustive_count(n) : plan.outer;
    parallel_for(outer, plan.threads, [&](std::size_t begin, std::size_t end) {
        auto state = body.make_state();
        for (std::size_t b = begin; b < end; ++b) {
            if (plan.exhaustive) {
                TuplePicker pick(n, b);
                body(state, b, pick, nullptr);
            } else {
                RngStream rs = stream.substream(b);
                IndexSampler pick(rs, static_cast<std::uint32_t>(n));
                body(state, b, pick, &pick);
            }
        }
    });
}

// Runs inner(pick) once per inner resample of the outer resample (ox, oy).
// Exhaustive plans pass a null sampler and enumerate every tuple.
template <typename Sampler, typename Inner>
void for_each_inner(const NestedPlan& plan, std::size_t n, Sampler sampler, Inner&& inner)
{
    if constexpr (std::is_null_pointer_v<Sampler>) {
        const std::size_t count = checked_exhaustive_count(n);
        for (std::size_t j = 0; j < count; ++j) {
            TuplePicker pick(n, j);
            inner(pick);
        }
    } else {
        for (std::size_t j = 0; j < plan.inner; ++j) inner(*sampler);
    }
}

void check_plan(const NestedPlan& plan, std::size_t min_inner)
{
    if (plan.exhaustive) return;
    if (plan.outer < 1) throw std::invalid_argument("outer resample count must be positive");
    if (plan.inner < min_inner) throw std::invalid_argument("inner resample count too small");
}

} // namespace

// ---------------------------------------------------------------------------
// Resampling

std::size_t exhaustive_count(std::size_t n) noexcept
{
    std::size_t count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (count > kMaxExhaustive / n) return 0;
        count *= n;
    }
    return count;
}

Outcome<BootstrapDistribution> resample(const Sample& s, std::size_t B, Functional f, const RngStream& stream,
                                        unsigned threads)
{
    if (B < 1) throw std::invalid_argument("number of resamples must be positive");
    auto theta = plug_in(s, f);
    if (!theta) return theta.failure();

    const std::size_t n = s.size();
    if (n > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("sample too large");
    std::vector<double> raw(B, kNaN);
    parallel_for(B, threads, [&](std::size_t begin, std::size_t end) {
        ResampleEvaluator eval(f, n, s.is_bivariate());
        for (std::size_t b = begin; b < end; ++b) {
            RngStream rs = stream.substream(b);
            IndexSampler pick(rs, static_cast<std::uint32_t>(n));
            auto est = eval(s.x(), s.y(), pick);
            if (est) raw[b] = *est;
        }
    });
    return collect(std::move(raw), *theta);
}

Outcome<BootstrapDistribution> resample_exhaustive(const Sample& s, Functional f)
{
    auto theta = plug_in(s, f);
    if (!theta) return theta.failure();
    const std::size_t n = s.size();
    const std::size_t count = checked_exhaustive_count(n);
    std::vector<double> raw(count, kNaN);
    ResampleEvaluator eval(f, n, s.is_bivariate());
    for (std::size_t b = 0; b < count; ++b) {
        auto est = eval(s.x(), s.y(), TuplePicker(n, b));
        if (est) raw[b] = *est;
    }
    return collect(std::move(raw), *theta);
}

Outcome<double> bootstrap_sd(const BootstrapDistribution& d)
{
    if (d.b_valid() < 2) return FailureReason::TooFewEstimates;
    return sd_of(d.estimates);
}

// ---------------------------------------------------------------------------
// Single-level endpoints

EndpointEstimate pb_endpoint(const BootstrapDistribution& d, double alpha)
{
    check_alpha(alpha);
    return at_level(Method::Percentile, d, alpha, alpha);
}

EndpointEstimate bn_endpoint(double theta_hat, double sigma_hat, double alpha)
{
    check_alpha(alpha);
    if (!(sigma_hat >= 0.0) || !std::isfinite(sigma_hat) || !std::isfinite(theta_hat))
        throw std::invalid_argument("bn_endpoint needs a finite estimate and a non-negative finite spread");
    return finite_or_fail(Method::Normal, alpha, theta_hat + sigma_hat * detail::normal_quantile(alpha));
}

EndpointEstimate bb_endpoint(const BootstrapDistribution& d, double alpha)
{
    check_alpha(alpha);
    if (d.estimates.empty()) return {Method::Basic, alpha, FailureReason::EmptyDistribution};
    return finite_or_fail(Method::Basic, alpha, 2.0 * d.theta_hat - quantile_mu(d.estimates, 1.0 - alpha));
}

Outcome<double> smoothing_bandwidth(const BootstrapDistribution& d)
{
    auto sd = bootstrap_sd(d);
    if (!sd) return sd;
    const double iqr = quantile_mu(d.estimates, 0.75) - quantile_mu(d.estimates, 0.25);
    return 0.9 * std::min(*sd, iqr / 1.34);
}

Outcome<BootstrapDistribution> smooth(const BootstrapDistribution& d, RngStream stream)
{
    auto h = smoothing_bandwidth(d);
    if (!h) return h.failure();
    BootstrapDistribution out = d;
    if (*h > 0.0) {
        std::normal_distribution<double> noise(0.0, 1.0);
        for (double& v : out.estimates) v += *h * noise(stream);
        std::sort(out.estimates.begin(), out.estimates.end());
    }
    return out;
}

EndpointEstimate sb_endpoint(const BootstrapDistribution& d, double alpha, RngStream stream)
{
    check_alpha(alpha);
    auto smoothed = smooth(d, stream);
    if (!smoothed) return {Method::Smoothed, alpha, smoothed.failure()};
    return at_level(Method::Smoothed, *smoothed, alpha, alpha);
}

double bias_fraction(const BootstrapDistribution& d, double theta_hat, TieRule rule)
{
    if (d.estimates.empty()) throw std::invalid_argument("bias fraction of an empty distribution");
    const auto lower = std::lower_bound(d.estimates.begin(), d.estimates.end(), theta_hat);
    const auto upper = std::upper_bound(lower, d.estimates.end(), theta_hat);
    const auto below = static_cast<double>(lower - d.estimates.begin());
    const auto ties = static_cast<double>(upper - lower);
    return (below + tie_weight(rule) * ties) / static_cast<double>(d.estimates.size());
}

Outcome<double> bc_level(double bias, double alpha)
{
    check_alpha(alpha);
    if (!(bias > 0.0 && bias < 1.0)) return FailureReason::InfiniteBiasCorrection;
    const double shift = 2.0 * detail::normal_quantile(bias);
    // Phi(Phi^-1(alpha)) does not round-trip exactly; keep alpha itself when
    // there is nothing to correct.
    if (shift == 0.0) return alpha;
    return detail::normal_cdf(shift + detail::normal_quantile(alpha));
}

Outcome<double> bca_level(double bias, double acceleration, double alpha)
{
    if (acceleration == 0.0) return bc_level(bias, alpha);
    check_alpha(alpha);
    if (!(bias > 0.0 && bias < 1.0)) return FailureReason::InfiniteBiasCorrection;
    const double z0 = detail::normal_quantile(bias);
    const double w = z0 + detail::normal_quantile(alpha);
    const double denom = 1.0 + acceleration * w;
    if (denom == 0.0) return FailureReason::ZeroDenominator;
    const double level = detail::normal_cdf(z0 + w / denom);
    if (!std::isfinite(level)) return FailureReason::NonFiniteResult;
    return level;
}

EndpointEstimate bc_endpoint(const BootstrapDistribution& d, double theta_hat, double alpha, TieRule rule)
{
    check_alpha(alpha);
    if (d.estimates.empty()) return {Method::BiasCorrected, alpha, FailureReason::EmptyDistribution};
    return at_level(Method::BiasCorrected, d, alpha, bc_level(bias_fraction(d, theta_hat, rule), alpha));
}

Outcome<double> jackknife_acceleration(const Sample& s, Functional f)
{
    const std::size_t n = s.size();
    if (n < 3) throw std::invalid_argument("jackknife acceleration needs at least 3 observations");

    std::vector<double> loo(n);
    std::vector<double> x(n - 1);
    std::vector<double> y(s.is_bivariate() ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0, k = 0; j < n; ++j) {
            if (j == i) continue;
            x[k] = s.x()[j];
            if (!y.empty()) y[k] = s.y()[j];
            ++k;
        }
        auto est = evaluate_in_place(f, x, y);
        if (!est) return FailureReason::DegenerateEstimate;
        loo[i] = *est;
    }
    if (std::all_of(loo.begin(), loo.end(), [&](double v) { return v == loo.front(); }))
        return FailureReason::ZeroJackknifeVariance;

    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= static_cast<double>(n);
    double s2 = 0.0, s3 = 0.0;
    for (double v : loo) {
        const double d = mean - v;
        s2 += d * d;
        s3 += d * d * d;
    }
    if (s2 == 0.0) return FailureReason::ZeroJackknifeVariance;
    return s3 / (6.0 * std::pow(s2, 1.5));
}

EndpointEstimate bca_endpoint(const BootstrapDistribution& d, double theta_hat, double acceleration, double alpha,
                              TieRule rule)
{
    check_alpha(alpha);
    if (d.estimates.empty()) return {Method::BCa, alpha, FailureReason::EmptyDistribution};
    return at_level(Method::BCa, d, alpha, bca_level(bias_fraction(d, theta_hat, rule), acceleration, alpha));
}

// ---------------------------------------------------------------------------
// Studentized bootstrap

namespace {

struct StudentizedBody {
    const Sample& s;
    Functional f;
    const NestedPlan& plan;
    double theta_hat;
    std::vector<double>& outer_est;
    std::vector<double>& pivots;

    struct State {
        ResampleEvaluator eval;
        std::vector<double> ox, oy, inner;
    };

    State make_state() const
    {
        return State{ResampleEvaluator(f, s.size(), s.is_bivariate()), {}, {}, {}};
    }

    template <typename Pick, typename Sampler>
    void operator()(State& st, std::size_t b, Pick& pick, Sampler rs) const
    {
        auto est = st.eval.materialize(s.x(), s.y(), st.ox, st.oy, pick);
        if (!est) return;
        outer_est[b] = *est;
        st.inner.clear();
        for_each_inner(plan, s.size(), rs, [&](auto& inner_pick) {
            auto e = st.eval(st.ox, st.oy, inner_pick);
            if (e) st.inner.push_back(*e);
        });
        if (st.inner.size() < 2) return;
        const double sd = sd_of(st.inner);
        if (sd > 0.0) pivots[b] = (*est - theta_hat) / sd;
    }
};

std::vector<double> finite_sorted(const std::vector<double>& raw)
{
    std::vector<double> out;
    out.reserve(raw.size());
    for (double v : raw)
        if (!std::isnan(v)) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

Outcome<StudentizedPool> studentized_bootstrap(const Sample& s, Functional f, const NestedPlan& plan,
                                               const RngStream& stream)
{
    check_plan(plan, 2);
    auto theta = plug_in(s, f);
    if (!theta) return theta.failure();

    const std::size_t outer = plan.exhaustive ? checked_exhaustive_count(s.size()) : plan.outer;
    std::vector<double> outer_est(outer, kNaN);
    std::vector<double> pivots(outer, kNaN);
    for_each_outer(plan, s.size(), stream, StudentizedBody{s, f, plan, *theta, outer_est, pivots});

    StudentizedPool pool;
    pool.theta_hat = *theta;
    const auto valid_outer = finite_sorted(outer_est);
    if (valid_outer.size() < 2) return FailureReason::TooFewEstimates;
    pool.sigma_hat = sd_of(valid_outer);
    if (pool.sigma_hat == 0.0) return FailureReason::ZeroSpread;
    pool.pivots = finite_sorted(pivots);
    pool.dropped = outer - pool.pivots.size();
    if (pool.pivots.empty()) return FailureReason::ZeroSpread;
    return pool;
}

EndpointEstimate bt_endpoint(const StudentizedPool& pool, double alpha)
{
    check_alpha(alpha);
    if (pool.pivots.empty()) return {Method::Studentized, alpha, FailureReason::ZeroSpread};
    return finite_or_fail(Method::Studentized, alpha,
                          pool.theta_hat - pool.sigma_hat * quantile_mu(pool.pivots, 1.0 - alpha));
}

EndpointEstimate bt_endpoint(const Sample& s, Functional f, const NestedPlan& plan, double alpha,
                             const RngStream& stream)
{
    check_alpha(alpha);
    auto pool = studentized_bootstrap(s, f, plan, stream);
    if (!pool) return {Method::Studentized, alpha, pool.failure()};
    return bt_endpoint(*pool, alpha);
}

// ---------------------------------------------------------------------------
// Double bootstrap

namespace {

struct DoubleBody {
    const Sample& s;
    Functional f;
    const NestedPlan& plan;
    double theta_hat;
    double tie;
    std::vector<double>& outer_est;
    std::vector<double>& bias;

    struct State {
        ResampleEvaluator eval;
        std::vector<double> ox, oy;
    };

    State make_state() const { return State{ResampleEvaluator(f, s.size(), s.is_bivariate()), {}, {}}; }

    template <typename Pick, typename Sampler>
    void operator()(State& st, std::size_t b, Pick& pick, Sampler rs) const
    {
        auto est = st.eval.materialize(s.x(), s.y(), st.ox, st.oy, pick);
        if (!est) return;
        outer_est[b] = *est;
        double below = 0.0;
        std::size_t valid = 0;
        for_each_inner(plan, s.size(), rs, [&](auto& inner_pick) {
            auto e = st.eval(st.ox, st.oy, inner_pick);
            if (!e) return;
            ++valid;
            if (*e < theta_hat) below += 1.0;
            else if (*e == theta_hat) below += tie;
        });
        if (valid > 0) bias[b] = below / static_cast<double>(valid);
    }
};

} // namespace

Outcome<DoubleBootstrapPool> double_bootstrap(const Sample& s, Functional f, const NestedPlan& plan,
                                              const RngStream& stream, TieRule rule)
{
    check_plan(plan, 1);
    auto theta = plug_in(s, f);
    if (!theta) return theta.failure();

    const std::size_t outer = plan.exhaustive ? checked_exhaustive_count(s.size()) : plan.outer;
    std::vector<double> outer_est(outer, kNaN);
    std::vector<double> bias(outer, kNaN);
    for_each_outer(plan, s.size(), stream, DoubleBody{s, f, plan, *theta, tie_weight(rule), outer_est, bias});

    DoubleBootstrapPool pool;
    pool.theta_hat = *theta;
    pool.outer_requested = outer;
    pool.outer = finite_sorted(outer_est);
    pool.inner_bias = finite_sorted(bias);
    if (pool.outer.empty() || pool.inner_bias.empty()) return FailureReason::EmptyDistribution;
    return pool;
}

double db_level(const DoubleBootstrapPool& pool, double alpha)
{
    check_alpha(alpha);
    if (pool.inner_bias.empty() || pool.outer.empty()) throw std::invalid_argument("empty double bootstrap pool");
    const auto b = static_cast<double>(pool.outer.size());
    const double level = quantile_mu(pool.inner_bias, alpha);
    return std::clamp(level, 1.0 / (b + 1.0), b / (b + 1.0));
}

EndpointEstimate db_endpoint(const DoubleBootstrapPool& pool, double alpha)
{
    check_alpha(alpha);
    if (pool.inner_bias.empty() || pool.outer.empty()) return {Method::Double, alpha, FailureReason::EmptyDistribution};
    return finite_or_fail(Method::Double, alpha, quantile_mu(pool.outer, db_level(pool, alpha)));
}

EndpointEstimate db_endpoint(const Sample& s, Functional f, const NestedPlan& plan, double alpha,
                             const RngStream& stream, TieRule rule)
{
    check_alpha(alpha);
    auto pool = double_bootstrap(s, f, plan, stream, rule);
    if (!pool) return {Method::Double, alpha, pool.failure()};
    return db_endpoint(*pool, alpha);
}

} // namespace bootci
