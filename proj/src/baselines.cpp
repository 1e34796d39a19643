#include "bootci/baselines.hpp"

#include "special.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bootci {

namespace {

// Signed-rank tables are exact up to this n; above it the normal
// approximation (with continuity correction) is used.
constexpr std::size_t kExactSignedRankMax = 50;

struct Moments {
    double mean;
    double sd;
};

Moments moments(std::span<const double> x)
{
    const auto n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return {x.front(), 0.0};
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

std::vector<double> sorted_copy(std::span<const double> x)
{
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    return v;
}

EndpointEstimate done(Method m, double alpha, double value)
{
    if (!std::isfinite(value)) return {m, alpha, FailureReason::NonFiniteResult};
    return {m, alpha, value};
}

std::size_t count_successes(std::span<const double> x)
{
    std::size_t ones = 0;
    for (double v : x) {
        if (v == 1.0) ++ones;
        else if (v != 0.0) throw std::invalid_argument("binomial intervals need 0/1 data");
    }
    return ones;
}

EndpointEstimate t_test(const Sample& s, double alpha)
{
    const std::size_t n = s.size();
    if (n < 2) return {Method::TTest, alpha, FailureReason::TooFewObservations};
    const auto [mean, sd] = moments(s.x());
    const boost::math::students_t t(static_cast<double>(n - 1));
    return done(Method::TTest, alpha,
                mean + boost::math::quantile(t, alpha) * sd / std::sqrt(static_cast<double>(n)));
}

EndpointEstimate clopper_pearson(const Sample& s, double alpha)
{
    const std::size_t n = s.size();
    const std::size_t x = count_successes(s.x());
    const auto xd = static_cast<double>(x);
    const auto nd = static_cast<double>(n);
    if (alpha >= 0.5) {
        if (x == n) return {Method::ClopperPearson, alpha, 1.0};
        return done(Method::ClopperPearson, alpha,
                    boost::math::quantile(boost::math::beta_distribution<double>(xd + 1.0, nd - xd), alpha));
    }
    if (x == 0) return {Method::ClopperPearson, alpha, 0.0};
    return done(Method::ClopperPearson, alpha,
                boost::math::quantile(boost::math::beta_distribution<double>(xd, nd - xd + 1.0), alpha));
}

EndpointEstimate agresti_coull(const Sample& s, double alpha)
{
    const auto n = static_cast<double>(s.size());
    const auto x = static_cast<double>(count_successes(s.x()));
    const double z = detail::normal_quantile(alpha);
    const double n_adj = n + z * z;
    const double p_adj = (x + 0.5 * z * z) / n_adj;
    return done(Method::AgrestiCoull, alpha, p_adj + z * std::sqrt(p_adj * (1.0 - p_adj) / n_adj));
}

EndpointEstimate wilcoxon(const Sample& s, double alpha)
{
    const std::size_t n = s.size();
    const std::size_t j = wilcoxon_rank(n, alpha);
    if (j == 0) return {Method::Wilcoxon, alpha, FailureReason::NoAdmissibleOrderStatistic};

    const auto x = s.x();
    std::vector<double> walsh;
    walsh.reserve(n * (n + 1) / 2);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) walsh.push_back(0.5 * (x[a] + x[b]));
    auto nth = walsh.begin() + static_cast<std::ptrdiff_t>(j - 1);
    std::nth_element(walsh.begin(), nth, walsh.end());
    return done(Method::Wilcoxon, alpha, *nth);
}

EndpointEstimate chi_squared(const Sample& s, double alpha)
{
    const std::size_t n = s.size();
    if (n < 2) return {Method::ChiSquared, alpha, FailureReason::TooFewObservations};
    const double sd = moments(s.x()).sd;
    const auto df = static_cast<double>(n - 1);
    const double q = boost::math::quantile(boost::math::chi_squared(df), 1.0 - alpha);
    return done(Method::ChiSquared, alpha, std::sqrt(df * sd * sd / q));
}

EndpointEstimate fisher(const Sample& s, double alpha)
{
    const std::size_t n = s.size();
    if (n <= 3) return {Method::Fisher, alpha, FailureReason::TooFewObservations};
    auto r = evaluate(Functional::Corr, s);
    if (!r) return {Method::Fisher, alpha, r.failure()};
    const double shift = detail::normal_quantile(alpha) / std::sqrt(static_cast<double>(n - 3));
    return done(Method::Fisher, alpha, std::tanh(std::atanh(*r) + shift));
}

EndpointEstimate quantile_parametric(const Sample& s, double p, double alpha)
{
    const std::size_t n = s.size();
    if (n < 2) return {Method::QuantileParametric, alpha, FailureReason::TooFewObservations};
    const auto [mean, sd] = moments(s.x());
    const double zp = detail::normal_quantile(p);
    const auto nd = static_cast<double>(n);
    const double se = sd * std::sqrt(1.0 / nd + zp * zp / (2.0 * (nd - 1.0)));
    return done(Method::QuantileParametric, alpha, mean + zp * sd + detail::normal_quantile(alpha) * se);
}

EndpointEstimate quantile_nonparametric(const Sample& s, double p, double alpha)
{
    const std::size_t r = nonparametric_quantile_rank(s.size(), p, alpha);
    if (r == 0) return {Method::QuantileNonparametric, alpha, FailureReason::NoAdmissibleOrderStatistic};
    auto x = sorted_copy(s.x());
    return done(Method::QuantileNonparametric, alpha, x[r - 1]);
}

EndpointEstimate maritz_jarrett(const Sample& s, double p, double alpha)
{
    const auto x = sorted_copy(s.x());
    auto se = maritz_jarrett_se(x, p);
    if (!se) return {Method::MaritzJarrett, alpha, se.failure()};
    return done(Method::MaritzJarrett, alpha, quantile_mu(x, p) + detail::normal_quantile(alpha) * *se);
}

} // namespace

std::vector<double> signed_rank_cdf(std::size_t n)
{
    const std::size_t total = n * (n + 1) / 2;
    // counts[k] = number of subsets of {1..n} with rank sum k
    std::vector<double> counts(total + 1, 0.0);
    counts[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r = 1; r <= n; ++r) {
        reach += r;
        for (std::size_t k = reach; k >= r; --k) counts[k] += counts[k - r];
    }
    const double scale = std::ldexp(1.0, -static_cast<int>(n));
    std::vector<double> cdf(total + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k <= total; ++k) {
        acc += counts[k];
        cdf[k] = acc * scale;
    }
    return cdf;
}

std::size_t wilcoxon_rank(std::size_t n, double alpha)
{
    if (n == 0) throw std::invalid_argument("wilcoxon needs a non-empty sample");
    const std::size_t m = n * (n + 1) / 2;
    // P(theta <= W_(j)) = P(T+ <= j - 1) under the symmetric null.
    if (n <= kExactSignedRankMax) {
        const auto cdf = signed_rank_cdf(n);
        for (std::size_t j = 1; j <= m; ++j)
            if (cdf[j - 1] >= alpha) return j;
        return 0;
    }
    const auto nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    const double sigma = std::sqrt(nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0);
    const double k = std::ceil(mu + sigma * detail::normal_quantile(alpha) - 0.5);
    const double j = std::max(k, 0.0) + 1.0;
    if (j > static_cast<double>(m)) return 0;
    return static_cast<std::size_t>(j);
}

std::size_t nonparametric_quantile_rank(std::size_t n, double p, double alpha)
{
    if (n == 0) throw std::invalid_argument("quantile interval needs a non-empty sample");
    const boost::math::binomial_distribution<double> bin(static_cast<double>(n), p);
    for (std::size_t r = 1; r <= n; ++r)
        if (boost::math::cdf(bin, static_cast<double>(r - 1)) >= alpha) return r;
    return 0;
}

Outcome<double> maritz_jarrett_se(std::span<const double> sorted, double p)
{
    const std::size_t n = sorted.size();
    const auto nd = static_cast<double>(n);
    const double m = std::floor(p * nd + 0.5);
    const double a = m - 1.0;
    const double b = nd - m;
    if (!(a > 0.0 && b > 0.0)) return FailureReason::DegenerateWeights;

    double c1 = 0.0, c2 = 0.0, prev = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double cur = i == n ? 1.0 : boost::math::ibeta(a, b, static_cast<double>(i) / nd);
        const double w = cur - prev;
        prev = cur;
        c1 += w * sorted[i - 1];
        c2 += w * sorted[i - 1] * sorted[i - 1];
    }
    return std::sqrt(std::max(c2 - c1 * c1, 0.0));
}

EndpointEstimate baseline_endpoint(Method m, const Sample& s, Functional f, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (is_bootstrap(m) || !method_applies(m, f))
        throw std::invalid_argument("method '" + std::string(to_string(m)) + "' does not apply to functional '" +
                                    std::string(to_string(f)) + "'");
    if (requires_bivariate(f) != s.is_bivariate()) throw std::invalid_argument("sample arity does not match functional");

    switch (m) {
    case Method::TTest: return t_test(s, alpha);
    case Method::ClopperPearson: return clopper_pearson(s, alpha);
    case Method::AgrestiCoull: return agresti_coull(s, alpha);
    case Method::Wilcoxon: return wilcoxon(s, alpha);
    case Method::ChiSquared: return chi_squared(s, alpha);
    case Method::Fisher: return fisher(s, alpha);
    case Method::QuantileParametric: return quantile_parametric(s, *quantile_level(f), alpha);
    case Method::QuantileNonparametric: return quantile_nonparametric(s, *quantile_level(f), alpha);
    case Method::MaritzJarrett: return maritz_jarrett(s, *quantile_level(f), alpha);
    default: break;
    }
    throw std::logic_error("unhandled baseline method");
}

} // namespace bootci
