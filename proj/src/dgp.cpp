#include "bootci/dgp.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bootci {

namespace {

constexpr double kBetaA = 10.0;
constexpr double kBetaB = 2.0;

// Bivariate normal parameters and the Cholesky factor of its covariance.
constexpr double kBvnMean = 1.0;
constexpr double kBvnVarX = 2.0;
constexpr double kBvnVarY = 1.0;
constexpr double kBvnCov = 0.5;

double standard_normal_quantile(double p)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

double laplace_quantile(double p)
{
    return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
}

double population_quantile(DgpKind kind, double p)
{
    switch (kind) {
    case DgpKind::Normal: return standard_normal_quantile(p);
    case DgpKind::Exponential: return -std::log1p(-p);
    case DgpKind::Uniform: return p;
    case DgpKind::Beta10_2: return boost::math::quantile(boost::math::beta_distribution<double>(kBetaA, kBetaB), p);
    case DgpKind::LogNormal: return std::exp(standard_normal_quantile(p));
    case DgpKind::Laplace: return laplace_quantile(p);
    default: break;
    }
    throw std::invalid_argument("quantile not defined for this data-generating process");
}

double population_mean(DgpKind kind)
{
    switch (kind) {
    case DgpKind::Normal: return 0.0;
    case DgpKind::Exponential: return 1.0;
    case DgpKind::Uniform: return 0.5;
    case DgpKind::Beta10_2: return kBetaA / (kBetaA + kBetaB);
    case DgpKind::LogNormal: return std::exp(0.5);
    case DgpKind::Laplace: return 0.0;
    case DgpKind::Bernoulli05: return 0.5;
    case DgpKind::Bernoulli09: return 0.9;
    case DgpKind::BivariateNormal: break;
    }
    throw std::invalid_argument("mean not defined for the bivariate normal");
}

double population_std(DgpKind kind)
{
    switch (kind) {
    case DgpKind::Normal: return 1.0;
    case DgpKind::Exponential: return 1.0;
    case DgpKind::Uniform: return std::sqrt(1.0 / 12.0);
    case DgpKind::Beta10_2: {
        const double s = kBetaA + kBetaB;
        return std::sqrt(kBetaA * kBetaB / (s * s * (s + 1.0)));
    }
    case DgpKind::LogNormal: return std::sqrt((std::numbers::e - 1.0) * std::numbers::e);
    case DgpKind::Laplace: return std::numbers::sqrt2;
    default: break;
    }
    throw std::invalid_argument("std not defined for this data-generating process");
}

} // namespace

std::string_view to_string(DgpKind kind) noexcept
{
    switch (kind) {
    case DgpKind::Normal: return "normal";
    case DgpKind::Exponential: return "exponential";
    case DgpKind::Uniform: return "uniform";
    case DgpKind::Beta10_2: return "beta_10_2";
    case DgpKind::LogNormal: return "lognormal";
    case DgpKind::Laplace: return "laplace";
    case DgpKind::Bernoulli05: return "bernoulli_0.5";
    case DgpKind::Bernoulli09: return "bernoulli_0.9";
    case DgpKind::BivariateNormal: return "bvn";
    }
    return "?";
}

DgpSpec parse_dgp(std::string_view name)
{
    for (DgpKind k : kAllDgps)
        if (to_string(k) == name) return DgpSpec{k};
    throw std::invalid_argument("unknown data-generating process '" + std::string(name) + "'");
}

bool is_legal_pair(DgpSpec dgp, Functional f) noexcept
{
    if (dgp.is_bivariate() || f == Functional::Corr) return dgp.is_bivariate() && f == Functional::Corr;
    if (dgp.is_bernoulli()) return f == Functional::Mean;
    return true;
}

Sample draw_sample(DgpSpec dgp, std::size_t n, RngStream& stream)
{
    if (n == 0) throw std::invalid_argument("sample size must be positive");

    std::vector<double> x(n);
    switch (dgp.kind) {
    case DgpKind::Normal: {
        std::normal_distribution<double> dist(0.0, 1.0);
        for (double& v : x) v = dist(stream);
        break;
    }
    case DgpKind::Exponential: {
        std::exponential_distribution<double> dist(1.0);
        for (double& v : x) v = dist(stream);
        break;
    }
    case DgpKind::Uniform:
        for (double& v : x) v = stream.uniform_open();
        break;
    case DgpKind::Beta10_2: {
        std::gamma_distribution<double> ga(kBetaA, 1.0);
        std::gamma_distribution<double> gb(kBetaB, 1.0);
        for (double& v : x) {
            const double a = ga(stream);
            const double b = gb(stream);
            v = a / (a + b);
        }
        break;
    }
    case DgpKind::LogNormal: {
        std::lognormal_distribution<double> dist(0.0, 1.0);
        for (double& v : x) v = dist(stream);
        break;
    }
    case DgpKind::Laplace:
        for (double& v : x) v = laplace_quantile(stream.uniform_open());
        break;
    case DgpKind::Bernoulli05:
    case DgpKind::Bernoulli09: {
        const double p = dgp.kind == DgpKind::Bernoulli05 ? 0.5 : 0.9;
        for (double& v : x) v = stream.uniform_open() < p ? 1.0 : 0.0;
        break;
    }
    case DgpKind::BivariateNormal: {
        const double l11 = std::sqrt(kBvnVarX);
        const double l21 = kBvnCov / l11;
        const double l22 = std::sqrt(kBvnVarY - l21 * l21);
        std::normal_distribution<double> dist(0.0, 1.0);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double z1 = dist(stream);
            const double z2 = dist(stream);
            x[i] = kBvnMean + l11 * z1;
            y[i] = kBvnMean + l21 * z1 + l22 * z2;
        }
        return Sample::bivariate(std::move(x), std::move(y));
    }
    }
    return Sample::univariate(std::move(x));
}

double true_parameter(DgpSpec dgp, Functional f)
{
    if (!is_legal_pair(dgp, f))
        throw std::invalid_argument("functional '" + std::string(to_string(f)) + "' is not defined for '" +
                                    std::string(to_string(dgp.kind)) + "'");
    switch (f) {
    case Functional::Mean: return population_mean(dgp.kind);
    case Functional::Std: return population_std(dgp.kind);
    case Functional::Corr: return kBvnCov / std::sqrt(kBvnVarX * kBvnVarY);
    case Functional::Median:
    case Functional::Q05:
    case Functional::Q95: return population_quantile(dgp.kind, *quantile_level(f));
    }
    throw std::logic_error("unhandled functional");
}

} // namespace bootci
