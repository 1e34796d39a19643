#include "bootci/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace bootci {

namespace {

double mean_of(std::span<const double> v)
{
    double sum = 0.0;
    for (double d : v) sum += d;
    return sum / static_cast<double>(v.size());
}

bool all_equal(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [first = v.front()](double d) { return d == first; });
}

double std_of(std::span<const double> v)
{
    if (all_equal(v)) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double d : v) ss += (d - m) * (d - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Outcome<double> corr_of(std::span<const double> x, std::span<const double> y)
{
    if (all_equal(x) || all_equal(y)) return FailureReason::DegenerateEstimate;
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return FailureReason::DegenerateEstimate;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// 1-based position h of the type-8 estimator, clamped to [1, n].
double type8_position(std::size_t n, double p)
{
    const double h = (static_cast<double>(n) + 1.0 / 3.0) * p + 1.0 / 3.0;
    return std::clamp(h, 1.0, static_cast<double>(n));
}

void check_probability(double p)
{
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability outside [0, 1]");
}

} // namespace

std::string_view to_string(Functional f) noexcept
{
    switch (f) {
    case Functional::Mean: return "mean";
    case Functional::Median: return "median";
    case Functional::Std: return "std";
    case Functional::Q05: return "q05";
    case Functional::Q95: return "q95";
    case Functional::Corr: return "corr";
    }
    return "?";
}

Functional parse_functional(std::string_view name)
{
    for (Functional f : kAllFunctionals)
        if (to_string(f) == name) return f;
    throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

std::optional<double> quantile_level(Functional f) noexcept
{
    switch (f) {
    case Functional::Median: return 0.5;
    case Functional::Q05: return 0.05;
    case Functional::Q95: return 0.95;
    default: return std::nullopt;
    }
}

std::size_t minimum_sample_size(Functional f) noexcept
{
    return (f == Functional::Std || f == Functional::Corr) ? 2 : 1;
}

Outcome<double> evaluate(Functional f, const Sample& s)
{
    if (requires_bivariate(f) != s.is_bivariate())
        throw std::invalid_argument("functional '" + std::string(to_string(f)) + "' does not match sample arity");
    if (s.size() < minimum_sample_size(f))
        throw std::invalid_argument("sample too small for functional '" + std::string(to_string(f)) + "'");

    if (const auto p = quantile_level(f)) {
        std::vector<double> copy(s.x().begin(), s.x().end());
        return select_quantile_mu(copy, *p);
    }
    switch (f) {
    case Functional::Mean: return mean_of(s.x());
    case Functional::Std: return std_of(s.x());
    case Functional::Corr: return corr_of(s.x(), s.y());
    default: break;
    }
    throw std::logic_error("unhandled functional");
}

Outcome<double> evaluate_in_place(Functional f, std::span<double> x, std::span<const double> y)
{
    switch (f) {
    case Functional::Mean: return mean_of(x);
    case Functional::Std: return std_of(x);
    case Functional::Corr: return corr_of(x, y);
    case Functional::Median: return select_quantile_mu(x, 0.5);
    case Functional::Q05: return select_quantile_mu(x, 0.05);
    case Functional::Q95: return select_quantile_mu(x, 0.95);
    }
    throw std::logic_error("unhandled functional");
}

double quantile_mu(std::span<const double> sorted, double p)
{
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty vector");
    check_probability(p);
    const std::size_t n = sorted.size();
    const double h = type8_position(n, p);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    const double a = sorted[lo - 1];
    const double b = sorted[lo];
    return frac == 0.0 ? a : a + frac * (b - a);
}

double select_quantile_mu(std::span<double> values, double p)
{
    if (values.empty()) throw std::invalid_argument("quantile of an empty vector");
    check_probability(p);
    const std::size_t n = values.size();
    const double h = type8_position(n, p);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    auto nth = values.begin() + static_cast<std::ptrdiff_t>(lo - 1);
    std::nth_element(values.begin(), nth, values.end());
    const double a = *nth;
    if (lo >= n) return a;
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) return a;
    const double b = *std::min_element(nth + 1, values.end());
    return a + frac * (b - a);
}

} // namespace bootci
