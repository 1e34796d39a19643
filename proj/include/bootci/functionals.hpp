#pragma once

#include "bootci/outcome.hpp"
#include "bootci/sample.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace bootci {

enum class Functional { Mean, Median, Std, Q05, Q95, Corr };

inline constexpr std::array<Functional, 6> kAllFunctionals{
    Functional::Mean, Functional::Median, Functional::Std,
    Functional::Q05,  Functional::Q95,    Functional::Corr};

/// Stable identifiers: mean, median, std, q05, q95, corr.
std::string_view to_string(Functional f) noexcept;
Functional parse_functional(std::string_view name);

[[nodiscard]] constexpr bool requires_bivariate(Functional f) noexcept { return f == Functional::Corr; }

/// Probability level for quantile functionals (median counts as Q(0.5)).
[[nodiscard]] std::optional<double> quantile_level(Functional f) noexcept;

/// Smallest sample size on which the plug-in estimator is defined.
[[nodiscard]] std::size_t minimum_sample_size(Functional f) noexcept;

/// Plug-in estimate of f on s. std uses the n-1 denominator, corr is the
/// Pearson correlation, quantiles use quantile_mu.
///
/// Throws std::invalid_argument on an arity mismatch or when s is smaller
/// than minimum_sample_size(f). Returns FailureReason::DegenerateEstimate
/// when corr meets a zero-variance coordinate.
Outcome<double> evaluate(Functional f, const Sample& s);

/// evaluate() on raw columns, without validation. y is ignored unless f is
/// corr. Quantile functionals reorder x.
Outcome<double> evaluate_in_place(Functional f, std::span<double> x, std::span<const double> y);

/// Median-unbiased sample quantile (Hyndman-Fan type 8) of an ascending
/// range: h = (n + 1/3) p + 1/3 clamped to [1, n], then linear interpolation
/// between the order statistics at floor(h) and floor(h) + 1.
double quantile_mu(std::span<const double> sorted, double p);

/// quantile_mu on an unsorted range, via partial selection. Reorders values.
double select_quantile_mu(std::span<double> values, double p);

} // namespace bootci
