#pragma once

#include <stdexcept>
#include <string_view>
#include <utility>
#include <variant>

namespace bootci {

/// Why a method produced no endpoint. These are expected outcomes of a
/// simulation (small n, discrete data), not programming errors, so they are
/// carried as values rather than thrown.
enum class FailureReason {
    EmptyDistribution,       // no valid bootstrap estimates
    TooFewEstimates,         // fewer than two valid estimates where a spread is needed
    DegenerateEstimate,      // functional undefined on the sample (zero variance corr)
    InfiniteBiasCorrection,  // bias fraction of 0 or 1
    ZeroJackknifeVariance,   // acceleration undefined
    ZeroDenominator,         // BCa level denominator vanished
    ZeroSpread,              // studentizing scale is zero
    NoAdmissibleOrderStatistic,
    DegenerateWeights,       // Maritz-Jarrett beta weights undefined
    TooFewObservations,
    CrossedEndpoints,
    NonFiniteResult,
};

std::string_view to_string(FailureReason reason) noexcept;

/// Either a value or a FailureReason.
template <typename T>
class Outcome {
public:
    Outcome(T value) : state_(std::move(value)) {}            // NOLINT(google-explicit-constructor)
    Outcome(FailureReason reason) : state_(reason) {}          // NOLINT(google-explicit-constructor)

    [[nodiscard]] bool ok() const noexcept { return std::holds_alternative<T>(state_); }
    explicit operator bool() const noexcept { return ok(); }

    [[nodiscard]] const T& value() const&
    {
        if (!ok()) throw std::logic_error("Outcome::value() on failure");
        return std::get<T>(state_);
    }
    [[nodiscard]] T&& value() &&
    {
        if (!ok()) throw std::logic_error("Outcome::value() on failure");
        return std::get<T>(std::move(state_));
    }
    const T& operator*() const& { return value(); }
    const T* operator->() const { return &value(); }

    [[nodiscard]] FailureReason failure() const
    {
        if (ok()) throw std::logic_error("Outcome::failure() on success");
        return std::get<FailureReason>(state_);
    }

private:
    std::variant<T, FailureReason> state_;
};

} // namespace bootci
