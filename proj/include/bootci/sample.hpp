#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bootci {

/// An observed dataset: either univariate values or paired (x, y) rows.
/// Bivariate rows are stored as two parallel columns.
class Sample {
public:
    static Sample univariate(std::vector<double> values);
    static Sample bivariate(std::vector<double> x, std::vector<double> y);

    [[nodiscard]] std::size_t size() const noexcept { return x_.size(); }
    [[nodiscard]] bool is_bivariate() const noexcept { return bivariate_; }

    /// Univariate values, or the first coordinate of bivariate rows.
    [[nodiscard]] std::span<const double> x() const noexcept { return x_; }
    /// Second coordinate; empty for univariate samples.
    [[nodiscard]] std::span<const double> y() const noexcept { return y_; }

    /// Applies v -> scale * v + shift to every coordinate.
    [[nodiscard]] Sample affine(double scale, double shift) const;

    bool operator==(const Sample&) const = default;

private:
    Sample(std::vector<double> x, std::vector<double> y, bool bivariate);

    std::vector<double> x_;
    std::vector<double> y_;
    bool bivariate_ = false;
};

} // namespace bootci
