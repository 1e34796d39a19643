#include "bootci/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bootci {

namespace {

void require_finite(const std::vector<double>& v)
{
    if (!std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); }))
        throw std::invalid_argument("sample contains non-finite values");
}

} // namespace

Sample::Sample(std::vector<double> x, std::vector<double> y, bool bivariate)
    : x_(std::move(x)), y_(std::move(y)), bivariate_(bivariate)
{
}

Sample Sample::univariate(std::vector<double> values)
{
    if (values.empty()) throw std::invalid_argument("sample must contain at least one value");
    require_finite(values);
    return Sample(std::move(values), {}, false);
}

Sample Sample::bivariate(std::vector<double> x, std::vector<double> y)
{
    if (x.empty()) throw std::invalid_argument("sample must contain at least one row");
    if (x.size() != y.size()) throw std::invalid_argument("bivariate columns differ in length");
    require_finite(x);
    require_finite(y);
    return Sample(std::move(x), std::move(y), true);
}

Sample Sample::affine(double scale, double shift) const
{
    auto map = [&](std::vector<double> v) {
        for (double& d : v) d = scale * d + shift;
        return v;
    };
    return Sample(map(x_), map(y_), bivariate_);
}

} // namespace bootci
