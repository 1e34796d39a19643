#pragma once

#include <boost/math/distributions/normal.hpp>

namespace bootci::detail {

inline double normal_cdf(double z)
{
    return boost::math::cdf(boost::math::normal_distribution<double>(), z);
}

/// Standard normal quantile; p must lie in (0, 1).
inline double normal_quantile(double p)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

} // namespace bootci::detail
