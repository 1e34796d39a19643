#pragma once

#include "bootci/bootstrap.hpp"
#include "bootci/functionals.hpp"
#include "bootci/methods.hpp"
#include "bootci/sample.hpp"

#include <cstdint>
#include <vector>

namespace bootci {

/// One-sided endpoint of a classical (non-bootstrap) method: the upper limit of
/// (-inf, endpoint] at level alpha. Endpoints for alpha < 0.5 are lower
/// confidence bounds at level 1 - alpha of the same construction.
///
///   t_test          mean    xbar + t(alpha; n-1) s / sqrt(n)
///   cp              mean    Clopper-Pearson beta quantile (0/1 data)
///   ac              mean    Agresti-Coull adjusted Wald bound (0/1 data)
///   wilcoxon        median  Walsh-average order statistic from the signed-rank law
///   chi_sq          std     sqrt((n-1) s^2 / chi2(1 - alpha; n-1))
///   fisher          corr    tanh(atanh(r) + z_alpha / sqrt(n - 3))
///   q_par           Q(p)    normal-theory quantile bound
///   q_nonpar        Q(p)    binomial order-statistic bound
///   mj              Q(p)    quantile_mu + z_alpha * Maritz-Jarrett standard error
///
/// Throws std::invalid_argument when the method does not apply to f or the
/// sample arity is wrong.
EndpointEstimate baseline_endpoint(Method m, const Sample& s, Functional f, double alpha);

/// Null distribution function of the Wilcoxon signed-rank statistic T+:
/// cdf[k] = P(T+ <= k), k = 0 .. n(n+1)/2. Exact by dynamic programming.
std::vector<double> signed_rank_cdf(std::size_t n);

/// 1-based index j of the Walsh average used as the wilcoxon endpoint, or 0
/// when no order statistic reaches level alpha.
std::size_t wilcoxon_rank(std::size_t n, double alpha);

/// 1-based order statistic r used by q_nonpar: the smallest r <= n with
/// P(Binomial(n, p) < r) >= alpha, or 0 when none exists.
std::size_t nonparametric_quantile_rank(std::size_t n, double p, double alpha);

/// Maritz-Jarrett standard error of the p-quantile, or DegenerateWeights when
/// the beta weight parameters are not both positive.
Outcome<double> maritz_jarrett_se(std::span<const double> sorted, double p);

} // namespace bootci
