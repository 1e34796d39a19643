#include "bootci/methods.hpp"

#include <stdexcept>
#include <string>

namespace bootci {

std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::Percentile: return "pb";
    case Method::Normal: return "bn";
    case Method::Basic: return "bb";
    case Method::Smoothed: return "sb";
    case Method::BiasCorrected: return "bc";
    case Method::BCa: return "bca";
    case Method::Studentized: return "bt";
    case Method::Double: return "db";
    case Method::TTest: return "t_test";
    case Method::ClopperPearson: return "cp";
    case Method::AgrestiCoull: return "ac";
    case Method::Wilcoxon: return "wilcoxon";
    case Method::ChiSquared: return "chi_sq";
    case Method::Fisher: return "fisher";
    case Method::QuantileParametric: return "q_par";
    case Method::QuantileNonparametric: return "q_nonpar";
    case Method::MaritzJarrett: return "mj";
    }
    return "?";
}

Method parse_method(std::string_view id)
{
    for (Method m : kBootstrapMethods)
        if (to_string(m) == id) return m;
    for (Method m : kBaselineMethods)
        if (to_string(m) == id) return m;
    throw std::invalid_argument("unknown method '" + std::string(id) + "'");
}

bool method_applies(Method m, Functional f) noexcept
{
    switch (m) {
    case Method::TTest:
    case Method::ClopperPearson:
    case Method::AgrestiCoull: return f == Functional::Mean;
    case Method::Wilcoxon: return f == Functional::Median;
    case Method::ChiSquared: return f == Functional::Std;
    case Method::Fisher: return f == Functional::Corr;
    case Method::QuantileParametric:
    case Method::QuantileNonparametric:
    case Method::MaritzJarrett: return quantile_level(f).has_value();
    default: return true;
    }
}

} // namespace bootci

namespace bootci {

std::string_view to_string(FailureReason reason) noexcept
{
    switch (reason) {
    case FailureReason::EmptyDistribution: return "empty bootstrap distribution";
    case FailureReason::TooFewEstimates: return "too few valid estimates";
    case FailureReason::DegenerateEstimate: return "functional undefined on the sample";
    case FailureReason::InfiniteBiasCorrection: return "infinite bias correction";
    case FailureReason::ZeroJackknifeVariance: return "zero jackknife variance";
    case FailureReason::ZeroDenominator: return "zero denominator in adjusted level";
    case FailureReason::ZeroSpread: return "zero studentizing scale";
    case FailureReason::NoAdmissibleOrderStatistic: return "no admissible order statistic";
    case FailureReason::DegenerateWeights: return "degenerate beta weights";
    case FailureReason::TooFewObservations: return "too few observations";
    case FailureReason::CrossedEndpoints: return "crossed endpoints";
    case FailureReason::NonFiniteResult: return "non-finite result";
    }
    return "unknown failure";
}

} // namespace bootci
