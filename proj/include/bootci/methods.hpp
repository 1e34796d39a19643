#pragma once

#include "bootci/functionals.hpp"

#include <array>
#include <string_view>

namespace bootci {

/// Every confidence-interval method known to the library: the eight
/// bootstrap methods followed by the nine classical baselines.
enum class Method {
    // bootstrap
    Percentile,     // pb
    Normal,         // bn
    Basic,          // bb
    Smoothed,       // sb
    BiasCorrected,  // bc
    BCa,            // bca
    Studentized,    // bt
    Double,         // db
    // baselines
    TTest,          // t_test
    ClopperPearson, // cp
    AgrestiCoull,   // ac
    Wilcoxon,       // wilcoxon
    ChiSquared,     // chi_sq
    Fisher,         // fisher
    QuantileParametric,    // q_par
    QuantileNonparametric, // q_nonpar
    MaritzJarrett,  // mj
};

inline constexpr std::array<Method, 8> kBootstrapMethods{
    Method::Percentile,    Method::Normal, Method::Basic,       Method::Smoothed,
    Method::BiasCorrected, Method::BCa,    Method::Studentized, Method::Double};

inline constexpr std::array<Method, 9> kBaselineMethods{
    Method::TTest,      Method::ClopperPearson,     Method::AgrestiCoull,
    Method::Wilcoxon,   Method::ChiSquared,         Method::Fisher,
    Method::QuantileParametric, Method::QuantileNonparametric, Method::MaritzJarrett};

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view id);

[[nodiscard]] constexpr bool is_bootstrap(Method m) noexcept { return m <= Method::Double; }

/// Bootstrap methods apply to every functional; each baseline applies only to
/// the functionals it was designed for.
[[nodiscard]] bool method_applies(Method m, Functional f) noexcept;

} // namespace bootci
