#pragma once

#include "bootci/functionals.hpp"
#include "bootci/rng.hpp"
#include "bootci/sample.hpp"

#include <array>
#include <cstddef>
#include <string_view>

namespace bootci {

/// The nine data-generating processes of the simulation grid. Parameters are
/// fixed; there are no user-tunable distributions.
enum class DgpKind {
    Normal,          // N(0, 1)
    Exponential,     // rate 1
    Uniform,         // U(0, 1)
    Beta10_2,        // Beta(10, 2)
    LogNormal,       // meanlog 0, sdlog 1
    Laplace,         // location 0, scale 1
    Bernoulli05,     // p = 0.5
    Bernoulli09,     // p = 0.9
    BivariateNormal, // mean (1, 1), cov [[2, 0.5], [0.5, 1]]
};

struct DgpSpec {
    DgpKind kind;

    [[nodiscard]] bool is_bivariate() const noexcept { return kind == DgpKind::BivariateNormal; }
    [[nodiscard]] bool is_bernoulli() const noexcept
    {
        return kind == DgpKind::Bernoulli05 || kind == DgpKind::Bernoulli09;
    }
    bool operator==(const DgpSpec&) const = default;
};

inline constexpr std::array<DgpKind, 9> kAllDgps{
    DgpKind::Normal,  DgpKind::Exponential, DgpKind::Uniform,     DgpKind::Beta10_2,       DgpKind::LogNormal,
    DgpKind::Laplace, DgpKind::Bernoulli05, DgpKind::Bernoulli09, DgpKind::BivariateNormal};

/// Stable identifiers: normal, exponential, uniform, beta_10_2, lognormal,
/// laplace, bernoulli_0.5, bernoulli_0.9, bvn.
std::string_view to_string(DgpKind kind) noexcept;
DgpSpec parse_dgp(std::string_view name);

/// Grid legality: corr pairs only with the bivariate normal, and Bernoulli
/// only with the mean.
[[nodiscard]] bool is_legal_pair(DgpSpec dgp, Functional f) noexcept;

/// Draws n observations. The result depends only on (dgp, n, stream state).
/// Throws std::invalid_argument when n == 0.
Sample draw_sample(DgpSpec dgp, std::size_t n, RngStream& stream);

/// Population value of f under dgp. Throws std::invalid_argument for an
/// illegal pair.
double true_parameter(DgpSpec dgp, Functional f);

} // namespace bootci
