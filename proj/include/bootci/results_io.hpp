#pragma once

#include "bootci/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bootci {

/// I/O failure with the offending path in the message.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kResultsHeader =
    "dgp,functional,n,alpha,side,method,B,n_rep,coverage,coverage_se,kl,dist_norm,fail_rate,removed_rate";

/// Writes one row per aggregate in key_less order. Reals use the shortest
/// representation that round-trips (at most 17 significant digits).
void write_results(std::ostream& out, std::vector<AggregateRecord> aggs);
void emit_results(const std::vector<AggregateRecord>& aggs, const std::filesystem::path& path);

/// Throws std::invalid_argument on malformed input.
std::vector<AggregateRecord> read_results(std::istream& in);
std::vector<AggregateRecord> load_results(const std::filesystem::path& path);

} // namespace bootci
