#include "bootci/results_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bootci {

namespace {

std::string format_real(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_real(std::string_view s)
{
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad number '" + std::string(s) + "'");
    return v;
}

std::size_t parse_count(std::string_view s)
{
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad count '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

void write_results(std::ostream& out, std::vector<AggregateRecord> aggs)
{
    std::stable_sort(aggs.begin(), aggs.end(), key_less);
    out << kResultsHeader << '\n';
    for (const auto& a : aggs) {
        out << to_string(a.dgp.kind) << ',' << to_string(a.functional) << ',' << a.n << ',' << format_real(a.alpha)
            << ',' << to_string(a.side) << ',' << to_string(a.method) << ',' << a.B << ',' << a.n_rep << ','
            << format_real(a.coverage) << ',' << format_real(a.coverage_se) << ',' << format_real(a.kl) << ','
            << format_real(a.dist_norm) << ',' << format_real(a.fail_rate) << ',' << format_real(a.removed_rate)
            << '\n';
    }
}

void emit_results(const std::vector<AggregateRecord>& aggs, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_results(out, aggs);
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<AggregateRecord> read_results(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("results file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kResultsHeader) throw std::invalid_argument("unexpected results header");

    std::vector<AggregateRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 14)
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 14 fields");
        try {
            AggregateRecord a;
            a.dgp = parse_dgp(f[0]);
            a.functional = parse_functional(f[1]);
            a.n = parse_count(f[2]);
            a.alpha = parse_real(f[3]);
            a.side = parse_side(f[4]);
            a.method = parse_method(f[5]);
            a.B = parse_count(f[6]);
            a.n_rep = parse_count(f[7]);
            a.coverage = parse_real(f[8]);
            a.coverage_se = parse_real(f[9]);
            a.kl = parse_real(f[10]);
            a.dist_norm = parse_real(f[11]);
            a.fail_rate = parse_real(f[12]);
            a.removed_rate = parse_real(f[13]);
            out.push_back(a);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<AggregateRecord> load_results(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return read_results(in);
}

} // namespace bootci
