#include "bootci/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bootci {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fixed(double v, int decimals)
{
    if (std::isnan(v)) return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
    void add(double v)
    {
        sum += v;
        ++count;
    }
    [[nodiscard]] double mean() const { return count ? sum / static_cast<double>(count) : kNaN; }
};

} // namespace

TableKind parse_table_kind(std::string_view name)
{
    if (name == "kl") return TableKind::Kl;
    if (name == "threshold") return TableKind::Threshold;
    if (name == "distance") return TableKind::Distance;
    throw std::invalid_argument("table must be kl, threshold or distance");
}

SummaryTable summarize(const std::vector<AggregateRecord>& aggs, TableKind kind, Side side, Threshold criterion,
                       const ThresholdSet& set)
{
    std::set<std::size_t> sizes;
    std::set<Functional> functionals;
    std::set<Method> methods;
    for (const auto& a : aggs) {
        if (a.side != side) continue;
        sizes.insert(a.n);
        functionals.insert(a.functional);
        methods.insert(a.method);
    }

    SummaryTable table;
    table.columns.push_back("all");
    for (std::size_t n : sizes) table.columns.push_back(std::to_string(n));
    for (Functional f : functionals) table.columns.emplace_back(to_string(f));
    const auto column_of_n = [&](std::size_t n) {
        return 1 + static_cast<std::size_t>(std::distance(sizes.begin(), sizes.find(n)));
    };
    const auto column_of_f = [&](Functional f) {
        return 1 + sizes.size() + static_cast<std::size_t>(std::distance(functionals.begin(), functionals.find(f)));
    };

    for (Method m : methods) {
        std::vector<Acc> acc(table.columns.size());
        for (const auto& a : aggs) {
            if (a.side != side || a.method != m) continue;
            double v = kNaN;
            switch (kind) {
            case TableKind::Kl: v = a.empty() ? kNaN : a.kl; break;
            case TableKind::Threshold: v = meets_threshold(a, set, criterion) ? 0.0 : 1.0; break;
            case TableKind::Distance: v = a.dist_norm; break;
            }
            if (std::isnan(v)) continue;
            for (std::size_t c : {std::size_t{0}, column_of_n(a.n), column_of_f(a.functional)}) acc[c].add(v);
        }
        SummaryTable::Row row{m, {}};
        for (const auto& x : acc) row.values.push_back(x.mean());
        table.rows.push_back(std::move(row));
    }
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const auto& l, const auto& r) {
        const double a = std::isnan(l.values[0]) ? std::numeric_limits<double>::infinity() : l.values[0];
        const double b = std::isnan(r.values[0]) ? std::numeric_limits<double>::infinity() : r.values[0];
        return a < b;
    });
    return table;
}

std::string render(const SummaryTable& table, int decimals)
{
    std::vector<double> best(table.columns.size(), std::numeric_limits<double>::infinity());
    for (const auto& row : table.rows)
        for (std::size_t c = 0; c < row.values.size(); ++c)
            if (!std::isnan(row.values[c])) best[c] = std::min(best[c], row.values[c]);

    std::vector<std::vector<std::string>> cells;
    cells.push_back({"method"});
    for (const auto& c : table.columns) cells.back().push_back(c);
    for (const auto& row : table.rows) {
        cells.push_back({std::string(to_string(row.method))});
        for (std::size_t c = 0; c < row.values.size(); ++c) {
            std::string s = fixed(row.values[c], decimals);
            if (!std::isnan(row.values[c]) && fixed(row.values[c], decimals) == fixed(best[c], decimals)) s += '*';
            cells.back().push_back(s);
        }
    }
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& line : cells)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());

    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c == 0) {
                out << line[c] << std::string(width[c] - line[c].size(), ' ');
            } else {
                out << "  " << std::string(width[c] - line[c].size(), ' ') << line[c];
            }
        }
        out << '\n';
    }
    return out.str();
}

ComparisonSummary compare_summary(const std::vector<AggregateRecord>& aggs, Method a, Method b, Side side,
                                  Threshold criterion, const ThresholdSet& set)
{
    using Key = std::tuple<int, int, std::size_t, double>;
    const auto key = [](const AggregateRecord& r) {
        return Key{static_cast<int>(r.dgp.kind), static_cast<int>(r.functional), r.n, r.alpha};
    };
    std::map<Key, const AggregateRecord*> in_a, in_b;
    for (const auto& r : aggs) {
        if (r.side != side) continue;
        if (r.method == a) in_a[key(r)] = &r;
        if (r.method == b) in_b[key(r)] = &r;
    }
    std::vector<AggregateRecord> sel_a, sel_b;
    for (const auto& [k, r] : in_a) {
        const auto it = in_b.find(k);
        if (it == in_b.end()) continue;
        sel_a.push_back(*r);
        sel_b.push_back(*it->second);
    }

    ComparisonSummary out{a, b, {}, 0, 0, 0};
    std::map<std::pair<std::size_t, Functional>, ComparisonRow> rows;
    for (const CellVerdict& v : compare_methods(sel_a, sel_b, criterion, set)) {
        auto& row = rows.try_emplace({v.n, v.functional}, ComparisonRow{v.n, v.functional}).first->second;
        ++row.cells;
        ++out.cells;
        if (v.a_beats_b) {
            ++row.a_beats_b;
            ++out.a_beats_b;
        }
        if (v.b_beats_a) {
            ++row.b_beats_a;
            ++out.b_beats_a;
        }
    }
    for (auto& [k, row] : rows) out.rows.push_back(row);
    return out;
}

std::string render(const ComparisonSummary& s)
{
    const std::string an(to_string(s.a));
    const std::string bn(to_string(s.b));
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%5s  %-10s  %6s  %12s  %12s\n", "n", "functional", "cells", (an + " >> " + bn).c_str(),
                  (bn + " >> " + an).c_str());
    out << buf;
    for (const auto& r : s.rows) {
        std::snprintf(buf, sizeof buf, "%5zu  %-10s  %6zu  %12zu  %12zu\n", r.n, std::string(to_string(r.functional)).c_str(),
                      r.cells, r.a_beats_b, r.b_beats_a);
        out << buf;
    }
    const double total = static_cast<double>(std::max<std::size_t>(s.cells, 1));
    std::snprintf(buf, sizeof buf, "%5s  %-10s  %6zu  %12zu  %12zu\n", "all", "", s.cells, s.a_beats_b, s.b_beats_a);
    out << buf;
    std::snprintf(buf, sizeof buf, "%s outperforms %s in %.1f%% of cells; %s outperforms %s in %.1f%%\n", an.c_str(),
                  bn.c_str(), 100.0 * static_cast<double>(s.a_beats_b) / total, bn.c_str(), an.c_str(),
                  100.0 * static_cast<double>(s.b_beats_a) / total);
    out << buf;
    return out.str();
}

} // namespace bootci
