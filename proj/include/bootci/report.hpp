#pragma once

#include "bootci/harness.hpp"

#include <string>
#include <vector>

namespace bootci {

enum class TableKind { Kl, Threshold, Distance };
TableKind parse_table_kind(std::string_view name);

/// One row per method, one column for all cells, then one per sample size
/// and one per functional. Rows are ordered by the "all" column; the best
/// value in each column is marked with '*'.
///   kl         mean KL of the non-empty cells
///   threshold  share of cells that miss `criterion` (empty cells miss)
///   distance   mean normalized distance from the exact endpoint
struct SummaryTable {
    std::vector<std::string> columns;
    struct Row {
        Method method;
        std::vector<double> values; // NaN where a group has no usable cell
    };
    std::vector<Row> rows;
};

SummaryTable summarize(const std::vector<AggregateRecord>& aggs, TableKind kind, Side side,
                       Threshold criterion = Threshold::Liberal, const ThresholdSet& set = {});
std::string render(const SummaryTable& table, int decimals = 3);

/// Outperformance counts of method a against method b per (n, functional),
/// over the cells both methods were evaluated on.
struct ComparisonRow {
    std::size_t n;
    Functional functional;
    std::size_t cells = 0;
    std::size_t a_beats_b = 0;
    std::size_t b_beats_a = 0;
};

struct ComparisonSummary {
    Method a;
    Method b;
    std::vector<ComparisonRow> rows;
    std::size_t cells = 0;
    std::size_t a_beats_b = 0;
    std::size_t b_beats_a = 0;
};

ComparisonSummary compare_summary(const std::vector<AggregateRecord>& aggs, Method a, Method b, Side side,
                                  Threshold criterion = Threshold::Liberal, const ThresholdSet& set = {});
std::string render(const ComparisonSummary& summary);

} // namespace bootci
