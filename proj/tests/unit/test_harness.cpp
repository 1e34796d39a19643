#include "bootci/config.hpp"
#include "bootci/harness.hpp"
#include "bootci/results_io.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace bootci;
using Catch::Approx;

namespace {

AggregateRecord cell(Method m, double coverage, double alpha = 0.95)
{
    AggregateRecord a;
    a.method = m;
    a.alpha = alpha;
    a.n = 32;
    a.n_rep = 1000;
    a.coverage = coverage;
    a.kl = std::isnan(coverage) ? coverage : kl_coverage(coverage, alpha);
    return a;
}

const AggregateRecord& find(const std::vector<AggregateRecord>& aggs, Method m, double alpha, Side side)
{
    for (const auto& a : aggs)
        if (a.method == m && std::abs(a.alpha - alpha) < 1e-12 && a.side == side) return a;
    FAIL("cell not found");
    return aggs.front();
}

// Aggregates compare through their CSV form so NaN fields compare equal.
std::string csv(const std::vector<AggregateRecord>& aggs)
{
    std::ostringstream out;
    write_results(out, aggs);
    return out.str();
}

} // namespace

TEST_CASE("full grid has 1386 combinations")
{
    const auto plan = full_grid_plan();
    CHECK(plan.cells.size() == 33 * 7);
    CHECK(combination_count(plan) == 1386);
}

TEST_CASE("validate rejects malformed specs")
{
    ExperimentSpec s;
    s.methods = {Method::Percentile};
    CHECK_NOTHROW(validate(s));
    auto bad = s;
    bad.functional = Functional::Corr;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = s;
    bad.n = 2;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = s;
    bad.alphas = {1.0};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = s;
    bad.methods = {Method::ClopperPearson};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = s;
    bad.methods.clear();
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    CHECK(method_applies(Method::ClopperPearson, {DgpKind::Bernoulli05}, Functional::Mean));
    CHECK_FALSE(method_applies(Method::ClopperPearson, {DgpKind::Normal}, Functional::Mean));
}

TEST_CASE("constant Bernoulli samples are removed")
{
    ExperimentSpec s;
    s.dgp = {DgpKind::Bernoulli09};
    s.functional = Functional::Mean;
    s.n = 4;
    s.n_rep = 4000;
    s.B = 50;
    s.methods = {Method::Percentile, Method::ClopperPearson};
    s.alphas = {0.05, 0.95};
    s.seed = 11;
    const auto aggs = aggregate(run_cell(s), s.B);
    const double expected = std::pow(0.9, 4) + std::pow(0.1, 4);
    const double tol = 4 * std::sqrt(expected * (1 - expected) / 4000);
    for (const auto& a : aggs) CHECK(a.removed_rate == Approx(expected).margin(tol));
}

TEST_CASE("replication outcomes partition the cell")
{
    ExperimentSpec s;
    s.dgp = {DgpKind::Bernoulli05};
    s.functional = Functional::Mean;
    s.n = 4;
    s.n_rep = 300;
    s.B = 40;
    s.methods = {Method::BCa, Method::AgrestiCoull};
    s.seed = 2;
    const auto recs = run_cell(s);
    CHECK(recs.size() == 300 * 2 * 6);
    std::size_t removed = 0, failed = 0, scored = 0;
    for (const auto& r : recs) {
        CHECK(int(r.removed) + int(bool(r.failure)) + int(r.scored()) == 1);
        removed += r.removed;
        failed += bool(r.failure);
        scored += r.scored();
    }
    CHECK(removed + failed + scored == recs.size());
    for (const auto& a : aggregate(recs, s.B)) {
        if (a.side == Side::One) CHECK(a.n_rep == 300);
        if (!a.empty()) CHECK(a.coverage_se == Approx(std::sqrt(a.coverage * (1 - a.coverage) / a.n_rep_effective())));
    }
}

TEST_CASE("run_cell does not depend on the thread count")
{
    ExperimentSpec s;
    s.dgp = {DgpKind::Exponential};
    s.functional = Functional::Std;
    s.n = 16;
    s.n_rep = 40;
    s.B = 100;
    s.b_inner_bt = 10;
    s.b_inner_db = 20;
    s.methods = {Method::Percentile, Method::Smoothed, Method::BCa, Method::Studentized, Method::Double,
                 Method::ChiSquared};
    s.seed = 5;
    const auto one = aggregate(run_cell(s, 1), s.B);
    const auto four = aggregate(run_cell(s, 4), s.B);
    CHECK(csv(one) == csv(four));
}

TEST_CASE("adding a method does not change the others")
{
    ExperimentSpec s;
    s.dgp = {DgpKind::Normal};
    s.functional = Functional::Mean;
    s.n = 8;
    s.n_rep = 50;
    s.B = 60;
    s.methods = {Method::Percentile};
    const auto alone = aggregate(run_cell(s), s.B);
    s.methods = {Method::TTest, Method::Percentile, Method::Double};
    s.b_inner_db = 10;
    const auto mixed = aggregate(run_cell(s), s.B);
    for (const auto& a : alone) CHECK(csv({find(mixed, Method::Percentile, a.alpha, a.side)}) == csv({a}));
}

TEST_CASE("aggregate one-sided and two-sided cells")
{
    auto rec = [](std::size_t rep, double alpha, bool covered, double endpoint) {
        ReplicationRecord r{};
        r.dgp = {DgpKind::Normal};
        r.functional = Functional::Mean;
        r.n = 8;
        r.method = Method::Basic;
        r.alpha = alpha;
        r.replication = rep;
        r.endpoint = endpoint;
        r.covered = covered;
        r.exact = std::nan("");
        r.abs_dist = std::nan("");
        return r;
    };
    std::vector<ReplicationRecord> recs;
    for (std::size_t i = 0; i < 1000; ++i) {
        recs.push_back(rec(i, 0.05, i < 30, -1.0));
        recs.push_back(rec(i, 0.95, i < 950, 1.0));
    }
    const auto aggs = aggregate(recs, 100);
    REQUIRE(aggs.size() == 3);
    const auto& hi = find(aggs, Method::Basic, 0.95, Side::One);
    CHECK(hi.coverage == 0.95);
    CHECK(hi.kl == 0.0);
    CHECK(hi.B == 100);
    CHECK(std::isnan(hi.dist_norm));
    const auto& lo = find(aggs, Method::Basic, 0.05, Side::One);
    CHECK(lo.coverage == 0.03);
    const auto& two = find(aggs, Method::Basic, 0.9, Side::Two);
    CHECK(two.coverage == Approx(0.92));
    CHECK(two.fail_rate == 0.0);

    // Every replication covered: KL(1, pi) = -log2(pi).
    std::vector<ReplicationRecord> all;
    for (std::size_t i = 0; i < 10; ++i) all.push_back(rec(i, 0.95, true, 0.0));
    CHECK(aggregate(all, 1).front().kl == Approx(-std::log2(0.95)));

    // Crossed endpoints count as a two-sided failure.
    std::vector<ReplicationRecord> crossed{rec(0, 0.05, true, 2.0), rec(0, 0.95, true, 1.0)};
    const auto c = aggregate(crossed, 1);
    CHECK(find(c, Method::Basic, 0.9, Side::Two).fail_rate == 1.0);
    CHECK(find(c, Method::Basic, 0.9, Side::Two).empty());
}

TEST_CASE("meets_threshold examples")
{
    const ThresholdSet set;
    CHECK(meets_threshold(cell(Method::Percentile, 0.945), set, Threshold::Stringent));
    CHECK_FALSE(meets_threshold(cell(Method::Percentile, 0.88), set, Threshold::Liberal));
    CHECK(meets_threshold(cell(Method::Percentile, 0.93), set, Threshold::Liberal));
    CHECK_FALSE(meets_threshold(cell(Method::Percentile, std::nan("")), set, Threshold::VeryLiberal));
}

TEST_CASE("compare_methods applies the outperformance rule")
{
    const std::vector<AggregateRecord> a{cell(Method::Double, 0.948)};
    const std::vector<AggregateRecord> b{cell(Method::Percentile, 0.90)};
    auto v = compare_methods(a, b);
    REQUIRE(v.size() == 1);
    CHECK(v[0].a_beats_b);
    CHECK_FALSE(v[0].b_beats_a);

    // B meets the criterion: no outperformance either way.
    v = compare_methods(a, {cell(Method::Percentile, 0.94)});
    CHECK_FALSE(v[0].a_beats_b);
    CHECK_FALSE(v[0].b_beats_a);

    // B misses but A is not five times better.
    v = compare_methods({cell(Method::Double, 0.91)}, b);
    CHECK_FALSE(v[0].a_beats_b);

    // B produced nothing.
    v = compare_methods({cell(Method::Double, 0.5)}, {cell(Method::Percentile, std::nan(""))});
    CHECK(v[0].a_beats_b);
    CHECK_FALSE(v[0].b_beats_a);

    auto other = cell(Method::Percentile, 0.9);
    other.n = 64;
    CHECK_THROWS_AS(compare_methods(a, {other}), std::invalid_argument);
}

TEST_CASE("key order")
{
    auto x = cell(Method::Percentile, 0.9);
    auto y = x;
    y.method = Method::BCa;
    CHECK(key_less(y, x));
    y = x;
    y.n = 128;
    CHECK(key_less(x, y)); // numeric, so 32 sorts before 128
    y = x;
    y.dgp = {DgpKind::Bernoulli05};
    CHECK(key_less(y, x));
    CHECK(parse_side("two") == Side::Two);
    CHECK(to_string(Side::One) == "one");
}

TEST_CASE("estimate_endpoints for a user sample")
{
    const auto s = Sample::univariate({2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 4.0});
    const std::vector<double> alphas{0.05, 0.95};
    const auto t = estimate_endpoints(s, Functional::Mean, Method::TTest, alphas);
    REQUIRE(t.size() == 2);
    const std::vector<double> v(s.x().begin(), s.x().end());
    CHECK(*t[1].value == Approx(oracle::mean(v) + oracle::t_quantile(0.95, 7) * oracle::sd(v) / std::sqrt(8.0)));

    EstimateOptions opt;
    opt.seed = 3;
    opt.b_inner_db = 50;
    for (Method m : kBootstrapMethods) {
        const auto e = estimate_endpoints(s, Functional::Mean, m, alphas, opt);
        REQUIRE(e.size() == 2);
        REQUIRE(e[0].value);
        REQUIRE(e[1].value);
        CHECK(*e[0].value < *e[1].value);
        CHECK(*estimate_endpoints(s, Functional::Mean, m, alphas, opt)[1].value == *e[1].value);
    }
    CHECK_THROWS_AS(estimate_endpoints(s, Functional::Mean, Method::Fisher, alphas), std::invalid_argument);
}
