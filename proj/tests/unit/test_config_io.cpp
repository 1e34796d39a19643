#include "bootci/config.hpp"
#include "bootci/results_io.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace bootci;

namespace {

ExperimentPlan plan_of(const std::string& text)
{
    std::istringstream in(text);
    return parse_plan(in);
}

AggregateRecord record(DgpKind d, Functional f, std::size_t n, double alpha, Side side, Method m)
{
    AggregateRecord a;
    a.dgp = {d};
    a.functional = f;
    a.n = n;
    a.alpha = alpha;
    a.side = side;
    a.method = m;
    a.B = 1000;
    a.n_rep = 2000;
    a.coverage = 0.1 + alpha * 0.8;
    a.coverage_se = std::sqrt(a.coverage * (1 - a.coverage) / 2000);
    a.kl = 1.0 / 3.0 * alpha;
    a.dist_norm = std::numeric_limits<double>::quiet_NaN();
    a.fail_rate = 0.0123456789012345678;
    a.removed_rate = 2.0 / 7.0;
    return a;
}

bool same_bits(double x, double y)
{
    return (std::isnan(x) && std::isnan(y)) || x == y;
}

} // namespace

TEST_CASE("results CSV round-trips exactly")
{
    std::vector<AggregateRecord> aggs{
        record(DgpKind::Normal, Functional::Mean, 128, 0.975, Side::One, Method::Double),
        record(DgpKind::Bernoulli09, Functional::Mean, 4, 0.05, Side::One, Method::ClopperPearson),
        record(DgpKind::BivariateNormal, Functional::Corr, 16, 0.9, Side::Two, Method::BCa),
    };
    aggs[0].kl = 0.1 + 0.2;
    aggs[1].coverage = std::nextafter(0.95, 1.0);
    std::ostringstream out;
    write_results(out, aggs);
    const std::string text = out.str();
    CHECK(text.rfind(std::string(kResultsHeader) + "\n", 0) == 0);

    std::istringstream in(text);
    const auto back = read_results(in);
    REQUIRE(back.size() == 3);
    // Rows come back in key order: bernoulli_0.9 < bvn < normal.
    CHECK(back[0].dgp.kind == DgpKind::Bernoulli09);
    CHECK(back[1].dgp.kind == DgpKind::BivariateNormal);
    CHECK(back[2].dgp.kind == DgpKind::Normal);
    for (const auto& b : back) {
        const auto it = std::find_if(aggs.begin(), aggs.end(), [&](const auto& a) { return a.dgp == b.dgp; });
        REQUIRE(it != aggs.end());
        CHECK(b.functional == it->functional);
        CHECK(b.n == it->n);
        CHECK(b.side == it->side);
        CHECK(b.method == it->method);
        CHECK(b.B == it->B);
        CHECK(b.n_rep == it->n_rep);
        for (auto field : {&AggregateRecord::alpha, &AggregateRecord::coverage, &AggregateRecord::coverage_se,
                           &AggregateRecord::kl, &AggregateRecord::dist_norm, &AggregateRecord::fail_rate,
                           &AggregateRecord::removed_rate})
            CHECK(same_bits(b.*field, (*it).*field));
    }
    std::ostringstream again;
    write_results(again, back);
    CHECK(again.str() == text);
}

TEST_CASE("results CSV rejects malformed input")
{
    const std::string header(kResultsHeader);
    std::istringstream only_header(header + "\n");
    CHECK(read_results(only_header).empty());
    std::istringstream empty("");
    CHECK_THROWS_AS(read_results(empty), std::invalid_argument);
    std::istringstream wrong_header("a,b,c\n");
    CHECK_THROWS_AS(read_results(wrong_header), std::invalid_argument);
    std::istringstream short_row(header + "\nnormal,mean,8\n");
    CHECK_THROWS_AS(read_results(short_row), std::invalid_argument);
    std::istringstream bad_number(header + "\nnormal,mean,8,0.95,one,pb,10,10,x,0,0,nan,0,0\n");
    CHECK_THROWS_AS(read_results(bad_number), std::invalid_argument);
    CHECK_THROWS_AS(load_results("/nonexistent/results.csv"), IoError);
}

TEST_CASE("emit_results writes a file")
{
    const auto path = std::filesystem::temp_directory_path() / "bootci_results_test.csv";
    emit_results({record(DgpKind::Uniform, Functional::Q95, 8, 0.25, Side::One, Method::Percentile)}, path);
    const auto back = load_results(path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].functional == Functional::Q95);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(emit_results({}, "/nonexistent/dir/out.csv"), IoError);
}

TEST_CASE("plan expansion")
{
    const auto plan = plan_of(R"({
        // comments are allowed
        "dgp": ["normal", "bernoulli_0.5", "bvn"],
        "functional": ["mean", "corr"],
        "n": [8, 16],
        "alphas": [0.05, 0.95],
        "methods": ["pb", "t_test", "cp", "fisher"],
        "B": 200,
        "n_rep": 10,
        "seed": 42
    })");
    // normal/mean, bernoulli/mean, bvn/corr at two sizes each
    REQUIRE(plan.cells.size() == 6);
    CHECK(plan.seed == 42);
    CHECK_FALSE(plan.exact);
    for (const auto& c : plan.cells) {
        CHECK(c.B == 200);
        CHECK(c.b_inner_db == 200);
        CHECK(c.n_rep == 10);
        CHECK(c.alphas == std::vector<double>{0.05, 0.95});
        CHECK(c.seed == 42);
        if (c.dgp.kind == DgpKind::Normal) CHECK(c.methods == std::vector<Method>{Method::Percentile, Method::TTest});
        if (c.dgp.kind == DgpKind::Bernoulli05)
            CHECK(c.methods == std::vector<Method>{Method::Percentile, Method::TTest, Method::ClopperPearson});
        if (c.dgp.kind == DgpKind::BivariateNormal)
            CHECK(c.methods == std::vector<Method>{Method::Percentile, Method::Fisher});
    }
    CHECK(combination_count(plan) == 12);

    const auto defaults = plan_of(R"({"dgp": "laplace", "functional": "median", "n": 32, "B_inner": 30})");
    REQUIRE(defaults.cells.size() == 1);
    CHECK(defaults.cells[0].methods.size() == kBootstrapMethods.size());
    CHECK(defaults.cells[0].alphas.size() == 6);
    CHECK(defaults.cells[0].b_inner_db == 30);
    CHECK(defaults.cells[0].b_inner_bt == 50);

    const auto everything = plan_of(R"({"dgp": "all", "functional": "all", "n": "all"})");
    CHECK(combination_count(everything) == 1386);
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(plan_of(R"({"dgp": "normal", "colour": 3})"), ConfigError);
    CHECK_THROWS_AS(plan_of("{not json"), ConfigError);
    CHECK_THROWS_AS(plan_of("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(plan_of(R"({"dgp": "cauchy"})"), ConfigError);
    CHECK_THROWS_AS(plan_of(R"({"n": [2]})"), ConfigError);
    CHECK_THROWS_AS(plan_of(R"({"alphas": [0.5, 1.5]})"), ConfigError);
    CHECK_THROWS_AS(plan_of(R"({"B": 0})"), ConfigError);
    CHECK_THROWS_AS(plan_of(R"({"B": -5})"), ConfigError);
    CHECK_THROWS_AS(plan_of(R"({"exact": "yes"})"), ConfigError);
    CHECK_THROWS_AS(plan_of(R"({"tie_rule": "random"})"), ConfigError);
    CHECK_THROWS_AS(plan_of(R"({"dgp": "bvn", "functional": "mean"})"), ConfigError);
    CHECK_THROWS_AS(load_plan("/nonexistent/plan.json"), IoError);
}
