#include "bootci/config.hpp"
#include "bootci/harness.hpp"
#include "bootci/report.hpp"
#include "bootci/results_io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace bootci;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;
constexpr int kNumericalFailure = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_real(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view s, const std::string& where)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw UsageError(where + ": '" + std::string(s) + "' is not a number");
    return v;
}

Sample read_sample(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<double> x, y;
    std::string line;
    std::size_t lineno = 0;
    int columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto comma = line.find(',');
        const int here = comma == std::string::npos ? 1 : 2;
        if (columns != 0 && here != columns) throw UsageError(where + ": inconsistent number of columns");
        columns = here;
        if (here == 1) {
            x.push_back(parse_number(line, where));
        } else {
            x.push_back(parse_number(std::string_view(line).substr(0, comma), where));
            y.push_back(parse_number(std::string_view(line).substr(comma + 1), where));
        }
    }
    if (x.empty()) throw UsageError(path + ": no observations");
    return columns == 2 ? Sample::bivariate(std::move(x), std::move(y)) : Sample::univariate(std::move(x));
}

std::vector<double> parse_alphas(const std::string& list)
{
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double a = parse_number(item, "--alpha");
        if (!(a > 0.0 && a < 1.0)) throw UsageError("--alpha values must lie in (0, 1)");
        out.push_back(a);
    }
    if (out.empty()) throw UsageError("--alpha needs at least one value");
    return out;
}

int run_ci(const std::string& data, const std::string& functional, const std::string& method,
           const std::string& alpha_list, const EstimateOptions& opt)
{
    const Sample s = read_sample(data);
    const Functional f = parse_functional(functional);
    const Method m = parse_method(method);
    const auto alphas = parse_alphas(alpha_list);
    const auto endpoints = estimate_endpoints(s, f, m, alphas, opt);
    bool any_failed = false;
    for (const auto& e : endpoints) {
        if (e.value) {
            std::cout << format_real(e.alpha) << ',' << format_real(*e.value) << '\n';
        } else {
            any_failed = true;
            std::cout << format_real(e.alpha) << ",nan\n";
            std::cerr << "alpha " << e.alpha << ": " << to_string(e.value.failure()) << '\n';
        }
    }
    for (const auto& lo : endpoints)
        for (const auto& hi : endpoints)
            if (lo.alpha < 0.5 && std::abs(lo.alpha + hi.alpha - 1.0) < 1e-12) {
                const auto iv = two_sided(lo, hi);
                if (iv)
                    std::cout << "interval " << format_real(iv->level) << ": [" << format_real(iv->lower) << ", "
                              << format_real(iv->upper) << "]\n";
            }
    return any_failed ? kNumericalFailure : kOk;
}

int run_simulate(const std::string& config, unsigned threads, const std::string& out, std::optional<std::uint64_t> seed,
                 bool exact)
{
    ExperimentPlan plan = load_plan(config);
    if (seed) plan.seed = *seed;
    if (exact) plan.exact = true;
    ExactOracleCache oracles(plan.seed, plan.oracle_draws);
    std::vector<AggregateRecord> all;
    std::size_t done = 0;
    for (ExperimentSpec spec : plan.cells) {
        spec.seed = plan.seed;
        spec.exact = plan.exact;
        const auto records = run_cell(spec, threads, plan.exact ? &oracles : nullptr);
        auto aggs = aggregate(records, spec.B);
        all.insert(all.end(), aggs.begin(), aggs.end());
        std::cerr << "[" << ++done << "/" << plan.cells.size() << "] " << to_string(spec.dgp.kind) << ' '
                  << to_string(spec.functional) << " n=" << spec.n << '\n';
    }
    emit_results(all, out);
    return kOk;
}

int run_report(const std::string& in, const std::string& table, const std::string& side, const std::string& criterion)
{
    const TableKind kind = parse_table_kind(table);
    const Side s = parse_side(side);
    const Threshold c = parse_threshold(criterion);
    const SummaryTable t = summarize(load_results(in), kind, s, c);
    std::cout << render(t, kind == TableKind::Threshold ? 2 : 3);
    return kOk;
}

int run_compare(const std::string& in, const std::string& a, const std::string& b, const std::string& side,
                const std::string& criterion)
{
    const Method ma = parse_method(a);
    const Method mb = parse_method(b);
    const Side s = parse_side(side);
    const Threshold c = parse_threshold(criterion);
    const auto summary = compare_summary(load_results(in), ma, mb, s, c);
    if (summary.cells == 0) throw UsageError("no cell has results for both methods");
    std::cout << render(summary);
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bootstrap confidence interval methods and coverage simulations"};
    app.require_subcommand(1);

    std::string data, functional = "mean", method = "pb", alpha_list = "0.025,0.975";
    EstimateOptions opt;
    auto* ci = app.add_subcommand("ci", "Confidence interval endpoints for a data file");
    ci->add_option("--data", data, "One value per line, or x,y per line")->required();
    ci->add_option("--functional", functional, "mean, median, std, q05, q95 or corr");
    ci->add_option("--method", method, "Method id, e.g. pb, bca, db, t_test");
    ci->add_option("--alpha", alpha_list, "Comma-separated endpoint levels");
    ci->add_option("--b", opt.B, "Bootstrap resamples");
    ci->add_option("--b-inner", opt.b_inner_db, "Inner resamples for db");
    ci->add_option("--b-inner-bt", opt.b_inner_bt, "Inner resamples for bt");
    ci->add_option("--seed", opt.seed, "Random seed");

    std::string config, out = "results.csv";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::optional<std::uint64_t> seed;
    bool exact = false;
    auto* sim = app.add_subcommand("simulate", "Run a coverage simulation grid");
    sim->add_option("--config", config, "JSON experiment configuration")->required();
    sim->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sim->add_option("--out", out, "Results CSV path");
    sim->add_option("--seed", seed, "Override the configured seed");
    sim->add_flag("--exact", exact, "Score distances from exact intervals");

    std::string in, table = "kl", side = "one", criterion = "liberal";
    auto* rep = app.add_subcommand("report", "Summarize a results CSV");
    rep->add_option("--in", in, "Results CSV")->required();
    rep->add_option("--table", table, "kl, threshold or distance");
    rep->add_option("--side", side, "one or two");
    rep->add_option("--criterion", criterion, "stringent, intermediate, liberal or very_liberal");

    std::string a = "db", b = "bca";
    auto* cmp = app.add_subcommand("compare", "Outperformance counts between two methods");
    cmp->add_option("--in", in, "Results CSV")->required();
    cmp->add_option("--a", a, "First method");
    cmp->add_option("--b", b, "Second method");
    cmp->add_option("--side", side, "one or two");
    cmp->add_option("--criterion", criterion, "stringent, intermediate, liberal or very_liberal");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*ci) return run_ci(data, functional, method, alpha_list, opt);
        if (*sim) return run_simulate(config, threads, out, seed, exact);
        if (*rep) return run_report(in, table, side, criterion);
        if (*cmp) return run_compare(in, a, b, side, criterion);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kConfigError;
}
