#include "bootci/config.hpp"

#include "bootci/results_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

namespace bootci {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys{"dgp",    "functional", "n",    "alphas", "methods",      "B",
                                       "B_inner", "B_inner_bt", "n_rep", "seed",  "exact",        "oracle_draws",
                                       "tie_rule"};

template <class T, class Parse>
std::vector<T> name_list(const json& j, const char* key, Parse parse, const std::vector<T>& all)
{
    if (!j.contains(key)) return all;
    const json& v = j.at(key);
    if (v.is_string() && v.get<std::string>() == "all") return all;
    std::vector<T> out;
    const auto add = [&](const json& item) {
        if (!item.is_string()) throw ConfigError(std::string(key) + ": expected a name");
        try {
            out.push_back(parse(item.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string(key) + ": " + e.what());
        }
    };
    if (v.is_array()) {
        for (const auto& item : v) add(item);
    } else {
        add(v);
    }
    if (out.empty()) throw ConfigError(std::string(key) + ": list must not be empty");
    return out;
}

std::size_t positive(const json& j, const char* key, std::size_t fallback)
{
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
        throw ConfigError(std::string(key) + ": expected a positive integer");
    return v.get<std::size_t>();
}

std::vector<std::size_t> sizes(const json& j)
{
    const std::vector<std::size_t> all(kGridSizes.begin(), kGridSizes.end());
    if (!j.contains("n")) return all;
    const json& v = j.at("n");
    if (v.is_string() && v.get<std::string>() == "all") return all;
    std::vector<std::size_t> out;
    const auto add = [&](const json& item) {
        if (!item.is_number_unsigned() || item.get<std::uint64_t>() < 3)
            throw ConfigError("n: expected integers of at least 3");
        out.push_back(item.get<std::size_t>());
    };
    if (v.is_array()) {
        for (const auto& item : v) add(item);
    } else {
        add(v);
    }
    if (out.empty()) throw ConfigError("n: list must not be empty");
    return out;
}

std::vector<double> alphas(const json& j)
{
    if (!j.contains("alphas")) return {kGridAlphas.begin(), kGridAlphas.end()};
    const json& v = j.at("alphas");
    if (!v.is_array() || v.empty()) throw ConfigError("alphas: expected a non-empty list");
    std::vector<double> out;
    for (const auto& item : v) {
        if (!item.is_number()) throw ConfigError("alphas: expected numbers");
        const double a = item.get<double>();
        if (!(a > 0.0 && a < 1.0)) throw ConfigError("alphas: values must lie in (0, 1)");
        out.push_back(a);
    }
    return out;
}

TieRule tie_rule(const json& j)
{
    if (!j.contains("tie_rule")) return TieRule::Midrank;
    const json& v = j.at("tie_rule");
    if (v == "midrank") return TieRule::Midrank;
    if (v == "strict") return TieRule::Strict;
    throw ConfigError("tie_rule: expected 'midrank' or 'strict'");
}

} // namespace

ExperimentPlan parse_plan(std::istream& in)
{
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");

    const std::vector<DgpSpec> all_dgps = [] {
        std::vector<DgpSpec> v;
        for (DgpKind k : kAllDgps) v.push_back({k});
        return v;
    }();
    const auto dgps = name_list<DgpSpec>(j, "dgp", parse_dgp, all_dgps);
    const auto functionals = name_list<Functional>(j, "functional", parse_functional,
                                                   {kAllFunctionals.begin(), kAllFunctionals.end()});
    const auto methods =
        name_list<Method>(j, "methods", parse_method, {kBootstrapMethods.begin(), kBootstrapMethods.end()});

    ExperimentPlan plan;
    ExperimentSpec base;
    base.alphas = alphas(j);
    base.B = positive(j, "B", base.B);
    base.b_inner_db = positive(j, "B_inner", base.B);
    base.b_inner_bt = positive(j, "B_inner_bt", base.b_inner_bt);
    if (base.b_inner_bt < 2) throw ConfigError("B_inner_bt: must be at least 2");
    base.n_rep = positive(j, "n_rep", base.n_rep);
    base.oracle_draws = positive(j, "oracle_draws", base.oracle_draws);
    base.tie_rule = tie_rule(j);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        base.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("exact")) {
        if (!j.at("exact").is_boolean()) throw ConfigError("exact: expected true or false");
        base.exact = j.at("exact").get<bool>();
    }
    plan.seed = base.seed;
    plan.exact = base.exact;
    plan.oracle_draws = base.oracle_draws;

    for (DgpSpec d : dgps)
        for (Functional f : functionals) {
            if (!is_legal_pair(d, f)) continue;
            for (std::size_t n : sizes(j)) {
                ExperimentSpec spec = base;
                spec.dgp = d;
                spec.functional = f;
                spec.n = n;
                spec.methods.clear();
                for (Method m : methods)
                    if (method_applies(m, d, f)) spec.methods.push_back(m);
                if (!spec.methods.empty()) plan.cells.push_back(std::move(spec));
            }
        }
    if (plan.cells.empty()) throw ConfigError("config selects no legal cell");
    return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return parse_plan(in);
}

ExperimentPlan full_grid_plan()
{
    ExperimentPlan plan;
    for (DgpKind k : kAllDgps)
        for (Functional f : kAllFunctionals) {
            if (!is_legal_pair({k}, f)) continue;
            for (std::size_t n : kGridSizes) {
                ExperimentSpec spec;
                spec.dgp = {k};
                spec.functional = f;
                spec.n = n;
                spec.methods.assign(kBootstrapMethods.begin(), kBootstrapMethods.end());
                plan.cells.push_back(std::move(spec));
            }
        }
    return plan;
}

std::size_t combination_count(const ExperimentPlan& plan) noexcept
{
    std::size_t total = 0;
    for (const auto& c : plan.cells) total += c.alphas.size();
    return total;
}

} // namespace bootci
