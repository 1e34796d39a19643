#include "bootci/harness.hpp"

#include "bootci/baselines.hpp"
#include "bootci/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace bootci {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Substream indices inside one replication.
enum StreamSlot : std::uint64_t { kSampleSlot = 0, kResampleSlot = 1, kSmoothSlot = 2, kStudentSlot = 3, kDoubleSlot = 4 };

bool all_same(std::span<const double> v)
{
    return std::all_of(v.begin(), v.end(), [&](double d) { return d == v.front(); });
}

bool needs_single_level(const std::vector<Method>& methods)
{
    return std::any_of(methods.begin(), methods.end(), [](Method m) {
        return is_bootstrap(m) && m != Method::Studentized && m != Method::Double;
    });
}

bool wants(const std::vector<Method>& methods, Method m)
{
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

// Everything a replication computes once and shares across methods/alphas.
struct ReplicationContext {
    std::optional<Outcome<BootstrapDistribution>> dist;
    std::optional<Outcome<double>> sd;
    std::optional<Outcome<BootstrapDistribution>> smoothed;
    std::optional<Outcome<double>> acceleration;
    std::optional<Outcome<StudentizedPool>> studentized;
    std::optional<Outcome<DoubleBootstrapPool>> dbl;
    TieRule tie = TieRule::Midrank;
};

EndpointEstimate fail(Method m, double alpha, FailureReason r)
{
    return {m, alpha, r};
}

EndpointEstimate single_level(Method m, double alpha, const ReplicationContext& ctx)
{
    const auto& dist = *ctx.dist;
    if (!dist) return fail(m, alpha, dist.failure());
    const BootstrapDistribution& d = *dist;
    if (d.b_valid() < 2) return fail(m, alpha, FailureReason::TooFewEstimates);
    switch (m) {
    case Method::Percentile: return pb_endpoint(d, alpha);
    case Method::Normal:
        if (!*ctx.sd) return fail(m, alpha, ctx.sd->failure());
        return bn_endpoint(d.theta_hat, **ctx.sd, alpha);
    case Method::Basic: return bb_endpoint(d, alpha);
    case Method::Smoothed: {
        if (!*ctx.smoothed) return fail(m, alpha, ctx.smoothed->failure());
        auto e = pb_endpoint(**ctx.smoothed, alpha);
        e.method = Method::Smoothed;
        return e;
    }
    case Method::BiasCorrected: return bc_endpoint(d, d.theta_hat, alpha, ctx.tie);
    case Method::BCa:
        if (!*ctx.acceleration) return fail(m, alpha, ctx.acceleration->failure());
        return bca_endpoint(d, d.theta_hat, **ctx.acceleration, alpha, ctx.tie);
    default: break;
    }
    throw std::logic_error("not a single-level method");
}

} // namespace

bool method_applies(Method m, DgpSpec dgp, Functional f) noexcept
{
    if (!is_legal_pair(dgp, f) || !method_applies(m, f)) return false;
    if (m == Method::ClopperPearson || m == Method::AgrestiCoull) return dgp.is_bernoulli();
    return true;
}

void validate(const ExperimentSpec& spec)
{
    if (!is_legal_pair(spec.dgp, spec.functional))
        throw std::invalid_argument("functional '" + std::string(to_string(spec.functional)) +
                                    "' is not paired with '" + std::string(to_string(spec.dgp.kind)) + "'");
    if (spec.n < 3) throw std::invalid_argument("sample size must be at least 3");
    if (spec.n_rep < 1) throw std::invalid_argument("n_rep must be positive");
    if (spec.B < 1) throw std::invalid_argument("B must be positive");
    if (spec.b_inner_bt < 2) throw std::invalid_argument("B_inner for bt must be at least 2");
    if (spec.b_inner_db < 1) throw std::invalid_argument("B_inner must be positive");
    if (spec.alphas.empty()) throw std::invalid_argument("alphas must not be empty");
    for (double a : spec.alphas)
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("alphas must lie in (0, 1)");
    if (spec.methods.empty()) throw std::invalid_argument("methods must not be empty");
    for (Method m : spec.methods)
        if (!method_applies(m, spec.dgp, spec.functional))
            throw std::invalid_argument("method '" + std::string(to_string(m)) + "' does not apply to this cell");
    if (spec.exact && spec.oracle_draws < 1) throw std::invalid_argument("oracle_draws must be positive");
}

std::uint64_t cell_stream_id(DgpSpec dgp, Functional f, std::size_t n) noexcept
{
    return combine_ids(combine_ids(static_cast<std::uint64_t>(dgp.kind) + 1, static_cast<std::uint64_t>(f) + 1), n);
}

std::vector<ReplicationRecord> run_cell(const ExperimentSpec& spec, unsigned threads, ExactOracleCache* oracles)
{
    validate(spec);
    if (spec.exact && oracles == nullptr) throw std::invalid_argument("exact scoring needs an oracle cache");

    const double theta_true = true_parameter(spec.dgp, spec.functional);
    const ExactOracle* oracle = spec.exact ? &oracles->get(spec.dgp, spec.functional, spec.n) : nullptr;
    const RngStream cell_stream(spec.seed, cell_stream_id(spec.dgp, spec.functional, spec.n));
    const std::size_t per_rep = spec.methods.size() * spec.alphas.size();
    const bool single = needs_single_level(spec.methods);

    std::vector<ReplicationRecord> records(spec.n_rep * per_rep);
    parallel_for(spec.n_rep, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const RngStream rep = cell_stream.substream(r);
            RngStream sample_stream = rep.substream(kSampleSlot);
            const Sample sample = draw_sample(spec.dgp, spec.n, sample_stream);
            const bool removed = spec.dgp.is_bernoulli() && all_same(sample.x());

            ReplicationContext ctx;
            ctx.tie = spec.tie_rule;
            double theta_obs = kNaN;
            if (!removed) {
                if (auto t = evaluate(spec.functional, sample)) theta_obs = *t;
                if (single) {
                    ctx.dist = resample(sample, spec.B, spec.functional, rep.substream(kResampleSlot));
                    if (*ctx.dist) {
                        ctx.sd = bootstrap_sd(**ctx.dist);
                        ctx.smoothed = smooth(**ctx.dist, rep.substream(kSmoothSlot));
                        ctx.acceleration = jackknife_acceleration(sample, spec.functional);
                    }
                }
                if (wants(spec.methods, Method::Studentized))
                    ctx.studentized = studentized_bootstrap(sample, spec.functional, {spec.B, spec.b_inner_bt},
                                                            rep.substream(kStudentSlot));
                if (wants(spec.methods, Method::Double))
                    ctx.dbl = double_bootstrap(sample, spec.functional, {spec.B, spec.b_inner_db},
                                               rep.substream(kDoubleSlot), spec.tie_rule);
            }

            std::size_t slot = r * per_rep;
            for (Method m : spec.methods) {
                for (double alpha : spec.alphas) {
                    ReplicationRecord& rec = records[slot++];
                    rec.dgp = spec.dgp;
                    rec.functional = spec.functional;
                    rec.n = spec.n;
                    rec.method = m;
                    rec.alpha = alpha;
                    rec.replication = r;
                    rec.exact = kNaN;
                    rec.abs_dist = kNaN;
                    if (removed) {
                        rec.removed = true;
                        continue;
                    }
                    if (oracle != nullptr && std::isfinite(theta_obs)) rec.exact = oracle->endpoint(theta_obs, alpha);

                    EndpointEstimate e = [&]() -> EndpointEstimate {
                        if (!is_bootstrap(m)) return baseline_endpoint(m, sample, spec.functional, alpha);
                        if (m == Method::Studentized) {
                            if (!*ctx.studentized) return fail(m, alpha, ctx.studentized->failure());
                            return bt_endpoint(**ctx.studentized, alpha);
                        }
                        if (m == Method::Double) {
                            if (!*ctx.dbl) return fail(m, alpha, ctx.dbl->failure());
                            return db_endpoint(**ctx.dbl, alpha);
                        }
                        return single_level(m, alpha, ctx);
                    }();
                    if (!e.value) {
                        rec.failure = e.value.failure();
                        continue;
                    }
                    const auto score = score_replication(e, theta_true, rec.exact);
                    rec.endpoint = *e.value;
                    rec.covered = score.covered;
                    rec.abs_dist = score.abs_dist;
                }
            }
        }
    });
    return records;
}

std::vector<EndpointEstimate> estimate_endpoints(const Sample& s, Functional f, Method m,
                                                 const std::vector<double>& alphas, const EstimateOptions& opt)
{
    if (!method_applies(m, f))
        throw std::invalid_argument("method '" + std::string(to_string(m)) + "' does not apply to '" +
                                    std::string(to_string(f)) + "'");
    const RngStream root(opt.seed, 0);
    ReplicationContext ctx;
    ctx.tie = opt.tie_rule;
    if (is_bootstrap(m) && m != Method::Studentized && m != Method::Double) {
        ctx.dist = resample(s, opt.B, f, root.substream(kResampleSlot), opt.threads);
        if (*ctx.dist) {
            ctx.sd = bootstrap_sd(**ctx.dist);
            ctx.smoothed = smooth(**ctx.dist, root.substream(kSmoothSlot));
            ctx.acceleration = s.size() >= 3 ? jackknife_acceleration(s, f)
                                             : Outcome<double>(FailureReason::TooFewObservations);
        }
    }
    if (m == Method::Studentized)
        ctx.studentized = studentized_bootstrap(s, f, {opt.B, opt.b_inner_bt, false, opt.threads},
                                                root.substream(kStudentSlot));
    if (m == Method::Double)
        ctx.dbl = double_bootstrap(s, f, {opt.B, opt.b_inner_db, false, opt.threads}, root.substream(kDoubleSlot),
                                   opt.tie_rule);

    std::vector<EndpointEstimate> out;
    for (double alpha : alphas) {
        if (!is_bootstrap(m)) {
            out.push_back(baseline_endpoint(m, s, f, alpha));
        } else if (m == Method::Studentized) {
            out.push_back(*ctx.studentized ? bt_endpoint(**ctx.studentized, alpha)
                                           : fail(m, alpha, ctx.studentized->failure()));
        } else if (m == Method::Double) {
            out.push_back(*ctx.dbl ? db_endpoint(**ctx.dbl, alpha) : fail(m, alpha, ctx.dbl->failure()));
        } else {
            out.push_back(single_level(m, alpha, ctx));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Side s) noexcept
{
    return s == Side::One ? "one" : "two";
}

Side parse_side(std::string_view s)
{
    if (s == "one") return Side::One;
    if (s == "two") return Side::Two;
    throw std::invalid_argument("side must be 'one' or 'two'");
}

std::size_t AggregateRecord::n_rep_effective() const noexcept
{
    const double kept = static_cast<double>(n_rep) * (1.0 - removed_rate);
    return static_cast<std::size_t>(std::llround(kept * (1.0 - fail_rate)));
}

bool AggregateRecord::empty() const noexcept
{
    return std::isnan(coverage);
}

namespace {

struct Tally {
    std::size_t total = 0;
    std::size_t removed = 0;
    std::size_t failed = 0;
    std::size_t covered = 0;
    double dist_sum = 0.0;
    std::size_t dist_count = 0;
    // running moments of the exact endpoints across replications
    double exact_sum = 0.0;
    double exact_sq = 0.0;
    std::size_t exact_count = 0;
};

AggregateRecord finish(const ReplicationRecord& proto, double alpha, Side side, std::size_t B, const Tally& t,
                       const std::vector<double>& exact_values)
{
    AggregateRecord a;
    a.dgp = proto.dgp;
    a.functional = proto.functional;
    a.n = proto.n;
    a.alpha = alpha;
    a.side = side;
    a.method = proto.method;
    a.B = B;
    a.n_rep = t.total;
    a.removed_rate = t.total ? static_cast<double>(t.removed) / static_cast<double>(t.total) : 0.0;
    const std::size_t kept = t.total - t.removed;
    a.fail_rate = kept ? static_cast<double>(t.failed) / static_cast<double>(kept) : 0.0;
    const std::size_t scored = kept - t.failed;
    if (scored == 0) {
        a.coverage = a.coverage_se = a.kl = a.dist_norm = kNaN;
        return a;
    }
    const CoverageScore cs{static_cast<double>(t.covered) / static_cast<double>(scored), alpha, scored};
    a.coverage = cs.p;
    a.coverage_se = cs.mc_se();
    a.kl = kl_coverage(cs.p, alpha);
    a.dist_norm = kNaN;
    if (side == Side::One && t.dist_count > 0 && exact_values.size() >= 2) {
        double mean = 0.0;
        for (double v : exact_values) mean += v;
        mean /= static_cast<double>(exact_values.size());
        double ss = 0.0;
        for (double v : exact_values) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(exact_values.size() - 1));
        a.dist_norm = normalize_distance(t.dist_sum / static_cast<double>(t.dist_count), sd);
    }
    return a;
}

} // namespace

std::vector<AggregateRecord> aggregate(const std::vector<ReplicationRecord>& records, std::size_t B)
{
    // One-sided cells, keyed by (method, alpha) within a single run_cell output.
    using Key = std::tuple<int, int, std::size_t, int, double>;
    struct Cell {
        const ReplicationRecord* proto = nullptr;
        Tally tally;
        std::vector<double> exact;
    };
    std::map<Key, Cell> cells;
    for (const auto& r : records) {
        Cell& c = cells[Key{static_cast<int>(r.dgp.kind), static_cast<int>(r.functional), r.n,
                            static_cast<int>(r.method), r.alpha}];
        if (!c.proto) c.proto = &r;
        Tally& t = c.tally;
        ++t.total;
        if (r.removed) {
            ++t.removed;
            continue;
        }
        if (std::isfinite(r.exact)) c.exact.push_back(r.exact);
        if (r.failure) {
            ++t.failed;
            continue;
        }
        if (r.covered) ++t.covered;
        if (std::isfinite(r.abs_dist)) {
            t.dist_sum += r.abs_dist;
            ++t.dist_count;
        }
    }

    std::vector<AggregateRecord> out;
    for (const auto& [key, c] : cells) out.push_back(finish(*c.proto, c.proto->alpha, Side::One, B, c.tally, c.exact));

    // Two-sided cells from complementary one-sided endpoints of the same
    // replication: covered <=> lower < theta <= upper.
    using RepKey = std::tuple<int, int, std::size_t, int, std::size_t>;
    std::map<RepKey, std::vector<const ReplicationRecord*>> by_rep;
    for (const auto& r : records)
        by_rep[RepKey{static_cast<int>(r.dgp.kind), static_cast<int>(r.functional), r.n, static_cast<int>(r.method),
                      r.replication}]
            .push_back(&r);

    std::map<Key, std::pair<const ReplicationRecord*, Tally>> two;
    for (const auto& [rk, group] : by_rep) {
        for (const ReplicationRecord* lo : group) {
            if (!(lo->alpha < 0.5)) continue;
            const auto hi_it = std::find_if(group.begin(), group.end(), [&](const ReplicationRecord* r) {
                return std::abs(r->alpha - (1.0 - lo->alpha)) < 1e-12;
            });
            if (hi_it == group.end()) continue;
            const ReplicationRecord* hi = *hi_it;
            auto& [proto, t] = two[Key{std::get<0>(rk), std::get<1>(rk), std::get<2>(rk), std::get<3>(rk), lo->alpha}];
            if (!proto) proto = lo;
            ++t.total;
            if (lo->removed) {
                ++t.removed;
                continue;
            }
            if (!lo->scored() || !hi->scored() || hi->endpoint < lo->endpoint) {
                ++t.failed;
                continue;
            }
            // With lower <= upper, covered(upper) - covered(lower) is exactly
            // the two-sided indicator.
            if (static_cast<int>(hi->covered) - static_cast<int>(lo->covered) == 1) ++t.covered;
        }
    }
    for (const auto& [key, v] : two) {
        const double level = (1.0 - std::get<4>(key)) - std::get<4>(key);
        out.push_back(finish(*v.first, level, Side::Two, B, v.second, {}));
    }
    std::sort(out.begin(), out.end(), key_less);
    return out;
}

bool meets_threshold(const AggregateRecord& agg, const ThresholdSet& set, Threshold t)
{
    if (agg.empty()) return false;
    return agg.kl <= set.level(t);
}

bool key_less(const AggregateRecord& l, const AggregateRecord& r)
{
    const auto key = [](const AggregateRecord& a) {
        return std::make_tuple(to_string(a.dgp.kind), to_string(a.functional), a.n, a.alpha, to_string(a.side),
                               to_string(a.method));
    };
    return key(l) < key(r);
}

std::vector<CellVerdict> compare_methods(const std::vector<AggregateRecord>& a, const std::vector<AggregateRecord>& b,
                                         Threshold criterion, const ThresholdSet& set)
{
    using Key = std::tuple<int, int, std::size_t, double, int>;
    const auto key = [](const AggregateRecord& r) {
        return Key{static_cast<int>(r.dgp.kind), static_cast<int>(r.functional), r.n, r.alpha,
                   static_cast<int>(r.side)};
    };
    std::map<Key, const AggregateRecord*> a_cells, b_cells;
    for (const auto& r : a) a_cells[key(r)] = &r;
    for (const auto& r : b) b_cells[key(r)] = &r;
    if (a_cells.size() != b_cells.size() ||
        !std::equal(a_cells.begin(), a_cells.end(), b_cells.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; }))
        throw std::invalid_argument("methods were not evaluated on the same cells");

    const auto beats = [&](const AggregateRecord& winner, const AggregateRecord& loser) {
        if (winner.empty()) return false;
        if (loser.empty()) return true;
        return !meets_threshold(loser, set, criterion) && winner.kl <= loser.kl / 5.0;
    };

    std::vector<CellVerdict> out;
    out.reserve(a_cells.size());
    for (const auto& [k, ra] : a_cells) {
        const AggregateRecord& rb = *b_cells.at(k);
        out.push_back(CellVerdict{ra->dgp, ra->functional, ra->n, ra->alpha, ra->side, beats(*ra, rb), beats(rb, *ra)});
    }
    return out;
}

} // namespace bootci
