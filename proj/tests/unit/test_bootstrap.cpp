#include "bootci/bootstrap.hpp"
#include "bootci/dgp.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace bootci;

namespace {

BootstrapDistribution dist(std::vector<double> est, double theta_hat)
{
    std::sort(est.begin(), est.end());
    BootstrapDistribution d;
    d.b_requested = est.size();
    d.estimates = std::move(est);
    d.theta_hat = theta_hat;
    return d;
}

double value(const EndpointEstimate& e)
{
    REQUIRE(e.value);
    return *e.value;
}

Sample normal_sample(std::size_t n, std::uint64_t seed)
{
    RngStream rs(seed, 77);
    return draw_sample({DgpKind::Normal}, n, rs);
}

} // namespace

TEST_CASE("resample basics")
{
    const RngStream rs(1, 1);
    const auto c = resample(Sample::univariate({4, 4, 4, 4}), 50, Functional::Mean, rs);
    REQUIRE(c);
    CHECK(c->b_valid() == 50);
    CHECK(std::all_of(c->estimates.begin(), c->estimates.end(), [](double v) { return v == 4.0; }));
    CHECK(c->theta_hat == 4.0);

    const auto one = resample(normal_sample(10, 1), 1, Functional::Median, rs);
    REQUIRE(one);
    CHECK(one->b_valid() == 1);
    CHECK_THROWS_AS(resample(normal_sample(10, 1), 0, Functional::Mean, rs), std::invalid_argument);

    const auto d = resample(normal_sample(30, 2), 500, Functional::Std, rs);
    REQUIRE(d);
    CHECK(std::is_sorted(d->estimates.begin(), d->estimates.end()));
}

TEST_CASE("resample is independent of the thread count")
{
    const Sample s = normal_sample(40, 3);
    const RngStream rs(5, 6);
    const auto a = resample(s, 777, Functional::Median, rs, 1);
    const auto b = resample(s, 777, Functional::Median, rs, 4);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->estimates == b->estimates);
}

TEST_CASE("resampled correlation at n = 4 loses degenerate resamples")
{
    // A resample is degenerate when it repeats a single row: 4 (1/4)^4 = 1/64.
    RngStream draw(8, 8);
    const Sample s = draw_sample({DgpKind::BivariateNormal}, 4, draw);
    const auto d = resample(s, 20000, Functional::Corr, RngStream(9, 9));
    REQUIRE(d);
    const double rate = static_cast<double>(d->b_degenerate()) / 20000.0;
    CHECK(std::abs(rate - 1.0 / 64) < 4 * std::sqrt((1.0 / 64) * (63.0 / 64) / 20000));
}

TEST_CASE("percentile, normal and basic endpoints")
{
    const auto d = dist({1, 2, 3, 4}, 2.5);
    CHECK(value(pb_endpoint(d, 0.5)) == 2.5);
    CHECK(value(pb_endpoint(dist({3, 3, 3}, 3), 0.1)) == 3.0);

    CHECK(value(bn_endpoint(0, 1, 0.975)) == Catch::Approx(oracle::normal_quantile(0.975)).epsilon(1e-12));
    CHECK(value(bn_endpoint(0, 1, 0.975)) == Catch::Approx(1.95996).margin(1e-5));
    CHECK(value(bn_endpoint(3.7, 2.0, 0.5)) == 3.7);
    CHECK(value(bn_endpoint(2, 0.5, 0.025)) == Catch::Approx(1.02002).margin(1e-5));

    CHECK(value(bb_endpoint(dist({12}, 10), 0.025)) == 8.0);
    CHECK(value(bb_endpoint(dist({5, 5}, 5), 0.3)) == 5.0);
    const auto sym = dist({-3, -1, 0, 1, 3}, 0);
    for (double a : {0.025, 0.25, 0.5, 0.9}) CHECK(value(bb_endpoint(sym, a)) == Catch::Approx(value(pb_endpoint(sym, a))).margin(1e-15));
}

TEST_CASE("percentile endpoint of a large normal distribution")
{
    RngStream rs(21, 0);
    std::normal_distribution<double> normal;
    std::vector<double> v(100000);
    for (auto& x : v) x = normal(rs);
    CHECK(value(pb_endpoint(dist(v, 0), 0.975)) == Catch::Approx(1.96).margin(0.03));
}

TEST_CASE("smoothed bootstrap")
{
    RngStream rs(31, 0);
    std::normal_distribution<double> normal;
    std::vector<double> v(400);
    for (auto& x : v) x = 2 + 3 * normal(rs);
    const auto d = dist(v, 2);
    const double iqr = oracle::type8(v, 0.75) - oracle::type8(v, 0.25);
    CHECK(*smoothing_bandwidth(d) == Catch::Approx(0.9 * std::min(oracle::sd(v), iqr / 1.34)).epsilon(1e-12));

    const auto c = dist({7, 7, 7, 7}, 7);
    CHECK(*smoothing_bandwidth(c) == 0.0);
    CHECK(value(sb_endpoint(c, 0.05, RngStream(1, 1))) == 7.0);
    CHECK(value(sb_endpoint(d, 0.05, RngStream(4, 4))) == value(sb_endpoint(d, 0.05, RngStream(4, 4))));
    CHECK_FALSE(sb_endpoint(dist({1}, 1), 0.5, RngStream(1, 1)).value);
}

TEST_CASE("bias fraction")
{
    CHECK(bias_fraction(dist({1, 2, 3, 4}, 0), 2.5) == 0.5);
    CHECK(bias_fraction(dist({2, 2, 2}, 0), 2.0) == 0.5);
    CHECK(bias_fraction(dist({2, 2, 2}, 0), 2.0, TieRule::Strict) == 0.0);
    CHECK(bias_fraction(dist({1, 2, 3}, 0), 5.0) == 1.0);
    CHECK(bias_fraction(dist({1, 2, 2, 3}, 0), 2.0) == 0.5);
    CHECK(bias_fraction(dist({1, 2, 2, 3}, 0), 2.0, TieRule::Strict) == 0.25);
}

TEST_CASE("bias-corrected levels against a normal-CDF oracle")
{
    const double z0 = oracle::normal_quantile(0.6);
    const double za = oracle::normal_quantile(0.95);
    const double bc = oracle::normal_cdf(2 * z0 + za);
    CHECK(*bc_level(0.6, 0.95) == Catch::Approx(bc).epsilon(1e-10));
    CHECK(bc == Catch::Approx(0.98425).margin(5e-5));

    const double bca = oracle::normal_cdf(z0 + (z0 + za) / (1 + 0.1 * (z0 + za)));
    CHECK(*bca_level(0.6, 0.1, 0.95) == Catch::Approx(bca).epsilon(1e-10));
    CHECK(bca == Catch::Approx(0.96777).margin(5e-5));

    CHECK(*bc_level(0.5, 0.3) == 0.3);
    CHECK(bc_level(0.0, 0.3).failure() == FailureReason::InfiniteBiasCorrection);
    CHECK(bc_level(1.0, 0.3).failure() == FailureReason::InfiniteBiasCorrection);
    CHECK_FALSE(bca_level(0.0, 0.1, 0.3));
}

TEST_CASE("jackknife acceleration")
{
    // Leave-one-out means of [0, 0, 1]: 0.5, 0.5, 0; mean 1/3.
    const std::vector<double> loo{0.5, 0.5, 0.0};
    const double m = oracle::mean(loo);
    double s2 = 0, s3 = 0;
    for (double t : loo) {
        s2 += (m - t) * (m - t);
        s3 += (m - t) * (m - t) * (m - t);
    }
    const double expected = s3 / (6 * std::pow(s2, 1.5));
    CHECK(*jackknife_acceleration(Sample::univariate({0, 0, 1}), Functional::Mean) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(expected == Catch::Approx(0.06804).margin(1e-5));

    CHECK(*jackknife_acceleration(Sample::univariate({-2, -1, 0, 1, 2}), Functional::Mean) == Catch::Approx(0.0).margin(1e-15));
    CHECK(jackknife_acceleration(Sample::univariate({3, 3, 3}), Functional::Mean).failure() ==
          FailureReason::ZeroJackknifeVariance);
}

TEST_CASE("BC and BCa reduce exactly")
{
    const auto d = dist({1, 2, 3, 4, 5, 6}, 3.5); // bias fraction 0.5
    for (double a : {0.025, 0.05, 0.25, 0.75, 0.95, 0.975}) {
        CHECK(value(bc_endpoint(d, d.theta_hat, a)) == value(pb_endpoint(d, a)));
        CHECK(value(bca_endpoint(d, d.theta_hat, 0.0, a)) == value(pb_endpoint(d, a)));
    }
    const auto skew = dist({1, 1.5, 2, 4, 9, 10, 11}, 3);
    for (double a : {0.05, 0.5, 0.95}) CHECK(value(bca_endpoint(skew, 3, 0.0, a)) == value(bc_endpoint(skew, 3, a)));
    CHECK(bc_endpoint(dist({1, 2}, 0), 0, 0.5).value.failure() == FailureReason::InfiniteBiasCorrection);
}

TEST_CASE("studentized bootstrap")
{
    const RngStream rs(3, 3);
    CHECK_FALSE(bt_endpoint(Sample::univariate({2, 2, 2, 2}), Functional::Mean, {200, 20}, 0.5, rs).value);

    StudentizedPool pool;
    pool.theta_hat = 1.5;
    pool.sigma_hat = 2.0;
    pool.pivots = {-2, -1, 0, 1, 2};
    CHECK(value(bt_endpoint(pool, 0.5)) == 1.5);
    CHECK(value(bt_endpoint(pool, 0.975)) == Catch::Approx(1.5 - 2.0 * oracle::type8(pool.pivots, 0.025)));
}

TEST_CASE("studentized endpoint tracks the t endpoint for normal means")
{
    const std::size_t n = 64;
    const double t975 = oracle::t_quantile(0.975, n - 1);
    double dev = 0, scale = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        const Sample s = normal_sample(n, 1000 + r);
        std::vector<double> x(s.x().begin(), s.x().end());
        const double se = oracle::sd(x) / std::sqrt(static_cast<double>(n));
        const double t_end = oracle::mean(x) + t975 * se;
        const double bt = value(bt_endpoint(s, Functional::Mean, {1000, 50}, 0.975, RngStream(r, 5)));
        dev += std::abs(bt - t_end);
        scale += se;
    }
    // Resampling noise in the 2.5% pivot quantile alone is about 0.085 se at B = 1000.
    CHECK(dev / reps < 0.2 * scale / reps);
}

namespace {

// Brute-force double bootstrap of the mean: every ordered outer tuple, and
// for each, every ordered inner tuple of the outer resample.
double brute_force_db_mean(const std::vector<double>& x, double alpha)
{
    const std::size_t n = x.size();
    std::size_t count = 1;
    for (std::size_t i = 0; i < n; ++i) count *= n;
    const auto tuple = [n](std::size_t index) {
        std::vector<std::size_t> digits(n);
        for (std::size_t i = n; i-- > 0;) {
            digits[i] = index % n;
            index /= n;
        }
        return digits;
    };
    double theta = 0;
    for (double v : x) theta += v;
    theta /= static_cast<double>(n);

    std::vector<double> outer, bias;
    for (std::size_t o = 0; o < count; ++o) {
        std::vector<double> xs;
        for (std::size_t k : tuple(o)) xs.push_back(x[k]);
        double s = 0;
        for (double v : xs) s += v;
        outer.push_back(s / static_cast<double>(n));
        double below = 0;
        for (std::size_t i = 0; i < count; ++i) {
            double si = 0;
            for (std::size_t k : tuple(i)) si += xs[k];
            const double e = si / static_cast<double>(n);
            below += e < theta ? 1.0 : (e == theta ? 0.5 : 0.0);
        }
        bias.push_back(below / static_cast<double>(count));
    }
    const double b = static_cast<double>(count);
    const double level = std::clamp(oracle::type8(bias, alpha), 1 / (b + 1), b / (b + 1));
    return oracle::type8(outer, level);
}

} // namespace

TEST_CASE("double bootstrap matches brute-force enumeration")
{
    NestedPlan plan;
    plan.exhaustive = true;
    const RngStream unused(0, 0);
    for (const std::vector<double>& x : {std::vector<double>{1, 2, 3}, std::vector<double>{0.3, -1.7, 2.9}}) {
        for (double a : {0.025, 0.05, 0.25, 0.5, 0.75, 0.95, 0.975}) {
            const auto e = db_endpoint(Sample::univariate(x), Functional::Mean, plan, a, unused);
            CHECK(value(e) == brute_force_db_mean(x, a));
        }
    }
}

TEST_CASE("double bootstrap basics")
{
    const RngStream rs(2, 2);
    CHECK(value(db_endpoint(Sample::univariate({5, 5, 5, 5}), Functional::Mean, {100, 10}, 0.1, rs)) == 5.0);
    const Sample s = normal_sample(20, 9);
    const auto a = db_endpoint(s, Functional::Median, {200, 20}, 0.9, rs);
    const auto b = db_endpoint(s, Functional::Median, {200, 20, false, 3}, 0.9, rs);
    CHECK(value(a) == value(b));
    const auto pool = double_bootstrap(s, Functional::Mean, {200, 20}, rs);
    REQUIRE(pool);
    for (double alpha : {0.001, 0.5, 0.999}) {
        const double lvl = db_level(*pool, alpha);
        CHECK(lvl >= 1.0 / 201);
        CHECK(lvl <= 200.0 / 201);
    }
}

TEST_CASE("endpoints are monotone in alpha")
{
    const Sample s = normal_sample(25, 17);
    const RngStream rs(4, 4);
    const auto d = *resample(s, 500, Functional::Mean, rs);
    const double sd = *bootstrap_sd(d);
    const double acc = *jackknife_acceleration(s, Functional::Mean);
    const auto pool_bt = *studentized_bootstrap(s, Functional::Mean, {300, 20}, rs);
    const auto pool_db = *double_bootstrap(s, Functional::Mean, {300, 20}, rs);
    const auto sm = *smooth(d, RngStream(8, 8));
    double prev[8];
    std::fill(std::begin(prev), std::end(prev), -INFINITY);
    for (int i = 1; i < 100; ++i) {
        const double a = i / 100.0;
        const double v[8] = {value(pb_endpoint(d, a)),
                             value(bn_endpoint(d.theta_hat, sd, a)),
                             value(bb_endpoint(d, a)),
                             value(pb_endpoint(sm, a)),
                             value(bc_endpoint(d, d.theta_hat, a)),
                             value(bca_endpoint(d, d.theta_hat, acc, a)),
                             value(bt_endpoint(pool_bt, a)),
                             value(db_endpoint(pool_db, a))};
        for (int m = 0; m < 8; ++m) {
            CAPTURE(m, a);
            CHECK(v[m] >= prev[m]);
            prev[m] = v[m];
        }
    }
}

TEST_CASE("endpoints are location-scale equivariant")
{
    const Sample s = normal_sample(15, 23);
    const double scale = 3.0, shift = -7.0;
    const Sample t = s.affine(scale, shift);
    for (Functional f : {Functional::Mean, Functional::Median, Functional::Q05, Functional::Q95}) {
        CAPTURE(to_string(f));
        const RngStream rs(6, 6);
        const auto d = *resample(s, 400, f, rs);
        const auto e = *resample(t, 400, f, rs);
        const auto sm_d = *smooth(d, RngStream(1, 2));
        const auto sm_e = *smooth(e, RngStream(1, 2));
        const auto db_d = *double_bootstrap(s, f, {200, 20}, rs);
        const auto db_e = *double_bootstrap(t, f, {200, 20}, rs);
        for (double a : {0.05, 0.25, 0.75, 0.95}) {
            const auto same = [&](double lhs, double rhs) {
                CHECK(rhs == Catch::Approx(scale * lhs + shift).epsilon(1e-9).margin(1e-9));
            };
            same(value(pb_endpoint(d, a)), value(pb_endpoint(e, a)));
            same(value(bn_endpoint(d.theta_hat, *bootstrap_sd(d), a)), value(bn_endpoint(e.theta_hat, *bootstrap_sd(e), a)));
            same(value(bb_endpoint(d, a)), value(bb_endpoint(e, a)));
            same(value(pb_endpoint(sm_d, a)), value(pb_endpoint(sm_e, a)));
            const auto bc_d = bc_endpoint(d, d.theta_hat, a);
            const auto bc_e = bc_endpoint(e, e.theta_hat, a);
            REQUIRE(bool(bc_d.value) == bool(bc_e.value));
            if (bc_d.value) same(*bc_d.value, *bc_e.value);
            const auto acc_d = jackknife_acceleration(s, f);
            const auto acc_e = jackknife_acceleration(t, f);
            if (acc_d && acc_e) {
                const auto x = bca_endpoint(d, d.theta_hat, *acc_d, a);
                const auto y = bca_endpoint(e, e.theta_hat, *acc_e, a);
                if (x.value && y.value) same(*x.value, *y.value);
            }
            same(value(db_endpoint(db_d, a)), value(db_endpoint(db_e, a)));
        }
    }
}
