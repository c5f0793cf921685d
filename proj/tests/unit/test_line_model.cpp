#include <doctest.h>

#include <cmath>

#include "metro/dynamics.hpp"
#include "metro/line_model.hpp"
#include "test_support.hpp"

using namespace metro;
using metro::test::uniform_line;

namespace {

SegmentSpec platform(double lambda_in, double alpha_in, double lambda_out, double alpha_out) {
    SegmentSpec s;
    s.r_min = 10;
    s.r_nom = 100;
    s.s_min = 20;
    s.g_min = 30;
    s.g_max = 300;
    s.lambda_in = lambda_in;
    s.alpha_in = alpha_in;
    s.lambda_out = lambda_out;
    s.alpha_out = alpha_out;
    return s;
}

}  // namespace

TEST_CASE("demand parameter") {
    CHECK(demand_parameter(platform(1.0, 10, 0.5, 10)) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(demand_parameter(platform(0, 0, 0, 0)) == 0.0);
    CHECK_THROWS_AS(demand_parameter(platform(10, 10, 0, 1)), ModelError);
    CHECK_THROWS_AS(demand_parameter(platform(1, 0, 0, 0)), ModelError);
    CHECK_THROWS_AS(demand_parameter(platform(6, 10, 5, 10)), ModelError);
}

TEST_CASE("amplification") {
    CHECK(amplification(0.0) == 0.0);
    CHECK(amplification(0.5) == 1.0);
    CHECK(amplification(0.2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(amplification(1.0), ModelError);
    CHECK_THROWS_AS(amplification(-0.1), ModelError);
    double prev = -1;
    for (double x = 0; x < 0.99; x += 0.01) {
        CHECK(amplification(x) > prev);
        prev = amplification(x);
    }
}

TEST_CASE("derived parameters") {
    auto cfg = uniform_line(4, 2, 100, 10, 20, 300, 0.1);
    auto dp = derive_params(cfg);
    CHECK(dp[0].x == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(dp[0].h_min == doctest::Approx(100.0 / 3).epsilon(1e-15));
    CHECK(dp[0].w_min == doctest::Approx(10.0 / 3).epsilon(1e-15));
    CHECK(dp[0].h_max == doctest::Approx(1000.0 / 3).epsilon(1e-15));
    CHECK(dp[0].w_max == doctest::Approx(100.0 / 3).epsilon(1e-15));
    CHECK(dp[0].dr == 90);
    CHECK(dp[0].dg == 270);
    CHECK(dp[0].dw == doctest::Approx(30).epsilon(1e-15));
    CHECK(dp[0].dw == dp[0].X * dp[0].dg);
    CHECK(dp[0].w_min == dp[0].X * cfg.segments[0].g_min);
    CHECK(dp[0].dw == doctest::Approx(dp[0].x * dp[0].dh).epsilon(1e-14));

    cfg = uniform_line(4, 2, 100, 10, 20, 300, 0.0);
    dp = derive_params(cfg);
    CHECK(dp[0].h_min == 30);
    CHECK(dp[0].w_min == 0);

    cfg = uniform_line(4, 2, 100, 10, 20, 30, 0.25);
    dp = derive_params(cfg);
    CHECK(dp[0].dh == 0);
    CHECK(dp[0].dw == 0);
    CHECK(dp[0].h_min * (1 - dp[0].x) == cfg.segments[0].g_min);  // dyadic x: exact
}

TEST_CASE("derived parameters are monotone in demand") {
    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        auto cfg = uniform_line(5, 2, 100, 10, 20, 300, 0.0);
        for (auto& s : cfg.segments) {
            s.lambda_in = rng.uniform(0, 3);
            s.lambda_out = rng.uniform(0, 3);
        }
        const auto before = derive_params(cfg);
        const auto j = rng.integer(0, 4);
        (rng.chance(0.5) ? cfg.segments[j].lambda_in : cfg.segments[j].lambda_out) += rng.uniform(0, 0.5);
        const auto after = derive_params(cfg);
        for (std::size_t k = 0; k < 5; ++k) {
            REQUIRE(after[k].x >= before[k].x);
            REQUIRE(after[k].X >= before[k].X);
            REQUIRE(after[k].h_min >= before[k].h_min);
            REQUIRE(after[k].w_min >= before[k].w_min);
        }
    }
}

TEST_CASE("validation") {
    auto cfg = uniform_line(4, 2, 100, 10, 20, 300, 0.1);
    CHECK_NOTHROW(validate(cfg));

    auto bad = cfg;
    bad.trains = 4;
    bad.occupancy = {1, 1, 1, 1};
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("0 < m < n"), ModelError);
    CHECK_THROWS_AS(even_occupancy(4, 0), ModelError);
    CHECK_THROWS_AS(even_occupancy(4, 4), ModelError);

    bad = cfg;
    bad.occupancy = {1, 1, 1, 0};
    CHECK_THROWS_AS(validate(bad), ModelError);

    bad = cfg;
    bad.segments[1].g_min = 31;
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("segment 1"), ModelError);

    bad = cfg;
    bad.segments[2].r_nom = 5;
    CHECK_THROWS_AS(validate(bad), ModelError);

    bad = cfg;
    bad.segments[0].is_platform = false;
    CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("non-platform"), ModelError);

    bad = cfg;
    bad.segments[3].g_max = 20;
    CHECK_THROWS_AS(validate(bad), ModelError);

    bad = cfg;
    bad.initial_departures = {0, 1};
    CHECK_THROWS_AS(validate(bad), ModelError);

    bad = cfg;
    bad.segments[1].lambda_in = 10;
    CHECK_THROWS_WITH_AS(derive_params(bad), doctest::Contains("segment 1"), ModelError);

    CHECK(even_occupancy(4, 2) == std::vector<std::uint8_t>{1, 0, 1, 0});
    CHECK(even_occupancy(5, 3) == std::vector<std::uint8_t>{1, 1, 0, 1, 0});
}

TEST_CASE("aggregate OD") {
    DemandMatrix dm{2, {0, 3, 4, 0}};
    const auto agg = aggregate_od(dm);
    CHECK(agg[0] == StationDemand{3, 4});
    CHECK(agg[1] == StationDemand{4, 3});

    const auto zero = aggregate_od(DemandMatrix{3, std::vector<double>(9, 0.0)});
    for (const auto& s : zero) CHECK(s == StationDemand{0, 0});

    const std::vector<std::uint8_t> mask{1, 0};
    CHECK_THROWS_AS(aggregate_od(dm, mask), ModelError);
    CHECK_THROWS_AS(aggregate_od(DemandMatrix{2, {1, 2, 3}}), ModelError);
    CHECK_THROWS_AS(aggregate_od(DemandMatrix{2, {0, -1, 0, 0}}), ModelError);
}

TEST_CASE("linearity conditions") {
    auto cfg = uniform_line(4, 2, 100, 10, 20, 300, 0.1);
    auto dp = derive_params(cfg);

    // dr = 20 vs X dg = 0.25 * 40 = 10, then dr = 5.
    auto margin = uniform_line(4, 2, 30, 10, 20, 70, 0.2);
    auto mdp = derive_params(margin);
    CHECK(mdp[0].dr == 20);
    CHECK(mdp[0].dw == doctest::Approx(10).epsilon(1e-15));
    const std::vector<double> h1(4, 50.0);
    CHECK(check_linearity_conditions(margin, mdp, h1).all_margins_ok);
    margin = uniform_line(4, 2, 15, 10, 20, 70, 0.2);
    mdp = derive_params(margin);
    const auto fail = check_linearity_conditions(margin, mdp, h1);
    CHECK_FALSE(fail.all_margins_ok);
    CHECK_FALSE(fail.holds);
    CHECK_FALSE(fail.segments[0].margin_ok);

    // No demand: the margin condition cannot fail.
    auto quiet = uniform_line(4, 2, 10, 10, 20, 1000, 0.0);
    CHECK(check_linearity_conditions(quiet, derive_params(quiet), h1).all_margins_ok);

    const auto report = check_linearity_conditions(cfg, dp);
    CHECK(report.holds);
    for (const auto& s : report.segments) CHECK(s.first_headway == doctest::Approx(620.0 / 3).epsilon(1e-12));

    std::vector<double> h1_bad(4, 200.0);
    h1_bad[2] = 400;  // above h_max = 333.3
    const auto bad = check_linearity_conditions(cfg, dp, h1_bad);
    CHECK_FALSE(bad.all_headways_ok);
    CHECK_FALSE(bad.segments[2].headway_ok);
    CHECK(bad.segments[1].headway_ok);
    CHECK_FALSE(bad.holds);
}

TEST_CASE("linearity verdict is invariant under time rescaling") {
    Rng rng(5150);
    InstanceOptions opts;
    opts.max_segments = 12;
    for (int i = 0; i < 100; ++i) {
        opts.enforce_linearity = i % 2 == 0;
        auto cfg = random_instance(rng, opts);
        const auto dp = derive_params(cfg);
        const auto h1 = first_headways(cfg, dp);
        const auto base = check_linearity_conditions(cfg, dp, h1);

        // Times scale by c, rates by 1/c: x is unchanged.
        const double c = std::ldexp(1.0, static_cast<int>(rng.integer(0, 8)) - 4);
        auto scaled = cfg;
        for (auto& s : scaled.segments) {
            s.r_min *= c;
            s.r_nom *= c;
            s.s_min *= c;
            s.g_min *= c;
            s.g_max *= c;
            s.lambda_in /= c;
            s.lambda_out /= c;
            s.alpha_in /= c;
            s.alpha_out /= c;
        }
        for (auto& d : scaled.initial_departures) d *= c;
        const auto sdp = derive_params(scaled);
        std::vector<double> sh1(h1);
        for (auto& h : sh1) h *= c;
        const auto r = check_linearity_conditions(scaled, sdp, sh1);
        REQUIRE(r.holds == base.holds);
        REQUIRE(r.all_margins_ok == base.all_margins_ok);
        REQUIRE(r.all_headways_ok == base.all_headways_ok);
        if (opts.enforce_linearity) REQUIRE(base.holds);
    }
}

TEST_CASE("scale demand") {
    const auto cfg = uniform_line(4, 2, 100, 10, 20, 300, 0.1);
    const auto s = scale_demand(cfg, 2.0);
    CHECK(s.segments[0].lambda_in == 2 * cfg.segments[0].lambda_in);
    CHECK_THROWS_AS(scale_demand(cfg, -1), ModelError);
}
