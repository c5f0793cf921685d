#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "metro/analytics.hpp"
#include "metro/config.hpp"
#include "test_support.hpp"

using namespace metro;
using metro::test::uniform_line;

TEST_CASE("headway formula examples") {
    auto cfg = uniform_line(4, 2, 100, 10, 20, 300, 0.1);
    auto r = headway_formula(cfg, derive_params(cfg));
    CHECK(r.terms[0] == doctest::Approx(620.0 / 3).epsilon(1e-15));
    CHECK(r.terms[1] == doctest::Approx(370.0 / 3).epsilon(1e-15));
    CHECK(r.terms[2] == 40);
    CHECK(r.headway == r.terms[0]);
    CHECK(r.phase == Phase::FreeFlow);

    // s_min = 60, m = 3: congested term 240.
    cfg = uniform_line(4, 3, 100, 10, 60, 300, 0.1);
    r = headway_formula(cfg, derive_params(cfg));
    CHECK(r.terms[2] == 240);
    CHECK(r.phase == Phase::Congested);
    CHECK(r.headway == 240);

    // No demand: static model.
    cfg = uniform_line(5, 2, 80, 10, 30, 300, 0.0);
    cfg.segments[2].r_nom = 120;
    r = headway_formula(cfg, derive_params(cfg));
    CHECK(r.terms[0] == 440.0 / 2);
    CHECK(r.terms[1] == 150);
    CHECK(r.terms[2] == 50);

    cfg.trains = 5;
    CHECK_THROWS_AS(headway_formula(cfg, derive_params(cfg)), ModelError);
}

TEST_CASE("phase classification") {
    CHECK(classify_phase({620.0 / 3, 370.0 / 3, 40}) == Phase::FreeFlow);
    CHECK(classify_phase({100, 150, 90}) == Phase::MaxFrequency);
    CHECK(classify_phase({100, 150, 190}) == Phase::Congested);
    CHECK(classify_phase({10, 10, 10}) == Phase::FreeFlow);
    CHECK(classify_phase({5, 10, 10}) == Phase::MaxFrequency);
    CHECK(to_string(Phase::MaxFrequency) == "MAX_FREQUENCY");
}

TEST_CASE("frequency is the reciprocal of the headway") {
    auto cfg = uniform_line(4, 2, 100, 10, 20, 300, 0.1);
    auto f = frequency_formula(cfg, derive_params(cfg));
    CHECK(f.frequency == doctest::Approx(2 / (4 * (100 + 30.0 / 9))).epsilon(1e-15));
    CHECK(f.phase == Phase::FreeFlow);

    cfg = uniform_line(4, 3, 100, 10, 60, 300, 0.1);
    f = frequency_formula(cfg, derive_params(cfg));
    CHECK(f.frequency == 1.0 / 240);
    CHECK(f.phase == Phase::Congested);

    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const auto c = random_instance(rng);
        const auto dp = derive_params(c);
        const auto h = headway_formula(c, dp);
        const auto fr = frequency_formula(c, dp);
        REQUIRE(fr.phase == h.phase);
        REQUIRE(std::abs(fr.frequency * h.headway - 1) <= 1e-12);
        REQUIRE(std::abs(h.frequency * h.headway - 1) <= 1e-12);
    }
}

TEST_CASE("headway is nondecreasing in demand") {
    Rng rng(42);
    for (int i = 0; i < 300; ++i) {
        auto c = random_instance(rng);
        const auto before = headway_formula(c, derive_params(c));
        const auto j = rng.integer(0, c.size() - 1);
        if (!c.segments[j].is_platform) continue;
        c.segments[j].lambda_in *= 1.1;
        const auto dp = [&] {
            try {
                return std::optional(derive_params(c));
            } catch (const ModelError&) {
                return std::optional<DerivedParams>();
            }
        }();
        if (!dp) continue;
        const auto after = headway_formula(c, *dp);
        for (int t = 0; t < 3; ++t) REQUIRE(after.terms[t] >= before.terms[t]);
    }
}

TEST_CASE("term monotonicity in the train count") {
    auto cfg = uniform_line(10, 1, 100, 10, 20, 300, 0.1);
    double prev_free = 1e300, prev_cong = 0;
    for (std::size_t m = 1; m < 10; ++m) {
        cfg.trains = m;
        cfg.occupancy = even_occupancy(10, m);
        const auto r = headway_formula(cfg, derive_params(cfg));
        CHECK(r.terms[0] < prev_free);
        CHECK(r.terms[2] > prev_cong);
        prev_free = r.terms[0];
        prev_cong = r.terms[2];
    }
}

TEST_CASE("sweep") {
    auto cfg = uniform_line(6, 2, 100, 10, 20, 300, 0.1);
    cfg.segments[3].r_nom = 200;
    const std::vector<std::size_t> ms{1, 3, 5, 6};
    const std::vector<double> scales{0.5, 1, 10};
    const auto grid = sweep(cfg, ms, scales);
    REQUIRE(grid.cells.size() == 12);
    CHECK(grid.cell(1, 0).trains == 3);
    CHECK(grid.cell(1, 0).demand_scale == 0.5);
    CHECK(grid.cell(0, 1).valid);
    CHECK(grid.cell(0, 1).result.headway ==
          headway_formula(cfg, derive_params(cfg)).headway * 2);  // m = 1 vs m = 2 free flow
    CHECK_FALSE(grid.cell(0, 2).valid);  // x = 1
    CHECK_FALSE(grid.cell(0, 2).error.empty());
    CHECK_FALSE(grid.cell(3, 0).valid);  // m = n
    CHECK(grid.cell(2, 1).valid);
    CHECK(grid.cell(1, 1).demand.x_mean == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("optimal train count") {
    auto cfg = uniform_line(4, 2, 100, 10, 20, 300, 0.1);
    auto exhaustive = [](LineConfig c) {
        std::size_t best = 0;
        double best_h = 1e300;
        for (std::size_t m = 1; m < c.size(); ++m) {
            c.trains = m;
            c.occupancy = even_occupancy(c.size(), m);
            const double h = headway_formula(c, derive_params(c)).headway;
            if (h < best_h) {
                best_h = h;
                best = m;
            }
        }
        return best;
    };
    CHECK(optimal_train_count(cfg) == 3);
    CHECK(optimal_train_count(cfg) == exhaustive(cfg));

    auto still = uniform_line(12, 3, 60, 10, 40, 300, 0.0);
    CHECK(optimal_train_count(still) == exhaustive(still));

    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        const auto c = random_instance(rng);
        REQUIRE(optimal_train_count(c) == exhaustive(c));
    }
    auto small = uniform_line(3, 1, 60, 10, 40, 300, 0.2);
    const auto m = optimal_train_count(small);
    CHECK((m == 1 || m == 2));
    CHECK(m == exhaustive(small));
    CHECK_THROWS_AS(optimal_train_count(uniform_line(2, 1, 60, 10, 40, 300, 0.2)), ModelError);
}
