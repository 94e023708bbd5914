#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "rdgcn/bandit.hpp"
#include "rdgcn/error.hpp"

using namespace rdgcn;

TEST_CASE("reward follows the accuracy gap") {
    CurvatureBandit bandit;
    CHECK(bandit.reward(0.70) == +1);  // first interval always rewards +1
    CHECK(bandit.reward(0.72) == +1);
    CHECK(bandit.reward(0.72) == -1);  // ties count as no improvement
    CHECK(bandit.reward(0.60) == -1);
    CHECK(bandit.reward(0.61) == +1);
}

TEST_CASE("accuracy outside the unit interval is rejected") {
    CurvatureBandit bandit;
    CHECK_THROWS_AS(bandit.reward(-0.1), InputError);
    CHECK_THROWS_AS(bandit.reward(1.5), InputError);
}

TEST_CASE("steps move the curvature by S and clamp at the bounds") {
    CurvatureBandit bandit;
    CHECK(bandit.curvature() == doctest::Approx(0.1));
    bandit.step(+1);
    CHECK(bandit.curvature() == doctest::Approx(0.2));
    bandit.step(-1);
    bandit.step(-1);  // would cross the lower bound
    CHECK(bandit.curvature() == doctest::Approx(0.1));

    BanditConfig near_top;
    near_top.initial_k = 2.0;
    CurvatureBandit top(near_top);
    top.step(+1);
    CHECK(top.curvature() == doctest::Approx(2.0));
}

TEST_CASE("termination needs a full window whose rewards cancel") {
    BanditConfig cfg;
    cfg.window = 10;
    CurvatureBandit bandit(cfg);

    SUBCASE("an alternating stream terminates exactly when the window fills") {
        for (int b = 0; b < 10; ++b) {
            CHECK_FALSE(bandit.frozen());
            CHECK_FALSE(bandit.terminated());
            bandit.step(b % 2 == 0 ? +1 : -1);
        }
        CHECK(bandit.terminated());
        CHECK(bandit.frozen());
        CHECK(bandit.intervals() == 10);
    }
    SUBCASE("a constant stream never terminates") {
        for (int b = 0; b < 40; ++b) bandit.step(+1);
        CHECK_FALSE(bandit.frozen());
        CHECK(bandit.curvature() == doctest::Approx(2.0));  // clamped ceiling
    }
    SUBCASE("a partially filled window is never converged") {
        for (int b = 0; b < 5; ++b) bandit.step(b % 2 == 0 ? +1 : -1);
        CHECK_FALSE(bandit.terminated());
    }
}

TEST_CASE("the freeze latches: later steps keep the curvature") {
    BanditConfig cfg;
    cfg.window = 4;
    CurvatureBandit bandit(cfg);
    bandit.step(+1);
    bandit.step(-1);
    bandit.step(+1);
    bandit.step(-1);
    REQUIRE(bandit.frozen());
    const double frozen_k = bandit.curvature();
    const int frozen_b = bandit.intervals();
    for (int i = 0; i < 20; ++i) bandit.step(+1);
    CHECK(bandit.curvature() == frozen_k);
    CHECK(bandit.intervals() == frozen_b);
    CHECK_THROWS_AS(bandit.reward(0.5), InternalError);
}

TEST_CASE("curvature stays within bounds for any reward stream") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        BanditConfig cfg;
        cfg.window = 1 + static_cast<int>(rng() % 12);
        CurvatureBandit bandit(cfg);
        for (int b = 0; b < 200; ++b) {
            bandit.step((rng() & 1u) ? +1 : -1);
            CHECK(bandit.curvature() >= cfg.k_min);
            CHECK(bandit.curvature() <= cfg.k_max);
        }
    }
}

TEST_CASE("identical reward streams give identical trajectories") {
    std::mt19937_64 rng(23);
    std::vector<int> stream;
    for (int b = 0; b < 60; ++b) stream.push_back((rng() & 1u) ? +1 : -1);

    CurvatureBandit a;
    CurvatureBandit b;
    for (int r : stream) {
        a.step(r);
        b.step(r);
        CHECK(a.curvature() == b.curvature());
        CHECK(a.frozen() == b.frozen());
    }
}

TEST_CASE("degenerate configurations are rejected") {
    BanditConfig cfg;
    cfg.window = 0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.window = 10;
    cfg.step_size = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.step_size = 0.1;
    cfg.initial_k = 5.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
}
