#include <doctest.h>

#include <cmath>
#include <optional>

#include "crowd/stationary.hpp"
#include "oracles.hpp"

using namespace crowd;

namespace {

double max_valid_error(const StationarySolution& s) {
    double m = 0.0;
    for (std::size_t k = s.first_valid; k < s.rho.size(); ++k) {
        m = std::max(m, std::abs(s.rho[k] - oracle::stationary_rho(s.epsilon, s.j, s.grid.x(k))));
    }
    return m;
}

}  // namespace

TEST_SUITE("stationary") {

TEST_CASE("closed-form oracle satisfies the flux ODE and the outlet condition") {
    for (double eps : {0.05, 0.3, 1.0}) {
        for (double j : {-0.3, -0.05, 0.1, 0.2, 0.25, 0.27}) {
            CHECK(oracle::stationary_rho(eps, j, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
            const double lo = oracle::stationary_pole(eps, j);
            for (int i = 1; i < 20; ++i) {
                const double x = lo + (1.0 - lo) * i / 20.0;
                if (x - lo < 0.05) continue;
                const double h = 1e-5;
                const double r = oracle::stationary_rho(eps, j, x);
                const double dr =
                    (oracle::stationary_rho(eps, j, x + h) - oracle::stationary_rho(eps, j, x - h)) / (2 * h);
                const double scale = 1.0 + std::abs(r) * std::abs(r);
                CHECK(std::abs(eps * dr - (r - r * r - j)) <= 1e-6 * scale);
            }
        }
    }
}

TEST_CASE("backward integration matches the closed form") {
    for (double eps : {0.05, 0.3, 1.0}) {
        for (double j : {-0.2, 0.05, 0.2, 0.25}) {
            const auto s = solve_stationary({eps, j}, 201);
            CHECK(max_valid_error(s) <= 1e-8);
        }
    }
    const auto sup = solve_stationary({0.1, 0.6}, 201);
    CHECK(sup.supercritical);
    CHECK(max_valid_error(sup) <= 1e-8 * std::max(1.0, max_value(std::span(sup.rho.vector()).subspan(sup.first_valid))));
}

TEST_CASE("zero current is the empty corridor") {
    const auto s = solve_stationary({0.5, 0.0}, 51);
    for (double v : s.rho.values()) CHECK(v == 0.0);
    CHECK_FALSE(s.supercritical);
}

TEST_CASE("large current at eps = 1 is supercritical") {
    const auto s = solve_stationary({1.0, 1.3}, 201);
    CHECK(s.supercritical);
    const auto ok = solve_stationary({1.0, 1.0}, 201);
    CHECK_FALSE(ok.supercritical);
    CHECK(ok.rho_at_0 < 1.0);
}

TEST_CASE("critical current at eps = 1") {
    const auto cc = critical_current(1.0, 1e-4);
    CHECK(cc.j_c >= 1.1);
    CHECK(cc.j_c <= 1.3);
    CHECK(cc.bracket_width <= 1e-4);
    CHECK(std::abs(cc.j_c - oracle::critical_current_closed_form(1.0)) <= 1e-4);
}

TEST_CASE("critical current agrees with the closed form across viscosities") {
    for (double eps : {0.01, 0.05, 0.1, 0.3, 2.0}) {
        const auto cc = critical_current(eps, 1e-6);
        const double ref = oracle::critical_current_closed_form(eps);
        CHECK(std::abs(cc.j_c - ref) <= 1e-6);
        CHECK(cc.j_c > 0.25);
    }
}

TEST_CASE("critical current decreases toward 1/4 as viscosity vanishes") {
    double prev = 1e9;
    for (double eps : {2.0, 1.0, 0.3, 0.1, 0.05, 0.01}) {
        const double jc = critical_current(eps, 1e-6).j_c;
        CHECK(jc < prev);
        prev = jc;
    }
}

TEST_CASE("rho(0) is increasing in j, and decreasing in eps below j = 1/4") {
    double prev = -1e9;
    for (double j = -0.2; j <= 0.25; j += 0.05) {
        const double r = solve_stationary({0.3, j}, 101).rho_at_0;
        CHECK(r > prev);
        prev = r;
    }
    prev = 1e9;
    for (double eps : {0.05, 0.1, 0.3, 0.6, 1.0}) {
        const double r = solve_stationary({eps, 0.2}, 101).rho_at_0;
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("subcritical family at j = 0.2 stays below 1") {
    for (double eps : {0.01, 0.1, 0.5, 1.0, 1.5}) {
        const auto s = solve_stationary({eps, 0.2}, 201);
        CHECK_FALSE(s.supercritical);
        CHECK(max_value(s.rho.values()) < 1.0);
        CHECK(min_value(s.rho.values()) >= 0.0);
    }
}

TEST_CASE("fixed current j = 0.5 across viscosities") {
    CHECK(solve_stationary({0.3, 0.5}, 201).supercritical);
    std::optional<StationarySolution> prev;
    for (double eps : {0.5, 0.75, 1.0, 1.25, 1.5}) {
        auto s = solve_stationary({eps, 0.5}, 201);
        CHECK_FALSE(s.supercritical);
        CHECK(max_value(s.rho.values()) < 1.0);
        if (prev) {
            for (std::size_t k = 0; k < 200; ++k) CHECK(s.rho[k] < prev->rho[k]);
        }
        prev = std::move(s);
    }
}

TEST_CASE("solutions are pointwise increasing in j") {
    const std::vector<double> js{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1};
    const auto all = sweep_currents(1.0, js, 101);
    for (std::size_t i = 1; i < all.size(); ++i) {
        for (std::size_t k = 0; k < 100; ++k) CHECK(all[i].rho[k] > all[i - 1].rho[k]);
    }
}

TEST_CASE("two-point problem recovers the current") {
    for (double rl : {-0.2, 0.3, 0.7}) {
        const auto s = solve_stationary_two_point(0.05, rl, 201);
        CHECK(s.rho[0] == doctest::Approx(rl).epsilon(1e-9));
        CHECK(s.rho[200] == 0.0);
        CHECK(max_valid_error(s) <= 1e-8);
    }
    const auto trend = solve_stationary_two_point(0.05, -0.2, 401);
    CHECK(trend.j < 0.0);
}

TEST_CASE("sweep and validation") {
    const std::vector<double> js{0.0, 0.1, 0.2};
    const auto all = sweep_currents(0.5, js, 41);
    REQUIRE(all.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(all[i].j == js[i]);
    CHECK_THROWS_AS(solve_stationary({0.0, 0.1}, 41), ConfigError);
    CHECK_THROWS_AS(solve_stationary({0.5, 0.1}, 2), ConfigError);
    CHECK_THROWS_AS(critical_current(-1.0), ConfigError);
}

}  // TEST_SUITE
