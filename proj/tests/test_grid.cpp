#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crowd/grid.hpp"

using namespace crowd;

TEST_SUITE("grid") {

TEST_CASE("build_grid examples") {
    const Grid1D a = build_grid(0.0, 1.0, 101);
    CHECK(a.spacing() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(a.size() == 101);

    const Grid1D b = build_grid(0.0, 1.0, 3);
    CHECK(b.x(0) == 0.0);
    CHECK(b.x(1) == 0.5);
    CHECK(b.x(2) == 1.0);

    const Grid1D c = build_grid(0.0, 2.0, 201);
    CHECK(c.spacing() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(c.x(100) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("build_grid rejects bad input") {
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 2), ConfigError);
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 10), ConfigError);
    CHECK_THROWS_AS(build_grid(1.0, 0.0, 10), ConfigError);
    CHECK_THROWS_AS(build_grid(0.0, std::nan(""), 10), ConfigError);
}

TEST_CASE("nodes are increasing and equispaced to one ulp") {
    for (std::size_t n : {3u, 17u, 101u, 1001u}) {
        const Grid1D g(-0.3, 2.7, n);
        for (std::size_t k = 1; k < n; ++k) {
            CHECK(g.x(k) > g.x(k - 1));
            const double gap = g.x(k) - g.x(k - 1);
            const double scale = std::max({std::abs(g.x(k)), std::abs(g.x(k - 1)), std::abs(g.x_min())});
            const double ulp = std::nextafter(scale, INFINITY) - scale;
            CHECK(std::abs(gap - g.spacing()) <= 2.0 * ulp);
        }
    }
}

TEST_CASE("sample_function examples") {
    const Grid1D g(0.0, 1.0, 101);
    const auto ex1 = sample_function<DensityField>(g, [](double x) {
        const double s = std::sin(3.0 * std::numbers::pi * x);
        return 0.9 * s * s;
    });
    CHECK(max_value(ex1.values()) == doctest::Approx(0.9).epsilon(1e-12));

    const auto poly = sample_function<DensityField>(g, [](double x) { return x * x * (1 - x) * (1 - x); });
    CHECK(max_value(poly.values()) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(poly[50] == doctest::Approx(1.0 / 16.0).epsilon(1e-15));

    const auto zero = sample_function<ValueField>(g, [](double) { return 0.0; });
    for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("sample_function read-back is exact") {
    const Grid1D g(0.0, 2.0, 57);
    auto f = [](double x) { return std::exp(-x) * std::cos(7.0 * x); };
    const auto field = sample_function<ValueField>(g, f);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(field[k] == f(g.x(k)));
}

TEST_CASE("sample_function names the non-finite node") {
    const Grid1D g(0.0, 1.0, 11);
    try {
        sample_function<DensityField>(g, [](double x) { return 1.0 / (x - 0.5); });
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("node 5") != std::string::npos);
    }
}

TEST_CASE("fields validate length and finiteness") {
    const Grid1D g(0.0, 1.0, 5);
    CHECK_THROWS_AS(DensityField(g, std::vector<double>(4, 0.0)), ConfigError);
    CHECK_THROWS_AS(DensityField(g, {0, 0, INFINITY, 0, 0}), NumericalError);
    const DensityField ok(g, {0, 0.5, 1.2, -0.1, 0});
    CHECK_FALSE(is_physical(ok));
    CHECK(is_physical(DensityField(g, {0, 0.5, 1.0, 0.2, 0})));
    CHECK(is_physical(DensityField(g, {0, 0.5, 1.0 + 1e-10, 0.2, 0}), 1e-9));
}

TEST_CASE("trapezoid quadrature") {
    const Grid1D g(0.0, 1.0, 11);
    const auto w = trapezoid_weights(g);
    CHECK(w.front() == doctest::Approx(0.05));
    CHECK(w[5] == doctest::Approx(0.1));
    const auto lin = sample_function<ValueField>(g, [](double x) { return 3.0 * x + 1.0; });
    CHECK(integrate(g, lin.values()) == doctest::Approx(2.5).epsilon(1e-14));
    const auto one = sample_function<ValueField>(g, [](double) { return 1.0; });
    CHECK(integrate(g, one.values()) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("boundary vocabulary") {
    const DirichletDensity ramp{-0.2, 10.0};
    CHECK(ramp.at(0.0) == 0.0);
    CHECK(ramp.at(1.0) == doctest::Approx(-0.2 * (1.0 - std::exp(-10.0))));
    const DirichletDensity fixed{0.3, 0.0};
    CHECK(fixed.at(5.0) == 0.3);

    BoundaryConditions bc;
    bc.left.rho = InfluxDensity{1.0};
    bc.left.u = ReflectingValue{};
    CHECK(std::holds_alternative<InfluxDensity>(bc.at(Side::left).rho));
    CHECK(std::holds_alternative<DirichletValue>(bc.at(Side::right).u));
    CHECK_NOTHROW(validate(bc));

    bc.left.rho = InfluxDensity{-1.0};
    CHECK_THROWS_AS(validate(bc), ConfigError);
}

}  // TEST_SUITE
