#include "crowd/stationary.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

namespace crowd {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 1>;

constexpr double kAbsTol = 1e-14;
constexpr double kRelTol = 1e-13;

struct Riccati {
    double epsilon;
    double j;
    void operator()(const State& y, State& dydx, double /*x*/) const {
        dydx[0] = (y[0] - y[0] * y[0] - j) / epsilon;
    }
};

void check(const StationaryProblem& p) {
    if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
        throw ConfigError("stationary problem needs epsilon > 0");
    }
    if (!std::isfinite(p.j)) throw ConfigError("stationary current must be finite");
}

bool in_guard(double v) { return v >= kStationaryLowerGuard && v <= kStationaryUpperGuard; }

// Integrates from x = 1 down to each target in `targets` (decreasing), storing
// values. Returns the escape abscissa if the solution leaves the guard band.
std::optional<double> integrate_backward(const StationaryProblem& p, std::span<const double> targets,
                                         std::span<double> out) {
    auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(kAbsTol, kRelTol);
    const Riccati rhs{p.epsilon, p.j};
    State y{0.0};
    double x = 1.0;
    double dx = -1e-3 * std::min(1.0, p.epsilon);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double target = targets[i];
        int guard_iterations = 0;
        while (x > target) {
            if (++guard_iterations > 10000000) throw NumericalError("stationary integration stalled");
            if (x + dx < target) dx = target - x;
            const double x_before = x;
            if (stepper.try_step(rhs, y, x, dx) == ode::fail) continue;
            if (!std::isfinite(y[0]) || !in_guard(y[0])) return x_before;
            if (x - target < 1e-15 * std::max(1.0, std::abs(target))) x = target;
        }
        out[i] = y[0];
    }
    return std::nullopt;
}

// rho(0; j, eps), or +/-infinity if the solution escaped upward/downward.
double rho_at_origin(const StationaryProblem& p) {
    if (p.j == 0.0) return 0.0;
    const std::array<double, 1> target{0.0};
    std::array<double, 1> value{0.0};
    if (integrate_backward(p, target, value)) {
        return p.j > 0.25 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return value[0];
}

}  // namespace

StationarySolution solve_stationary(const StationaryProblem& p, std::size_t n) {
    check(p);
    const Grid1D grid(0.0, 1.0, n);
    std::vector<double> rho(n, 0.0);
    std::vector<double> targets(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) targets[i] = grid.x(n - 2 - i);
    std::vector<double> values(n - 1, 0.0);

    std::optional<double> escape;
    if (p.j != 0.0) escape = integrate_backward(p, targets, values);

    std::size_t first_valid = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t k = n - 2 - i;
        if (escape && grid.x(k) < *escape) {
            first_valid = k + 1;
            break;
        }
        rho[k] = values[i];
    }
    if (escape) {
        const double fill = p.j > 0.25 ? kStationaryUpperGuard : kStationaryLowerGuard;
        for (std::size_t k = 0; k < first_valid; ++k) rho[k] = fill;
    }

    StationarySolution s{grid, DensityField(grid, std::move(rho))};
    s.epsilon = p.epsilon;
    s.j = p.j;
    s.escape_x = escape;
    s.first_valid = first_valid;
    s.rho_at_0 = escape ? (p.j > 0.25 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity())
                        : s.rho[0];
    s.supercritical = (escape && p.j > 0.25) || max_value(s.rho.values()) > 1.0;
    return s;
}

CriticalCurrent critical_current(double epsilon, double tol) {
    if (!(epsilon > 0.0)) throw ConfigError("critical current needs epsilon > 0");
    if (!(tol > 0.0)) throw ConfigError("critical current tolerance must be > 0");

    CriticalCurrent out{epsilon};
    std::vector<std::pair<double, double>> seen;
    auto excess = [&](double j) {
        const double r = rho_at_origin({epsilon, j});
        ++out.evaluations;
        seen.emplace_back(j, r);
        return r - 1.0;
    };
    auto check_monotone = [&] {
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 1; i < seen.size(); ++i) {
            if (seen[i].second < seen[i - 1].second) {
                throw NumericalError("rho(0; j) is not increasing in j near j = " +
                                     std::to_string(seen[i].first) + "; stationary solver fault");
            }
        }
    };

    double lo = 0.0;
    double hi = 1.0;
    if (excess(lo) > 0.0) throw NumericalError("rho(0) exceeds 1 at zero current");
    while (excess(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw NumericalError("critical current bracket did not close");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    check_monotone();
    out.j_c = 0.5 * (lo + hi);
    out.bracket_width = hi - lo;
    return out;
}

std::vector<StationarySolution> sweep_currents(double epsilon, std::span<const double> j_values, std::size_t n) {
    std::vector<StationarySolution> out;
    out.reserve(j_values.size());
    for (double j : j_values) out.push_back(solve_stationary({epsilon, j}, n));
    return out;
}

StationarySolution solve_stationary_two_point(double epsilon, double rho_left, std::size_t n, double j_tol) {
    if (!(epsilon > 0.0)) throw ConfigError("stationary problem needs epsilon > 0");
    if (!(rho_left > kStationaryLowerGuard && rho_left < 1.0)) {
        throw ConfigError("left density must lie in (" + std::to_string(kStationaryLowerGuard) + ", 1)");
    }
    auto at0 = [&](double j) { return rho_at_origin({epsilon, j}); };
    double lo = -1.0;
    double hi = 0.25;
    while (at0(lo) > rho_left) {
        lo *= 2.0;
        if (lo < -1e12) throw NumericalError("two-point stationary bracket did not close");
    }
    while (at0(hi) < rho_left) {
        hi *= 2.0;
        if (hi > 1e12) throw NumericalError("two-point stationary bracket did not close");
    }
    for (int it = 0; it < 200 && hi - lo > j_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (at0(mid) > rho_left) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return solve_stationary({epsilon, 0.5 * (lo + hi)}, n);
}

}  // namespace crowd
