#include "crowd/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace crowd {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 2>;  // (r, rho)

constexpr double kAbsTol = 1e-14;
constexpr double kRelTol = 1e-13;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct CharacteristicRhs {
    double dm1;  // d - 1
    void operator()(const State& y, State& dy, double /*t*/) const {
        dy[0] = 1.0 - 2.0 * y[1];
        dy[1] = -dm1 / y[0] * y[1] * (1.0 - y[1]);
    }
};

void check_dimension(int d) {
    if (d != 2 && d != 3) throw ConfigError("radial dimension must be 2 or 3, got " + std::to_string(d));
}

void check_start(double r0, double rho0) {
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw ConfigError("initial radius must be > 0");
    if (!(rho0 >= 0.0 && rho0 < 1.0)) throw ConfigError("initial density must lie in [0, 1)");
}

// Advances y from t0 to t1 (t1 >= t0) with the controlled 7(8) stepper.
// Returns false if r reached zero.
template <class Observer>
bool advance(State& y, double t0, double t1, int d, Observer&& after_step) {
    auto stepper = ode::make_controlled<ode::runge_kutta_fehlberg78<State>>(kAbsTol, kRelTol);
    const CharacteristicRhs rhs{static_cast<double>(d - 1)};
    double t = t0;
    double dt = std::min(1e-3, std::max(t1 - t0, 1e-12));
    while (t < t1) {
        if (t + dt > t1) dt = t1 - t;
        const State before = y;
        const double t_before = t;
        if (stepper.try_step(rhs, y, t, dt) == ode::fail) continue;
        if (!(y[0] > 0.0) || !std::isfinite(y[0])) {
            y = before;
            return false;
        }
        after_step(t_before, before, t, y);
        if (t1 - t < 1e-15 * std::max(1.0, t1)) t = t1;
    }
    return true;
}

bool advance(State& y, double t0, double t1, int d) {
    return advance(y, t0, t1, d, [](double, const State&, double, const State&) {});
}

}  // namespace

double rho_from_v(double v, Regime regime) {
    const double s = std::sqrt(std::max(0.0, 1.0 - 4.0 * v));
    return regime == Regime::one ? 0.5 * (1.0 - s) : 0.5 * (1.0 + s);
}

Characteristic integrate_characteristic(double r0, double rho0, int d, double t_end, double dt) {
    check_dimension(d);
    check_start(r0, rho0);
    if (!(t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("output step must be > 0");

    Characteristic c{r0, rho0, d, regime_of(rho0)};
    const double v0 = v_of_rho(rho0);
    const std::size_t steps = t_end > 0.0 ? static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9)) : 0;
    c.times.reserve(steps + 1);
    c.times.push_back(0.0);
    c.r_values.push_back(r0);
    c.rho_values.push_back(rho0);

    State y{r0, rho0};
    auto watch = [&](double t_a, const State& a, double t_b, const State& b) {
        const double arg = 1.0 - 4.0 * v0 * std::pow(r0 / b[0], d - 1);
        if (arg < -1e-12) {
            throw NumericalError("characteristic lost the V invariant at t = " + std::to_string(t_b) +
                                 " (square-root argument " + std::to_string(arg) + ")");
        }
        const double sa = 1.0 - 2.0 * a[1];
        const double sb = 1.0 - 2.0 * b[1];
        if (!c.turning_time && sa < 0.0 && sb >= 0.0) {
            c.turning_time = t_a + (t_b - t_a) * (sa / (sa - sb));
        }
    };
    double t = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double next = std::min(t_end, static_cast<double>(k) * dt);
        if (!advance(y, t, next, d, watch)) {
            c.reached_origin = true;
            break;
        }
        t = next;
        c.times.push_back(t);
        c.r_values.push_back(y[0]);
        c.rho_values.push_back(y[1]);
    }
    return c;
}

RadialPoint closed_form_3d(double r0, double rho0, double t) {
    const double b = r0 * (1.0 - 2.0 * rho0);
    const double r = std::sqrt(t * t + 2.0 * b * t + r0 * r0);
    if (!(r > 0.0)) throw NumericalError("closed-form 3D characteristic hits the pole r = 0");
    return {r, 0.5 * (1.0 - (t + b) / r)};
}

double implicit_2d_lhs(double r, double r0, double rho0) {
    const double a = 4.0 * r0 * v_of_rho(rho0);
    const double s = std::sqrt(std::max(0.0, 1.0 - a / r));
    const double log_term = a > 0.0 ? 0.5 * a * std::log(2.0 * r * (1.0 + s) - a) : 0.0;
    return log_term + r * s;
}

double implicit_2d_rhs(double t, double r0, double rho0, Regime regime) {
    const double v0 = v_of_rho(rho0);
    if (regime == Regime::one) {
        const double q = 1.0 - rho0;
        const double log_term = v0 > 0.0 ? 2.0 * v0 * std::log(4.0 * r0 * q * q) : 0.0;
        return t + r0 * (log_term - 2.0 * rho0 + 1.0);
    }
    const double log_term = v0 > 0.0 ? 2.0 * v0 * std::log(4.0 * r0 * rho0 * rho0) : 0.0;
    return -t + r0 * (log_term + 2.0 * rho0 - 1.0);
}

double implicit_2d_window(double r0, double rho0, Regime regime) {
    if (regime == Regime::one) return kInf;
    const double a = 4.0 * r0 * v_of_rho(rho0);
    return implicit_2d_rhs(0.0, r0, rho0, regime) - implicit_2d_lhs(a, r0, rho0);
}

double solve_2d_implicit(double r0, double rho0, double t, Regime regime) {
    check_start(r0, rho0);
    if (regime != regime_of(rho0)) throw ConfigError("regime does not match the initial density");
    if (!(t >= 0.0)) throw ConfigError("time must be >= 0");
    const double window = implicit_2d_window(r0, rho0, regime);
    if (t > window) {
        throw ConfigError("t = " + std::to_string(t) + " is past the regime-2 turning time " + std::to_string(window));
    }
    if (t == 0.0) return r0;

    const double target = implicit_2d_rhs(t, r0, rho0, regime);
    auto f = [&](double r) { return implicit_2d_lhs(r, r0, rho0) - target; };
    const double a = 4.0 * r0 * v_of_rho(rho0);
    double lo = regime == Regime::one ? r0 : std::max(a, r0 - t);
    double hi = regime == Regime::one ? r0 + t : r0;
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        throw ConfigError("no bracket for the 2D implicit relation at t = " + std::to_string(t));
    }
    boost::uintmax_t max_iter = 200;
    const auto [r_lo, r_hi] = boost::math::tools::toms748_solve(
        f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2),
        max_iter);
    const double r = 0.5 * (r_lo + r_hi);
    if (std::abs(f(r)) > 1e-10) {
        throw NumericalError("2D implicit relation residual " + std::to_string(std::abs(f(r))) + " above 1e-10");
    }
    return r;
}

void validate(const RadialProfile& p) {
    check_dimension(p.dimension);
    if (p.r0.size() != p.rho0.size() || p.r0.size() < 2) {
        throw ConfigError("radial profile needs at least two aligned samples");
    }
    for (std::size_t i = 0; i < p.r0.size(); ++i) {
        if (!(p.r0[i] > 0.0)) throw ConfigError("radial profile radii must be > 0");
        if (i > 0 && !(p.r0[i] > p.r0[i - 1])) throw ConfigError("radial profile radii must increase");
        if (!(p.rho0[i] >= 0.0 && p.rho0[i] < 1.0)) throw ConfigError("radial profile densities must lie in [0, 1)");
    }
    if (p.drho0 && p.drho0->size() != p.r0.size()) throw ConfigError("profile derivative length mismatch");
}

std::vector<double> profile_derivative(const RadialProfile& p) {
    if (p.drho0) return *p.drho0;
    const std::size_t n = p.r0.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = i + 1 == n ? n - 1 : i + 1;
        d[i] = (p.rho0[b] - p.rho0[a]) / (p.r0[b] - p.r0[a]);
    }
    return d;
}

RadialProfile bump_profile(int d, double support_min, double support_max, double peak_r, double peak,
                           std::size_t samples, double r_min) {
    check_dimension(d);
    if (!(support_min < peak_r && peak_r < support_max)) throw ConfigError("bump peak must lie inside its support");
    if (!(peak >= 0.0 && peak < 1.0)) throw ConfigError("bump peak must lie in [0, 1)");
    if (samples < 2) throw ConfigError("bump profile needs at least two samples");
    const double start = std::max(support_min, r_min);
    RadialProfile p{d};
    std::vector<double> deriv;
    constexpr double half_pi = std::numbers::pi / 2.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double r = start + (support_max - start) * static_cast<double>(i) / static_cast<double>(samples - 1);
        double value = 0.0;
        double slope = 0.0;
        if (r <= peak_r) {
            const double w = peak_r - support_min;
            const double th = half_pi * (r - support_min) / w;
            value = peak * std::sin(th) * std::sin(th);
            slope = peak * std::sin(2.0 * th) * half_pi / w;
        } else {
            const double w = support_max - peak_r;
            const double th = half_pi * (support_max - r) / w;
            value = peak * std::sin(th) * std::sin(th);
            slope = -peak * std::sin(2.0 * th) * half_pi / w;
        }
        p.r0.push_back(r);
        p.rho0.push_back(std::max(0.0, value));
        deriv.push_back(slope);
    }
    p.drho0 = std::move(deriv);
    return p;
}

RadialProfile constant_profile(int d, double r_inner, double r_outer, double value, std::size_t samples) {
    check_dimension(d);
    if (!(r_inner > 0.0 && r_outer > r_inner)) throw ConfigError("annulus needs 0 < r_inner < r_outer");
    if (samples < 2) throw ConfigError("constant profile needs at least two samples");
    RadialProfile p{d};
    for (std::size_t i = 0; i < samples; ++i) {
        p.r0.push_back(r_inner + (r_outer - r_inner) * static_cast<double>(i) / static_cast<double>(samples - 1));
        p.rho0.push_back(value);
    }
    p.drho0 = std::vector<double>(samples, 0.0);
    return p;
}

std::optional<std::pair<double, double>> analytic_shock_time_3d(const RadialProfile& profile) {
    validate(profile);
    const auto deriv = profile_derivative(profile);
    std::optional<std::pair<double, double>> best;
    for (std::size_t i = 0; i < profile.r0.size(); ++i) {
        const double r0 = profile.r0[i];
        const double denom = 1.0 - 2.0 * profile.rho0[i] - 2.0 * r0 * deriv[i];
        if (denom < 0.0) {
            const double t = -r0 / denom;
            if (!best || t < best->first) best = std::make_pair(t, r0);
        }
    }
    return best;
}

std::vector<RadialPoint> radial_snapshot(const RadialProfile& profile, double t) {
    validate(profile);
    std::vector<RadialPoint> out;
    out.reserve(profile.r0.size());
    for (std::size_t i = 0; i < profile.r0.size(); ++i) {
        if (profile.dimension == 3) {
            out.push_back(closed_form_3d(profile.r0[i], profile.rho0[i], t));
        } else {
            State y{profile.r0[i], profile.rho0[i]};
            if (!advance(y, 0.0, t, 2)) throw NumericalError("characteristic reached the origin");
            out.push_back({y[0], y[1]});
        }
    }
    return out;
}

ShockReport detect_shock(const RadialProfile& profile, double t_end, const ShockOptions& opt) {
    validate(profile);
    if (!(t_end > 0.0)) throw ConfigError("shock detection needs t_end > 0");
    if (opt.scan_steps < 1) throw ConfigError("scan_steps must be >= 1");
    const int d = profile.dimension;
    const std::size_t n = profile.r0.size();
    const double dt = t_end / static_cast<double>(opt.scan_steps);

    ShockReport report;
    if (d == 3) {
        if (auto a = analytic_shock_time_3d(profile)) {
            report.analytic_time = a->first;
            report.analytic_r0 = a->second;
        }
    }

    std::vector<State> states(n);
    for (std::size_t i = 0; i < n; ++i) states[i] = {profile.r0[i], profile.rho0[i]};

    // r of characteristic i at time t, starting from its state at t_from.
    auto radius_at = [&](std::size_t i, const State& from, double t_from, double t) {
        if (d == 3) return closed_form_3d(profile.r0[i], profile.rho0[i], t).r;
        State y = from;
        if (!advance(y, t_from, t, d)) return 0.0;
        return y[0];
    };

    double t_prev = 0.0;
    for (std::size_t k = 1; k <= opt.scan_steps; ++k) {
        const double t = std::min(t_end, static_cast<double>(k) * dt);
        std::vector<State> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (d == 3) {
                const auto p = closed_form_3d(profile.r0[i], profile.rho0[i], t);
                next[i] = {p.r, p.rho};
            } else {
                next[i] = states[i];
                if (!advance(next[i], t_prev, t, d)) next[i] = {0.0, next[i][1]};
            }
        }

        bool any = false;
        double best_t = kInf;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (next[i + 1][0] - next[i][0] > 0.0) continue;
            any = true;
            // Bisection on the gap r_{i+1} - r_i over (t_prev, t].
            double lo = t_prev;
            double hi = t;
            while (hi - lo > opt.time_tolerance) {
                const double mid = 0.5 * (lo + hi);
                const double gap = radius_at(i + 1, states[i + 1], t_prev, mid) - radius_at(i, states[i], t_prev, mid);
                if (gap > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if (hi < best_t) {
                best_t = hi;
                best_i = i;
            }
        }
        if (any) {
            report.shock_detected = true;
            report.shock_time_estimate = best_t;
            report.crossing_pair = {profile.r0[best_i], profile.r0[best_i + 1]};
            report.shock_radius_estimate = 0.5 * (radius_at(best_i, states[best_i], t_prev, best_t) +
                                                  radius_at(best_i + 1, states[best_i + 1], t_prev, best_t));
            return report;
        }
        states = std::move(next);
        t_prev = t;
    }
    return report;
}

}  // namespace crowd
