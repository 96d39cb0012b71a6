#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "crowd/error.hpp"

namespace crowd {

/// V(rho) = rho (1 - rho); transported along characteristics as
/// V = (r0 / r)^(d-1) V0.
inline double v_of_rho(double rho) { return rho * (1.0 - rho); }

/// Regime 1: rho0 <= 1/2 (characteristic moves outward). Regime 2: rho0 > 1/2.
enum class Regime { one = 1, two = 2 };

inline Regime regime_of(double rho0) { return rho0 <= 0.5 ? Regime::one : Regime::two; }

/// Root of V(rho) = v on the branch of the given regime.
double rho_from_v(double v, Regime regime);

/// Inviscid radial characteristic, sampled at uniform output times.
struct Characteristic {
    double r0 = 0.0;
    double rho0 = 0.0;
    int dimension = 3;
    Regime regime = Regime::one;
    std::vector<double> times;
    std::vector<double> r_values;
    std::vector<double> rho_values;
    /// Time at which dr/dt = 1 - 2 rho changed sign (regime 2 turning point).
    std::optional<double> turning_time;
    /// The path reached r = 0 and was stopped.
    bool reached_origin = false;
};

/// Smallest initial radius from which characteristics are launched.
inline constexpr double kDefaultRadialRMin = 1e-3;

/// Integrates dr/dt = 1 - 2 rho, drho/dt = -((d-1)/r) rho (1 - rho) from
/// (r0, rho0) to t_end, recording every dt. The system is smooth through the
/// regime-2 turning point, so integration continues past it and only records
/// when it happened. Throws NumericalError if 1 - 4 V0 (r0/r)^(d-1) drops
/// below -1e-12 (the V invariant was lost).
Characteristic integrate_characteristic(double r0, double rho0, int d, double t_end, double dt);

struct RadialPoint {
    double r = 0.0;
    double rho = 0.0;
};

/// Explicit 3D solution
///   r(t) = sqrt(t^2 + 2 r0 (1 - 2 rho0) t + r0^2),
///   rho(t) = (1 - (t + r0 (1 - 2 rho0)) / r(t)) / 2.
/// Throws NumericalError at the pole r(t) = 0.
RadialPoint closed_form_3d(double r0, double rho0, double t);

/// Left-hand side of the 2D implicit relations,
///   G(r) = 2 r0 V0 log(2 r (1 + sqrt(1 - 4 r0 V0 / r)) - 4 r0 V0) + r sqrt(1 - 4 r0 V0 / r).
double implicit_2d_lhs(double r, double r0, double rho0);

/// Right-hand side: t + r0 {2 V0 log(4 r0 (1-rho0)^2) - 2 rho0 + 1} in regime 1,
/// -t + r0 {2 V0 log(4 r0 rho0^2) + 2 rho0 - 1} in regime 2.
double implicit_2d_rhs(double t, double r0, double rho0, Regime regime);

/// Latest time at which the regime's implicit relation is valid (infinity for
/// regime 1, the turning time for regime 2).
double implicit_2d_window(double r0, double rho0, Regime regime);

/// r(t) from the 2D implicit relation by bracketed root finding (TOMS 748).
/// Throws ConfigError outside the validity window or for a regime that does
/// not match rho0.
double solve_2d_implicit(double r0, double rho0, double t, Regime regime);

/// Sampled initial density rho0(r0) in dimension d.
struct RadialProfile {
    int dimension = 3;
    std::vector<double> r0;
    std::vector<double> rho0;
    /// Closed-form rho0'(r0) at the samples, when available.
    std::optional<std::vector<double>> drho0;
};

void validate(const RadialProfile& p);

/// rho0' at the samples: the supplied derivative, or centered differences
/// (one-sided at the ends).
std::vector<double> profile_derivative(const RadialProfile& p);

/// Smooth bump: zero outside [support_min, support_max], rising as sin^2 to
/// `peak` at `peak_r` and falling as sin^2 back to zero. Samples are uniform
/// on [max(support_min, r_min), support_max].
RadialProfile bump_profile(int d, double support_min, double support_max, double peak_r, double peak,
                           std::size_t samples, double r_min = kDefaultRadialRMin);

/// Constant density on [r_inner, r_outer].
RadialProfile constant_profile(int d, double r_inner, double r_outer, double value, std::size_t samples);

struct ShockReport {
    bool shock_detected = false;
    double shock_time_estimate = 0.0;
    double shock_radius_estimate = 0.0;
    std::pair<double, double> crossing_pair{0.0, 0.0};
    /// 3D only: min over samples of -r0 / (1 - 2 rho0 - 2 r0 rho0') where the
    /// denominator is negative.
    std::optional<double> analytic_time;
    std::optional<double> analytic_r0;
};

struct ShockOptions {
    /// Coarse scan resolution before bisection refinement.
    std::size_t scan_steps = 2000;
    double time_tolerance = 1e-10;
};

/// Launches a characteristic from every sample and reports the earliest time
/// two adjacent characteristics swap order, refined by bisection.
ShockReport detect_shock(const RadialProfile& profile, double t_end, const ShockOptions& opt = {});

/// Analytic 3D crossing time; nullopt if no sample has a negative denominator.
std::optional<std::pair<double, double>> analytic_shock_time_3d(const RadialProfile& profile);

/// (r, rho) of every characteristic of the profile at time t.
std::vector<RadialPoint> radial_snapshot(const RadialProfile& profile, double t);

}  // namespace crowd
