#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crowd/grid.hpp"

namespace crowd {

/// Stationary flow on [0, 1]: constant flux rho(1 - rho) - eps rho_x = j with
/// rho(1) = 0, i.e.  eps rho' = rho - rho^2 - j.
struct StationaryProblem {
    double epsilon = 1.0;
    /// Net current through the domain (agents per unit time, left to right).
    double j = 0.0;
};

struct StationarySolution {
    Grid1D grid;
    DensityField rho;
    double epsilon = 0.0;
    double j = 0.0;
    double rho_at_0 = 0.0;
    /// max rho > 1, or the solution blew up before reaching x = 0.
    bool supercritical = false;
    /// Where the backward integration left the guard band, if it did.
    std::optional<double> escape_x;
    /// Nodes k >= first_valid carry the solution; nodes before it lie beyond
    /// the escape point and hold the guard value.
    std::size_t first_valid = 0;
};

/// Guard band for the backward integration.
inline constexpr double kStationaryLowerGuard = -1.0;
inline constexpr double kStationaryUpperGuard = 10.0;

/// Integrates backward from x = 1 with an adaptive 7(8) Runge-Kutta method and
/// samples the result at the nodes of a uniform n-node grid on [0, 1].
StationarySolution solve_stationary(const StationaryProblem& p, std::size_t n);

/// Supercritical-ness of rho(0; j, eps) as used by critical_current.
struct CriticalCurrent {
    double epsilon = 0.0;
    double j_c = 0.0;
    double bracket_width = 0.0;
    int evaluations = 0;
};

/// Bisection on j of rho(0; j, eps) - 1 with a geometrically grown upper
/// bracket (factor 2). Throws NumericalError if the sampled map is not
/// increasing in j.
CriticalCurrent critical_current(double epsilon, double tol = 1e-4);

/// Solves every j in order.
std::vector<StationarySolution> sweep_currents(double epsilon, std::span<const double> j_values, std::size_t n);

/// Stationary solution with rho(0) = rho_left and rho(1) = 0; the current j
/// is found by bisection on the monotone map j -> rho(0; j, eps).
StationarySolution solve_stationary_two_point(double epsilon, double rho_left, std::size_t n,
                                              double j_tol = 1e-13);

}  // namespace crowd
