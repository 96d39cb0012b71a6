#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "crowd/simulation.hpp"

namespace crowd {

inline constexpr double kBoundsTolerance = 1e-9;
inline constexpr double kDefaultAlpha = -2.0;

/// True iff every snapshot satisfies -tol <= rho <= 1 + tol.
bool check_bounds(const SimulationRecord& rec, double tol = kBoundsTolerance);

struct LyapunovReport {
    double alpha = kDefaultAlpha;
    /// I(t_i) = int (1 - rho)^(alpha + 1) dx, one per snapshot up to the first
    /// singular one.
    std::vector<double> series;
    /// Largest log-slope of I over the first 10% of the run, floored at 0.
    double c_hat = 0.0;
    /// I(t) <= I(0) exp(c_hat t) on every computed snapshot.
    bool gronwall_ok = true;
    /// First snapshot with rho >= 1 somewhere.
    std::optional<std::size_t> singular_index;
    /// int_0^T int |D (1 - rho)^((alpha + 1)/2)|^2 dx dt over the computed
    /// snapshots (forward differences in x, trapezoid in t).
    double dissipation_integral = 0.0;
};

LyapunovReport lyapunov_series(const SimulationRecord& rec, double alpha = kDefaultAlpha);

struct LpSeries {
    double p = 2.0;
    /// int |Du|^(2p) dx per snapshot, computed as int (1 - rho)^(-2p) dx.
    std::vector<double> values;
    /// Infinite if rho >= 1 anywhere.
    double supremum = 0.0;
    /// Snapshot time and node of the supremum (or of the first rho >= 1).
    double sup_time = 0.0;
    std::optional<std::size_t> singular_node;
};

/// |Du|^(2p) norms via the eikonal identity |Du|^2 = (1 - rho)^(-2).
std::map<double, LpSeries> du_lp_norms(const SimulationRecord& rec, std::span<const double> p_values);

/// The same quantity from the stored u snapshots: |Du|^2 at node k is
/// [max(u_k - u_{k-1}, 0)^2 + max(u_k - u_{k+1}, 0)^2] / h^2 (one-sided at
/// the ends).
std::map<double, LpSeries> du_lp_norms_from_u(const SimulationRecord& rec, std::span<const double> p_values);

struct EstimateReport {
    bool bounds_ok = true;
    LyapunovReport lyapunov;
    std::map<double, LpSeries> lp_norms;
};

EstimateReport estimate_report(const SimulationRecord& rec, double alpha = kDefaultAlpha,
                               std::span<const double> p_values = {});

}  // namespace crowd
