#pragma once

#include <cstddef>
#include <vector>

#include "crowd/grid.hpp"

namespace crowd {

inline constexpr double kDefaultRhoCap = 1.0 - 1e-6;

struct EikonalConfig {
    int max_iterations = 10000;
    double residual_tolerance = 1e-10;
    /// Ceiling applied to rho inside 1/(1 - rho)^2.
    double rho_cap = kDefaultRhoCap;

    friend bool operator==(const EikonalConfig&, const EikonalConfig&) = default;
};

void validate(const EikonalConfig& cfg);

struct EikonalSolution {
    ValueField u;
    /// Number of single-direction Gauss-Seidel sweeps performed.
    int sweeps = 0;
    /// sup |N_k(u)| over non-Dirichlet nodes.
    double residual = 0.0;
    /// sup |N_k(u)| / max(1, 1/(2(1-rho_k)^2)); this is what the tolerance gates.
    double scaled_residual = 0.0;
    /// Nodes where rho exceeded rho_cap and was clamped.
    std::vector<std::size_t> capped_nodes;
};

/// Upwind kinetic term [max(c-l,0)^2 + max(c-r,0)^2] / (2h^2) shared by the
/// eikonal operator and the transport Hamiltonian.
inline double upwind_kinetic(double left, double center, double right, double h) {
    const double a = center - left > 0.0 ? center - left : 0.0;
    const double b = center - right > 0.0 ? center - right : 0.0;
    return (a * a + b * b) / (2.0 * h * h);
}

/// (1 - min(rho, cap))^-2; sets *capped when the clamp was active.
double slowness_squared(double rho, double rho_cap, bool* capped = nullptr);

/// Monotone eikonal residual at node k:
///   N_k(u) = [max(u_k-u_{k-1},0)^2 + max(u_k-u_{k+1},0)^2] / (2h^2) - 1/(2(1-rho_k)^2).
/// Endpoint nodes require a reflecting u condition (mirror ghost); asking for
/// the residual at an exit node is a ConfigError.
double hj_residual(const ValueField& u, const DensityField& rho, std::size_t k,
                   const BoundaryConditions& bc = {}, double rho_cap = kDefaultRhoCap);

/// Solves N(u) = 0 by alternating Gauss-Seidel sweeps with the exact local
/// quadratic update. Throws ConfigError without an exit endpoint and
/// ConvergenceError if the tolerance is not met within max_iterations sweeps.
EikonalSolution solve_eikonal(const DensityField& rho, const BoundaryConditions& bc,
                              const EikonalConfig& cfg = {});

}  // namespace crowd
