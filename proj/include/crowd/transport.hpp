#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "crowd/eikonal.hpp"
#include "crowd/grid.hpp"

namespace crowd {

/// Tridiagonal matrix: lower[k] = M(k, k-1), diag[k] = M(k, k), upper[k] = M(k, k+1).
/// lower[0] and upper[n-1] are unused and kept at zero.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }
    /// Entry (i, j); zero outside the three bands.
    double at(std::size_t i, std::size_t j) const;
    std::vector<double> apply(std::span<const double> x) const;
    Tridiagonal transposed() const;
};

/// Solves M x = rhs by the Thomas algorithm. Throws NumericalError with a
/// pivot-ratio condition estimate if a pivot vanishes.
std::vector<double> solve_tridiagonal(const Tridiagonal& m, std::span<const double> rhs);

/// Density closures of the transport operator at the two endpoints.
struct FluxSpec {
    DensityBoundary left = NoFlux{};
    DensityBoundary right = NoFlux{};

    static FluxSpec from(const BoundaryConditions& bc) { return {bc.left.rho, bc.right.rho}; }
};

/// Linearized transport operator built from the Hamiltonian
///   Ñ_k(u) = (1-rho_k)^2 [max(u_k-u_{k-1},0)^2 + max(u_k-u_{k+1},0)^2]/(2h^2)
///            - eps (u_{k+1} - 2u_k + u_{k-1})/h^2
/// with mirror ghosts at both endpoints.
///
/// `jacobian` is D_u Ñ. `matrix` is its adjoint in the trapezoid inner
/// product, W^-1 J^T W; in the interior this is exactly J^T, and at the
/// endpoints the half weights turn the mirror rows into consistent no-flux
/// closures. The density equation is rho_t = -matrix rho + source.
struct TransportOperator {
    Grid1D grid;
    double epsilon = 0.0;
    FluxSpec flux;
    Tridiagonal jacobian;
    Tridiagonal matrix;
    /// Affine term: j / w_b at influx endpoints, zero elsewhere.
    std::vector<double> source;
    std::vector<double> weights;
    /// Nodes where rho was clamped to rho_cap inside (1-rho)^2.
    std::vector<bool> congestion;
};

struct AssemblyOptions {
    double rho_cap = kDefaultRhoCap;
    /// When set, u must satisfy the eikonal scheme for rho to this scaled
    /// residual, otherwise assembly is refused.
    std::optional<double> require_solved_u;
    /// Value boundary used by the staleness check.
    BoundaryConditions bc{};
};

/// Ñ_k(u) at node k (mirror ghosts at the endpoints).
double hj_tilde_residual(const ValueField& u, const DensityField& rho, std::size_t k, double epsilon,
                         double rho_cap = kDefaultRhoCap);

/// Ñ(u) at every node.
std::vector<double> hj_tilde_vector(std::span<const double> u, const DensityField& rho, double epsilon,
                                    double rho_cap = kDefaultRhoCap);

/// Analytic D_u Ñ. The derivative of max(s,0)^2 at the tie s = 0 is taken as 0.
Tridiagonal tilde_jacobian(const ValueField& u, const DensityField& rho, double epsilon,
                           double rho_cap = kDefaultRhoCap);

TransportOperator assemble_adjoint(const ValueField& u, const DensityField& rho, double epsilon,
                                   const FluxSpec& flux, const AssemblyOptions& opt = {});

/// Net rate at which mass enters the non-Dirichlet nodes through each endpoint
/// for the density rho under op: the influx current at influx ends, the
/// discrete flux into the prescribed node at Dirichlet ends, zero if closed.
std::array<double, 2> boundary_inflow(const TransportOperator& op, std::span<const double> rho);

/// Trapezoid mass of the nodes whose density is not prescribed.
double free_mass(const TransportOperator& op, std::span<const double> rho);

/// One implicit Euler step; Dirichlet densities are sampled at t_next.
DensityField step_transport(const DensityField& rho, const TransportOperator& op, double dt,
                            double t_next = 0.0);

/// One BDF2 step from (rho_prev, rho) with uniform step dt.
DensityField step_transport_bdf2(const DensityField& rho, const DensityField& rho_prev,
                                 const TransportOperator& op, double dt, double t_next = 0.0);

/// Fixed-step BDF2 integrator with an implicit Euler start.
class TransportStepper {
public:
    explicit TransportStepper(double dt);

    DensityField step(const DensityField& rho, const TransportOperator& op, double t_next);
    double dt() const noexcept { return dt_; }
    std::size_t steps_taken() const noexcept { return steps_; }

private:
    double dt_;
    std::size_t steps_ = 0;
    std::optional<DensityField> previous_;
};

}  // namespace crowd
