#include "crowd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowd {

double Tridiagonal::at(std::size_t i, std::size_t j) const {
    if (i == j) return diag[i];
    if (j + 1 == i) return lower[i];
    if (i + 1 == j) return upper[i];
    return 0.0;
}

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += lower[i] * x[i - 1];
        if (i + 1 < n) s += upper[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

Tridiagonal Tridiagonal::transposed() const {
    const std::size_t n = size();
    Tridiagonal t(n);
    t.diag = diag;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        t.upper[i] = lower[i + 1];
        t.lower[i + 1] = upper[i];
    }
    return t;
}

std::vector<double> solve_tridiagonal(const Tridiagonal& m, std::span<const double> rhs) {
    const std::size_t n = m.size();
    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    double max_diag = 0.0;
    for (double v : m.diag) max_diag = std::max(max_diag, std::abs(v));
    double min_pivot = std::numeric_limits<double>::infinity();

    double pivot = m.diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) pivot = m.diag[i] - m.lower[i] * c[i - 1];
        min_pivot = std::min(min_pivot, std::abs(pivot));
        if (!(std::abs(pivot) > 1e-300) || !std::isfinite(pivot)) {
            throw NumericalError("singular transport system at row " + std::to_string(i) +
                                 " (condition estimate " +
                                 std::to_string(max_diag / std::max(min_pivot, 1e-300)) + ")");
        }
        c[i] = i + 1 < n ? m.upper[i] / pivot : 0.0;
        d[i] = (rhs[i] - (i > 0 ? m.lower[i] * d[i - 1] : 0.0)) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(d[i])) {
            throw NumericalError("non-finite transport solution (condition estimate " +
                                 std::to_string(max_diag / min_pivot) + ")");
        }
    }
    return d;
}

namespace {

double mobility(double rho, double rho_cap, bool* capped = nullptr) {
    const bool clamp = rho > rho_cap;
    if (capped) *capped = clamp;
    const double r = clamp ? rho_cap : rho;
    return (1.0 - r) * (1.0 - r);
}

std::pair<std::size_t, std::size_t> stencil(std::size_t k, std::size_t n) {
    const std::size_t left = k == 0 ? 1 : k - 1;
    const std::size_t right = k == n - 1 ? n - 2 : k + 1;
    return {left, right};
}

bool is_dirichlet(const DensityBoundary& b) { return std::holds_alternative<DirichletDensity>(b); }

}  // namespace

double hj_tilde_residual(const ValueField& u, const DensityField& rho, std::size_t k, double epsilon,
                         double rho_cap) {
    const std::size_t n = u.size();
    if (k >= n) throw ConfigError("node index out of range");
    const auto [l, r] = stencil(k, n);
    const double h = u.grid().spacing();
    return mobility(rho[k], rho_cap) * upwind_kinetic(u[l], u[k], u[r], h) -
           epsilon * (u[r] - 2.0 * u[k] + u[l]) / (h * h);
}

std::vector<double> hj_tilde_vector(std::span<const double> u, const DensityField& rho, double epsilon,
                                    double rho_cap) {
    const std::size_t n = u.size();
    const double h = rho.grid().spacing();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto [l, r] = stencil(k, n);
        out[k] = mobility(rho[k], rho_cap) * upwind_kinetic(u[l], u[k], u[r], h) -
                 epsilon * (u[r] - 2.0 * u[k] + u[l]) / (h * h);
    }
    return out;
}

Tridiagonal tilde_jacobian(const ValueField& u, const DensityField& rho, double epsilon, double rho_cap) {
    const std::size_t n = u.size();
    const double h = u.grid().spacing();
    const double h2 = h * h;
    Tridiagonal j(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto [l, r] = stencil(k, n);
        const double a = mobility(rho[k], rho_cap);
        const double dl = std::max(u[k] - u[l], 0.0);
        const double dr = std::max(u[k] - u[r], 0.0);
        j.diag[k] = a * (dl + dr) / h2 + 2.0 * epsilon / h2;
        const double to_left = -a * dl / h2 - epsilon / h2;
        const double to_right = -a * dr / h2 - epsilon / h2;
        // Mirror ghosts fold both stencil arms onto the single inner neighbor.
        if (k == 0) {
            j.upper[k] = to_left + to_right;
        } else if (k == n - 1) {
            j.lower[k] = to_left + to_right;
        } else {
            j.lower[k] = to_left;
            j.upper[k] = to_right;
        }
    }
    return j;
}

TransportOperator assemble_adjoint(const ValueField& u, const DensityField& rho, double epsilon,
                                   const FluxSpec& flux, const AssemblyOptions& opt) {
    if (!(epsilon >= 0.0)) throw ConfigError("viscosity must be >= 0");
    if (!(u.grid() == rho.grid())) throw ConfigError("u and rho live on different grids");
    const Grid1D& grid = rho.grid();
    const std::size_t n = grid.size();

    if (opt.require_solved_u) {
        const auto& bc = opt.bc;
        const std::size_t first = std::holds_alternative<DirichletValue>(bc.left.u) ? 1 : 0;
        const std::size_t stop = std::holds_alternative<DirichletValue>(bc.right.u) ? n - 1 : n;
        double worst = 0.0;
        for (std::size_t k = first; k < stop; ++k) {
            const double r = hj_residual(u, rho, k, bc, opt.rho_cap);
            const double scale = std::max(1.0, 0.5 * slowness_squared(rho[k], opt.rho_cap));
            worst = std::max(worst, std::abs(r) / scale);
        }
        if (!(worst <= *opt.require_solved_u)) {
            throw ConvergenceError("refusing to assemble transport: u is stale for this rho "
                                   "(scaled eikonal residual " + std::to_string(worst) + ")",
                                   worst);
        }
    }

    TransportOperator op{grid, epsilon, flux, tilde_jacobian(u, rho, epsilon, opt.rho_cap), Tridiagonal(n),
                         std::vector<double>(n, 0.0), trapezoid_weights(grid), std::vector<bool>(n, false)};
    for (std::size_t k = 0; k < n; ++k) {
        bool capped = false;
        mobility(rho[k], opt.rho_cap, &capped);
        op.congestion[k] = capped;
    }

    const auto& w = op.weights;
    const auto& jac = op.jacobian;
    for (std::size_t m = 0; m < n; ++m) {
        op.matrix.diag[m] = jac.diag[m];
        if (m + 1 < n) op.matrix.upper[m] = jac.lower[m + 1] * w[m + 1] / w[m];
        if (m > 0) op.matrix.lower[m] = jac.upper[m - 1] * w[m - 1] / w[m];
    }
    if (const auto* in = std::get_if<InfluxDensity>(&flux.left)) op.source.front() = in->current / w.front();
    if (const auto* in = std::get_if<InfluxDensity>(&flux.right)) op.source.back() = in->current / w.back();
    return op;
}

std::array<double, 2> boundary_inflow(const TransportOperator& op, std::span<const double> rho) {
    const std::size_t n = op.grid.size();
    const auto& w = op.weights;
    const auto& jac = op.jacobian;
    auto side = [&](const DensityBoundary& b, std::size_t node) -> double {
        if (const auto* in = std::get_if<InfluxDensity>(&b)) return in->current;
        if (!is_dirichlet(b)) return 0.0;
        // Sum of J(k, node) w_k rho_k over the rows touching column `node`.
        double f = jac.diag[node] * w[node] * rho[node];
        if (node > 0) f += jac.upper[node - 1] * w[node - 1] * rho[node - 1];
        if (node + 1 < n) f += jac.lower[node + 1] * w[node + 1] * rho[node + 1];
        return f;
    };
    return {side(op.flux.left, 0), side(op.flux.right, n - 1)};
}

double free_mass(const TransportOperator& op, std::span<const double> rho) {
    const std::size_t n = rho.size();
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 0 && is_dirichlet(op.flux.left)) continue;
        if (k == n - 1 && is_dirichlet(op.flux.right)) continue;
        m += op.weights[k] * rho[k];
    }
    return m;
}

namespace {

// Solves (I + gamma A) x = rhs + gamma s with Dirichlet rows replaced.
DensityField implicit_solve(const TransportOperator& op, double gamma, std::vector<double> rhs, double t_next) {
    const std::size_t n = op.grid.size();
    if (rhs.size() != n) throw ConfigError("density does not match the transport operator grid");
    Tridiagonal sys(n);
    for (std::size_t k = 0; k < n; ++k) {
        sys.diag[k] = 1.0 + gamma * op.matrix.diag[k];
        sys.lower[k] = gamma * op.matrix.lower[k];
        sys.upper[k] = gamma * op.matrix.upper[k];
        rhs[k] += gamma * op.source[k];
    }
    auto pin = [&](const DensityBoundary& b, std::size_t node) {
        if (const auto* d = std::get_if<DirichletDensity>(&b)) {
            sys.lower[node] = 0.0;
            sys.upper[node] = 0.0;
            sys.diag[node] = 1.0;
            rhs[node] = d->at(t_next);
        }
    };
    pin(op.flux.left, 0);
    pin(op.flux.right, n - 1);
    sys.lower[0] = 0.0;
    sys.upper[n - 1] = 0.0;
    return DensityField(op.grid, solve_tridiagonal(sys, rhs));
}

void check_step(const DensityField& rho, const TransportOperator& op, double dt) {
    if (!(dt > 0.0)) throw ConfigError("time step must be > 0");
    if (!(rho.grid() == op.grid)) throw ConfigError("density does not match the transport operator grid");
}

}  // namespace

DensityField step_transport(const DensityField& rho, const TransportOperator& op, double dt, double t_next) {
    check_step(rho, op, dt);
    return implicit_solve(op, dt, rho.vector(), t_next);
}

DensityField step_transport_bdf2(const DensityField& rho, const DensityField& rho_prev,
                                 const TransportOperator& op, double dt, double t_next) {
    check_step(rho, op, dt);
    check_step(rho_prev, op, dt);
    std::vector<double> rhs(rho.size());
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = (4.0 * rho[k] - rho_prev[k]) / 3.0;
    return implicit_solve(op, 2.0 * dt / 3.0, std::move(rhs), t_next);
}

TransportStepper::TransportStepper(double dt) : dt_(dt) {
    if (!(dt > 0.0)) throw ConfigError("time step must be > 0");
}

DensityField TransportStepper::step(const DensityField& rho, const TransportOperator& op, double t_next) {
    DensityField next = previous_ ? step_transport_bdf2(rho, *previous_, op, dt_, t_next)
                                  : step_transport(rho, op, dt_, t_next);
    previous_ = rho;
    ++steps_;
    return next;
}

}  // namespace crowd
