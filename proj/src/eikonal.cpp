#include "crowd/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_exit(const ValueBoundary& b) { return std::holds_alternative<DirichletValue>(b); }

// Neighbor values of node k with mirror ghosts at reflecting walls.
std::pair<double, double> neighbors(std::span<const double> u, std::size_t k) {
    const std::size_t last = u.size() - 1;
    const double left = k == 0 ? u[1] : u[k - 1];
    const double right = k == last ? u[last - 1] : u[k + 1];
    return {left, right};
}

// Smallest u with [max(u-a,0)^2 + max(u-b,0)^2] = (h f)^2.
double local_update(double a, double b, double hf) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    if (lo == kInf) return kInf;
    const double one_sided = lo + hf;
    if (one_sided <= hi) return one_sided;
    const double disc = 2.0 * hf * hf - (a - b) * (a - b);
    return 0.5 * (a + b + std::sqrt(std::max(disc, 0.0)));
}

}  // namespace

void validate(const EikonalConfig& cfg) {
    if (cfg.max_iterations < 1) throw ConfigError("eikonal max_iterations must be >= 1");
    if (!(cfg.residual_tolerance > 0.0)) throw ConfigError("eikonal residual_tolerance must be > 0");
    if (!(cfg.rho_cap > 0.0 && cfg.rho_cap < 1.0)) throw ConfigError("eikonal rho_cap must lie in (0, 1)");
}

double slowness_squared(double rho, double rho_cap, bool* capped) {
    const bool clamp = rho > rho_cap;
    if (capped) *capped = clamp;
    const double r = clamp ? rho_cap : rho;
    return 1.0 / ((1.0 - r) * (1.0 - r));
}

double hj_residual(const ValueField& u, const DensityField& rho, std::size_t k,
                   const BoundaryConditions& bc, double rho_cap) {
    const std::size_t last = u.size() - 1;
    if ((k == 0 && is_exit(bc.left.u)) || (k == last && is_exit(bc.right.u))) {
        throw ConfigError("eikonal residual is undefined at exit node " + std::to_string(k));
    }
    if (k > last) throw ConfigError("node index out of range");
    const auto [left, right] = neighbors(u.values(), k);
    const double h = u.grid().spacing();
    return upwind_kinetic(left, u[k], right, h) - 0.5 * slowness_squared(rho[k], rho_cap);
}

EikonalSolution solve_eikonal(const DensityField& rho, const BoundaryConditions& bc,
                              const EikonalConfig& cfg) {
    validate(cfg);
    const bool exit_left = is_exit(bc.left.u);
    const bool exit_right = is_exit(bc.right.u);
    if (!exit_left && !exit_right) {
        throw ConfigError("eikonal solve needs at least one exit (Dirichlet u) endpoint");
    }

    const Grid1D& grid = rho.grid();
    const std::size_t n = grid.size();
    const double h = grid.spacing();

    std::vector<std::size_t> capped;
    std::vector<double> hf(n);
    std::vector<double> half_s2(n);
    for (std::size_t k = 0; k < n; ++k) {
        bool c = false;
        const double s2 = slowness_squared(rho[k], cfg.rho_cap, &c);
        if (c) capped.push_back(k);
        hf[k] = h * std::sqrt(s2);
        half_s2[k] = 0.5 * s2;
    }

    std::vector<double> u(n, kInf);
    if (exit_left) u.front() = std::get<DirichletValue>(bc.left.u).value;
    if (exit_right) u.back() = std::get<DirichletValue>(bc.right.u).value;
    const std::size_t first = exit_left ? 1 : 0;
    const std::size_t stop = exit_right ? n - 1 : n;  // one past the last free node

    auto relax = [&](std::size_t k) {
        const auto [a, b] = neighbors(u, k);
        u[k] = std::min(u[k], local_update(a, b, hf[k]));
    };

    double residual = kInf;
    double scaled = kInf;
    int sweeps = 0;
    while (sweeps < cfg.max_iterations) {
        if (sweeps % 2 == 0) {
            for (std::size_t k = first; k < stop; ++k) relax(k);
        } else {
            for (std::size_t k = stop; k-- > first;) relax(k);
        }
        ++sweeps;
        if (sweeps % 2 != 0) continue;

        residual = 0.0;
        scaled = 0.0;
        for (std::size_t k = first; k < stop; ++k) {
            const auto [a, b] = neighbors(u, k);
            const double r = std::abs(upwind_kinetic(a, u[k], b, h) - half_s2[k]);
            if (!std::isfinite(r)) {
                residual = scaled = kInf;
                break;
            }
            residual = std::max(residual, r);
            scaled = std::max(scaled, r / std::max(1.0, half_s2[k]));
        }
        if (scaled <= cfg.residual_tolerance) break;
    }
    if (!(scaled <= cfg.residual_tolerance)) {
        throw ConvergenceError("eikonal sweeps did not converge within " +
                                   std::to_string(cfg.max_iterations) + " sweeps",
                               residual);
    }
    return EikonalSolution{ValueField(grid, std::move(u)), sweeps, residual, scaled, std::move(capped)};
}

}  // namespace crowd
