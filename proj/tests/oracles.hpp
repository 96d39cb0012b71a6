#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "crowd/grid.hpp"
#include "crowd/transport.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

// rho(x) solving eps rho' = rho - rho^2 - j, rho(1) = 0, written in
// w = rho - 1/2, kappa = 1/4 - j:
//   kappa > 0, |w| < c : w = c tanh(c (x - x0) / eps)
//   kappa > 0, |w| > c : w = c coth(c (x - x0) / eps)
//   kappa = 0          : w = eps / (x - x0)
//   kappa < 0          : w = -c tan(c (x - x0) / eps)
// with x0 fixed by w(1) = -1/2.
inline double stationary_rho(double eps, double j, double x) {
    const double kappa = 0.25 - j;
    if (j == 0.0) return 0.0;
    if (kappa > 0.0) {
        const double c = std::sqrt(kappa);
        if (c > 0.5) {
            const double x0 = 1.0 - eps * std::atanh(-0.5 / c) / c;
            return 0.5 + c * std::tanh(c * (x - x0) / eps);
        }
        const double y = -0.5 / c;  // coth(c (1 - x0) / eps) = y, |y| > 1
        const double z = 0.5 * std::log((y + 1.0) / (y - 1.0));
        const double x0 = 1.0 - eps * z / c;
        return 0.5 + c / std::tanh(c * (x - x0) / eps);
    }
    if (kappa == 0.0) {
        const double x0 = 1.0 + 2.0 * eps;
        return 0.5 + eps / (x - x0);
    }
    const double c = std::sqrt(-kappa);
    const double x0 = 1.0 - eps * std::atan(0.5 / c) / c;
    return 0.5 - c * std::tan(c * (x - x0) / eps);
}

// Leftmost x in [0, 1] down to which the closed form stays finite (the pole
// of tan / coth for supercritical data), or 0 if none.
inline double stationary_pole(double eps, double j) {
    const double kappa = 0.25 - j;
    if (kappa < 0.0) {
        const double c = std::sqrt(-kappa);
        const double x0 = 1.0 - eps * std::atan(0.5 / c) / c;
        const double pole = x0 - eps * (std::numbers::pi / 2.0) / c;
        return std::max(0.0, pole);
    }
    return 0.0;
}

// j_c(eps) from the closed form: for j > 1/4 and c = sqrt(j - 1/4),
// rho(0) = 1/2 + c tan(c / eps - atan(1 / (2c))), which reaches 1 first
// where that argument lies in (0, pi/2). Bisection on c.
inline double critical_current_closed_form(double eps) {
    auto rho0 = [&](double c) {
        const double a = c / eps - std::atan(0.5 / c);
        if (a >= std::numbers::pi / 2.0) return std::numeric_limits<double>::infinity();
        return 0.5 + c * std::tan(a);
    };
    double lo = 1e-12;
    double hi = 1e-12;
    while (rho0(hi) < 1.0) hi *= 2.0;
    lo = hi / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rho0(mid) < 1.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double c = 0.5 * (lo + hi);
    return 0.25 + c * c;
}

// Central-difference Jacobian of the tilde residual vector.
inline Dense fd_jacobian(const std::vector<double>& u, const crowd::DensityField& rho, double eps,
                         double step = 1e-7) {
    const std::size_t n = u.size();
    Dense J(n, std::vector<double>(n, 0.0));
    for (std::size_t c = 0; c < n; ++c) {
        auto up = u;
        auto dn = u;
        up[c] += step;
        dn[c] -= step;
        const auto fp = crowd::hj_tilde_vector(up, rho, eps);
        const auto fm = crowd::hj_tilde_vector(dn, rho, eps);
        for (std::size_t r = 0; r < n; ++r) J[r][c] = (fp[r] - fm[r]) / (2.0 * step);
    }
    return J;
}

inline Dense to_dense(const crowd::Tridiagonal& m) {
    const std::size_t n = m.size();
    Dense d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[i][j] = m.at(i, j);
    }
    return d;
}

inline Dense transpose(const Dense& a) {
    Dense t(a[0].size(), std::vector<double>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    }
    return t;
}

inline double max_abs(const Dense& a) {
    double m = 0.0;
    for (const auto& row : a) {
        for (double v : row) m = std::max(m, std::abs(v));
    }
    return m;
}

inline double max_abs_diff(const Dense& a, const Dense& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    }
    return m;
}

// Hand-written interior flux divergence for the Hughes transport with
// viscosity: d rho_k/dt = -(F_{k+1/2} - F_{k-1/2}) / h, where the advective
// part moves mass down the gradient of u with speed (1 - rho)^2 |Du| applied
// upwind, and diffusion is the 3-point Laplacian.
inline double interior_rate(const std::vector<double>& u, const std::vector<double>& rho, std::size_t k, double h,
                            double eps) {
    // Coefficient by which node i sends mass to neighbor m: (1-rho_i)^2 (u_i - u_m)^+ / h^2.
    auto send = [&](std::size_t i, std::size_t m) {
        const double d = u[i] - u[m];
        return d > 0.0 ? (1.0 - rho[i]) * (1.0 - rho[i]) * d / (h * h) : 0.0;
    };
    double rate = -(send(k, k - 1) + send(k, k + 1)) * rho[k];
    rate += send(k - 1, k) * rho[k - 1] + send(k + 1, k) * rho[k + 1];
    rate += eps * (rho[k + 1] - 2.0 * rho[k] + rho[k - 1]) / (h * h);
    return rate;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace oracle
