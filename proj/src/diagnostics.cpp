#include "crowd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace crowd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDefaultPs[] = {2.0, 4.0};

void check_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p must lie in (1, inf), got " + std::to_string(p));
}

std::optional<std::size_t> first_congested(const DensityField& rho) {
    for (std::size_t k = 0; k < rho.size(); ++k) {
        if (rho[k] >= 1.0) return k;
    }
    return std::nullopt;
}

template <class Integrand>
std::map<double, LpSeries> lp_series(const SimulationRecord& rec, std::span<const double> p_values,
                                     Integrand&& integrand) {
    std::map<double, LpSeries> out;
    for (double p : p_values) {
        check_p(p);
        LpSeries s;
        s.p = p;
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const DensityField& rho = rec.rho_snapshots[i];
            if (auto k = first_congested(rho)) {
                s.supremum = kInf;
                s.sup_time = rec.times[i];
                s.singular_node = k;
                break;
            }
            const double v = integrand(i, p);
            s.values.push_back(v);
            if (v > s.supremum) {
                s.supremum = v;
                s.sup_time = rec.times[i];
            }
        }
        out.emplace(p, std::move(s));
    }
    return out;
}

}  // namespace

bool check_bounds(const SimulationRecord& rec, double tol) {
    for (const auto& rho : rec.rho_snapshots) {
        for (double v : rho.values()) {
            if (v < -tol || v > 1.0 + tol) return false;
        }
    }
    return true;
}

LyapunovReport lyapunov_series(const SimulationRecord& rec, double alpha) {
    if (!(alpha < -1.0)) throw ConfigError("alpha must be < -1, got " + std::to_string(alpha));
    LyapunovReport r;
    r.alpha = alpha;
    const Grid1D& g = rec.grid;
    const double h = g.spacing();
    std::vector<double> dissipation;
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < rec.size(); ++i) {
        const DensityField& rho = rec.rho_snapshots[i];
        if (first_congested(rho)) {
            r.singular_index = i;
            break;
        }
        for (std::size_t k = 0; k < g.size(); ++k) f[k] = std::pow(1.0 - rho[k], alpha + 1.0);
        r.series.push_back(integrate(g, f));
        double d = 0.0;
        for (std::size_t k = 0; k + 1 < g.size(); ++k) {
            const double a = std::pow(1.0 - rho[k], 0.5 * (alpha + 1.0));
            const double b = std::pow(1.0 - rho[k + 1], 0.5 * (alpha + 1.0));
            d += (b - a) * (b - a) / h;
        }
        dissipation.push_back(d);
    }

    const std::size_t m = r.series.size();
    for (std::size_t i = 1; i < m; ++i) {
        r.dissipation_integral += 0.5 * (dissipation[i] + dissipation[i - 1]) * (rec.times[i] - rec.times[i - 1]);
    }
    if (m >= 2) {
        const std::size_t fit = std::max<std::size_t>(2, (m + 9) / 10);
        for (std::size_t i = 1; i < fit; ++i) {
            const double dt = rec.times[i] - rec.times[i - 1];
            if (dt > 0.0) r.c_hat = std::max(r.c_hat, std::log(r.series[i] / r.series[i - 1]) / dt);
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double envelope = r.series[0] * std::exp(r.c_hat * (rec.times[i] - rec.times[0]));
            if (r.series[i] > envelope * (1.0 + 1e-12)) r.gronwall_ok = false;
        }
    }
    return r;
}

std::map<double, LpSeries> du_lp_norms(const SimulationRecord& rec, std::span<const double> p_values) {
    const Grid1D& g = rec.grid;
    std::vector<double> f(g.size());
    return lp_series(rec, p_values, [&](std::size_t i, double p) {
        const DensityField& rho = rec.rho_snapshots[i];
        for (std::size_t k = 0; k < g.size(); ++k) f[k] = std::pow(1.0 - rho[k], -2.0 * p);
        return integrate(g, f);
    });
}

std::map<double, LpSeries> du_lp_norms_from_u(const SimulationRecord& rec, std::span<const double> p_values) {
    const Grid1D& g = rec.grid;
    const double h = g.spacing();
    const std::size_t n = g.size();
    std::vector<double> f(n);
    return lp_series(rec, p_values, [&](std::size_t i, double p) {
        const ValueField& u = rec.u_snapshots[i];
        for (std::size_t k = 0; k < n; ++k) {
            double g2 = 0.0;
            if (k == 0) {
                const double d = (u[1] - u[0]) / h;
                g2 = d * d;
            } else if (k + 1 == n) {
                const double d = (u[k] - u[k - 1]) / h;
                g2 = d * d;
            } else {
                const double a = std::max(u[k] - u[k - 1], 0.0) / h;
                const double b = std::max(u[k] - u[k + 1], 0.0) / h;
                g2 = a * a + b * b;
            }
            f[k] = std::pow(g2, p);
        }
        return integrate(g, f);
    });
}

EstimateReport estimate_report(const SimulationRecord& rec, double alpha, std::span<const double> p_values) {
    if (p_values.empty()) p_values = kDefaultPs;
    EstimateReport r;
    r.bounds_ok = check_bounds(rec);
    r.lyapunov = lyapunov_series(rec, alpha);
    r.lp_norms = du_lp_norms(rec, p_values);
    return r;
}

}  // namespace crowd
