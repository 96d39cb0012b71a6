#include "crowd/grid.hpp"

#include <algorithm>
#include <limits>

namespace crowd {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (n < 3) {
        throw ConfigError("grid needs at least 3 nodes, got " + std::to_string(n));
    }
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
        throw ConfigError("degenerate grid interval [" + std::to_string(x_min) + ", " +
                          std::to_string(x_max) + "]");
    }
    h_ = (x_max - x_min) / static_cast<double>(n - 1);
}

Grid1D build_grid(double x_min, double x_max, std::size_t n) { return Grid1D(x_min, x_max, n); }

std::vector<double> trapezoid_weights(const Grid1D& grid) {
    std::vector<double> w(grid.size(), grid.spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

double integrate(const Grid1D& grid, std::span<const double> values) {
    double inner = 0.0;
    for (std::size_t k = 1; k + 1 < values.size(); ++k) inner += values[k];
    return grid.spacing() * (inner + 0.5 * (values.front() + values.back()));
}

bool is_physical(const DensityField& rho, double tol) {
    return std::all_of(rho.values().begin(), rho.values().end(),
                       [tol](double r) { return r >= -tol && r <= 1.0 + tol; });
}

double max_value(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

double min_value(std::span<const double> v) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) m = std::min(m, x);
    return m;
}

namespace {

void validate_endpoint(const EndpointConditions& e, const char* side) {
    if (const auto* in = std::get_if<InfluxDensity>(&e.rho)) {
        if (!(in->current >= 0.0) || !std::isfinite(in->current)) {
            throw ConfigError(std::string("influx current at ") + side + " must be finite and >= 0");
        }
    }
    if (const auto* d = std::get_if<DirichletDensity>(&e.rho)) {
        if (!std::isfinite(d->value) || !(d->ramp_rate >= 0.0)) {
            throw ConfigError(std::string("invalid Dirichlet density at ") + side);
        }
    }
    if (const auto* d = std::get_if<DirichletValue>(&e.u)) {
        if (!std::isfinite(d->value)) {
            throw ConfigError(std::string("invalid exit value at ") + side);
        }
    }
}

}  // namespace

void validate(const BoundaryConditions& bc) {
    validate_endpoint(bc.left, "left");
    validate_endpoint(bc.right, "right");
}

}  // namespace crowd
