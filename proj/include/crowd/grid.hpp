#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "crowd/error.hpp"

namespace crowd {

/// Uniform node-centered mesh on [x_min, x_max].
///
/// Node k sits at x_min + k*h with h = (x_max - x_min)/(n - 1), so both
/// endpoints are nodes. All solvers index unknowns by node.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double x(std::size_t k) const noexcept { return x_min_ + static_cast<double>(k) * h_; }
    std::size_t last() const noexcept { return n_ - 1; }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double h_;
};

Grid1D build_grid(double x_min, double x_max, std::size_t n);

/// Trapezoid quadrature weights: h/2 at the endpoints, h inside.
std::vector<double> trapezoid_weights(const Grid1D& grid);

/// Trapezoid integral of nodal samples.
double integrate(const Grid1D& grid, std::span<const double> values);

/// Node-indexed samples on a grid. The tag keeps densities and exit-time
/// values from being mixed up at call sites.
template <class Tag>
class Field {
public:
    Field(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw ConfigError("field length " + std::to_string(values_.size()) +
                              " does not match grid size " + std::to_string(grid_.size()));
        }
        for (std::size_t k = 0; k < values_.size(); ++k) {
            if (!std::isfinite(values_[k])) {
                throw NumericalError("non-finite field value at node " + std::to_string(k));
            }
        }
    }

    const Grid1D& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& vector() const noexcept { return values_; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    std::size_t size() const noexcept { return values_.size(); }

    friend bool operator==(const Field&, const Field&) = default;

private:
    Grid1D grid_;
    std::vector<double> values_;
};

struct DensityTag {};
struct ValueTag {};
using DensityField = Field<DensityTag>;
using ValueField = Field<ValueTag>;

/// Samples f at every node. Throws NumericalError naming the first node
/// where f is not finite.
template <class FieldT>
FieldT sample_function(const Grid1D& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        v[k] = f(grid.x(k));
        if (!std::isfinite(v[k])) {
            throw NumericalError("sampled function is not finite at node " + std::to_string(k) +
                                 " (x = " + std::to_string(grid.x(k)) + ")");
        }
    }
    return FieldT(grid, std::move(v));
}

/// 0 <= rho <= 1 everywhere (up to tol). Violations are a model finding,
/// not a construction error.
bool is_physical(const DensityField& rho, double tol = 0.0);

double max_value(std::span<const double> v);
double min_value(std::span<const double> v);

// --- boundary vocabulary ---------------------------------------------------

enum class Side { left, right };

/// rho = value * (1 - exp(-ramp_rate * t)) when ramp_rate > 0, else rho = value.
struct DirichletDensity {
    double value = 0.0;
    double ramp_rate = 0.0;

    double at(double t) const {
        return ramp_rate > 0.0 ? value * (1.0 - std::exp(-ramp_rate * t)) : value;
    }
    friend bool operator==(const DirichletDensity&, const DirichletDensity&) = default;
};

/// Zero normal flux for rho.
struct NoFlux {
    friend bool operator==(const NoFlux&, const NoFlux&) = default;
};

/// Prescribed net current entering the domain through this endpoint.
struct InfluxDensity {
    double current = 0.0;
    friend bool operator==(const InfluxDensity&, const InfluxDensity&) = default;
};

using DensityBoundary = std::variant<DirichletDensity, NoFlux, InfluxDensity>;

/// Exit: u is fixed to value at this endpoint.
struct DirichletValue {
    double value = 0.0;
    friend bool operator==(const DirichletValue&, const DirichletValue&) = default;
};

/// Wall: mirror ghost node for u.
struct ReflectingValue {
    friend bool operator==(const ReflectingValue&, const ReflectingValue&) = default;
};

using ValueBoundary = std::variant<DirichletValue, ReflectingValue>;

struct EndpointConditions {
    DensityBoundary rho = DirichletDensity{};
    ValueBoundary u = DirichletValue{};
    friend bool operator==(const EndpointConditions&, const EndpointConditions&) = default;
};

/// One density condition and one value condition per endpoint.
struct BoundaryConditions {
    EndpointConditions left;
    EndpointConditions right;

    const EndpointConditions& at(Side s) const { return s == Side::left ? left : right; }
    friend bool operator==(const BoundaryConditions&, const BoundaryConditions&) = default;
};

/// Throws ConfigError for negative influx or a non-finite boundary value.
void validate(const BoundaryConditions& bc);

}  // namespace crowd
