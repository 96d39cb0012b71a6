#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "crowd/eikonal.hpp"
#include "crowd/grid.hpp"
#include "crowd/transport.hpp"

namespace crowd {

struct Scenario {
    Grid1D grid;
    DensityField rho_initial;
    BoundaryConditions bc;
    double epsilon = 0.0;
    double t_end = 1.0;
    double dt = 0.005;
    std::size_t record_every = 1;
    EikonalConfig eikonal{};
    /// The run halts with status `breakdown` once max rho > 1 + breakdown_tol.
    double breakdown_tol = 1e-3;
};

/// Throws ConfigError describing the first inconsistency.
void validate(const Scenario& s);

enum class RunStatus { completed, breakdown, aborted };

const char* to_string(RunStatus s);

struct CongestionEvent {
    double time = 0.0;
    std::size_t node = 0;
};

/// Time series of a coupled run. All per-snapshot arrays are index-aligned;
/// u_snapshots[i] is the eikonal solution for rho_snapshots[i].
struct SimulationRecord {
    Grid1D grid;
    std::vector<double> times;
    std::vector<DensityField> rho_snapshots;
    std::vector<ValueField> u_snapshots;
    std::vector<double> mass_series;
    std::vector<double> min_rho;
    std::vector<double> max_rho;
    std::vector<CongestionEvent> congestion_events;
    RunStatus status = RunStatus::completed;
    std::string message;
    std::size_t steps = 0;
    double dt = 0.0;
    /// Largest per-step mismatch between the change of free mass and the
    /// boundary inflow predicted by the operator (BDF2/Euler weighted).
    double max_balance_defect = 0.0;

    explicit SimulationRecord(Grid1D g) : grid(g) {}
    std::size_t size() const noexcept { return times.size(); }
};

/// Thrown when a run aborts; carries everything recorded up to the failure.
class SimulationError : public Error {
public:
    SimulationError(const std::string& what, std::shared_ptr<const SimulationRecord> partial, bool numerical)
        : Error(what), partial_(std::move(partial)), numerical_(numerical) {}

    const SimulationRecord& partial() const noexcept { return *partial_; }
    bool numerical() const noexcept { return numerical_; }

private:
    std::shared_ptr<const SimulationRecord> partial_;
    bool numerical_;
};

/// Number of uniform steps used for (t_end, dt): round(t_end/dt), with the
/// step adjusted so the steps land exactly on t_end.
std::size_t step_count(double t_end, double dt);

/// Coupled evolution: per step solve the eikonal for the current rho,
/// assemble the adjoint transport from that u, advance rho with BDF2.
SimulationRecord run_scenario(const Scenario& s);

/// sup_k |rho(x_k, t_i) - stat(x_k)| per recorded time.
std::vector<double> distance_to_stationary(const SimulationRecord& rec, const DensityField& stat);

}  // namespace crowd
