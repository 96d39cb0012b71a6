#include "crowd/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace crowd {

void validate(const Scenario& s) {
    if (!(s.rho_initial.grid() == s.grid)) throw ConfigError("initial density is not on the scenario grid");
    if (!(s.epsilon >= 0.0) || !std::isfinite(s.epsilon)) throw ConfigError("epsilon must be finite and >= 0");
    if (!(s.t_end >= 0.0) || !std::isfinite(s.t_end)) throw ConfigError("t_end must be finite and >= 0");
    if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw ConfigError("dt must be finite and > 0");
    if (s.record_every < 1) throw ConfigError("record_every must be >= 1");
    if (!(s.breakdown_tol >= 0.0)) throw ConfigError("breakdown_tol must be >= 0");
    validate(s.bc);
    validate(s.eikonal);
    if (!std::holds_alternative<DirichletValue>(s.bc.left.u) &&
        !std::holds_alternative<DirichletValue>(s.bc.right.u)) {
        throw ConfigError("scenario has no exit: at least one endpoint needs a Dirichlet u condition");
    }
}

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::breakdown: return "breakdown";
        case RunStatus::aborted: return "aborted";
    }
    return "unknown";
}

std::size_t step_count(double t_end, double dt) {
    if (t_end <= 0.0) return 0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_end / dt)));
}

namespace {

void push_snapshot(SimulationRecord& rec, double t, const DensityField& rho, const ValueField& u) {
    rec.times.push_back(t);
    rec.rho_snapshots.push_back(rho);
    rec.u_snapshots.push_back(u);
    rec.mass_series.push_back(integrate(rho.grid(), rho.values()));
    rec.min_rho.push_back(min_value(rho.values()));
    rec.max_rho.push_back(max_value(rho.values()));
}

}  // namespace

SimulationRecord run_scenario(const Scenario& s) {
    validate(s);
    const std::size_t nsteps = step_count(s.t_end, s.dt);
    const double dt = nsteps > 0 ? s.t_end / static_cast<double>(nsteps) : s.dt;
    const FluxSpec flux = FluxSpec::from(s.bc);

    SimulationRecord rec(s.grid);
    rec.dt = dt;
    AssemblyOptions assembly;
    assembly.rho_cap = s.eikonal.rho_cap;
    assembly.require_solved_u = s.eikonal.residual_tolerance;
    assembly.bc = s.bc;

    auto abort_with = [&](const std::exception& e, bool numerical) -> SimulationError {
        rec.status = RunStatus::aborted;
        rec.message = e.what();
        return SimulationError(e.what(), std::make_shared<const SimulationRecord>(rec), numerical);
    };

    DensityField rho = s.rho_initial;
    std::optional<DensityField> rho_prev;
    double prev_free_mass = 0.0;
    double free_mass_now = 0.0;
    TransportStepper stepper(dt);

    for (std::size_t m = 0;; ++m) {
        const double t = static_cast<double>(m) * dt;
        EikonalSolution eik = [&] {
            try {
                return solve_eikonal(rho, s.bc, s.eikonal);
            } catch (const ConvergenceError& e) {
                throw abort_with(e, true);
            }
        }();
        for (std::size_t node : eik.capped_nodes) rec.congestion_events.push_back({t, node});

        const bool last = m == nsteps;
        const bool halted = max_value(rho.values()) > 1.0 + s.breakdown_tol;
        if (m % s.record_every == 0 || last || halted) push_snapshot(rec, t, rho, eik.u);
        if (halted) {
            rec.status = RunStatus::breakdown;
            rec.message = "density exceeded 1 + breakdown_tol at t = " + std::to_string(t);
            break;
        }
        if (last) break;

        DensityField next = [&] {
            try {
                const TransportOperator op = assemble_adjoint(eik.u, rho, s.epsilon, flux, assembly);
                DensityField out = stepper.step(rho, op, t + dt);
                const auto inflow = boundary_inflow(op, out.values());
                const double net = inflow[0] + inflow[1];
                free_mass_now = free_mass(op, rho.values());
                const double new_mass = free_mass(op, out.values());
                double defect = 0.0;
                if (rho_prev) {
                    defect = std::abs(3.0 * new_mass - 4.0 * free_mass_now + prev_free_mass - 2.0 * dt * net) / 3.0;
                } else {
                    defect = std::abs(new_mass - free_mass_now - dt * net);
                }
                rec.max_balance_defect = std::max(rec.max_balance_defect, defect);
                return out;
            } catch (const ConvergenceError& e) {
                throw abort_with(e, true);
            } catch (const NumericalError& e) {
                throw abort_with(e, true);
            }
        }();
        prev_free_mass = free_mass_now;
        rho_prev = rho;
        rho = std::move(next);
        rec.steps = m + 1;
    }
    return rec;
}

std::vector<double> distance_to_stationary(const SimulationRecord& rec, const DensityField& stat) {
    if (!(stat.grid() == rec.grid)) throw ConfigError("stationary profile is on a different grid");
    std::vector<double> d;
    d.reserve(rec.size());
    for (const auto& rho : rec.rho_snapshots) {
        double m = 0.0;
        for (std::size_t k = 0; k < rho.size(); ++k) m = std::max(m, std::abs(rho[k] - stat[k]));
        d.push_back(m);
    }
    return d;
}

}  // namespace crowd
