#include <algorithm>
#include <cmath>
#include <limits>

#include "crowd/diagnostics.hpp"
#include "crowd/io.hpp"
#include "crowd/stationary.hpp"

namespace crowd::io {

namespace {

// JSON has no infinity; non-finite values become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct RunOutcome {
    std::optional<SimulationRecord> record;
    bool aborted = false;
    std::string message;
};

RunOutcome simulate(const Scenario& s) {
    RunOutcome out;
    try {
        out.record = run_scenario(s);
    } catch (const SimulationError& e) {
        out.record = e.partial();
        out.aborted = true;
        out.message = e.what();
    }
    return out;
}

void add_record_tables(OutputBundle& b, const SimulationRecord& rec, const std::vector<double>* distance) {
    Table snaps{"snapshots", {"t", "x", "rho", "u"}, {}};
    for (std::size_t i = 0; i < rec.size(); ++i) {
        for (std::size_t k = 0; k < rec.grid.size(); ++k) {
            snaps.rows.push_back({rec.times[i], rec.grid.x(k), rec.rho_snapshots[i][k], rec.u_snapshots[i][k]});
        }
    }
    Table series{"series", {"t", "mass", "min_rho", "max_rho"}, {}};
    if (distance) series.columns.push_back("distance_to_stationary");
    for (std::size_t i = 0; i < rec.size(); ++i) {
        series.rows.push_back({rec.times[i], rec.mass_series[i], rec.min_rho[i], rec.max_rho[i]});
        if (distance) series.rows.back().push_back((*distance)[i]);
    }
    Table congestion{"congestion", {"t", "node", "x"}, {}};
    for (const auto& ev : rec.congestion_events) {
        congestion.rows.push_back({ev.time, static_cast<double>(ev.node), rec.grid.x(ev.node)});
    }
    b.tables.push_back(std::move(snaps));
    b.tables.push_back(std::move(series));
    b.tables.push_back(std::move(congestion));
}

json record_summary(const SimulationRecord& rec) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        lo = std::min(lo, rec.min_rho[i]);
        hi = std::max(hi, rec.max_rho[i]);
    }
    return {
        {"status", to_string(rec.status)},
        {"message", rec.message},
        {"steps", rec.steps},
        {"dt", rec.dt},
        {"snapshots", rec.size()},
        {"t_final", rec.size() ? rec.times.back() : 0.0},
        {"initial_mass", rec.size() ? rec.mass_series.front() : 0.0},
        {"final_mass", rec.size() ? rec.mass_series.back() : 0.0},
        {"min_rho", num(lo)},
        {"max_rho", num(hi)},
        {"max_balance_defect", rec.max_balance_defect},
        {"congestion_events", rec.congestion_events.size()},
        {"bounds_ok", check_bounds(rec)},
    };
}

int finish(OutputBundle& b, const RunOutcome& run) {
    const SimulationRecord& rec = *run.record;
    if (run.aborted) {
        b.status = "aborted";
        b.summary["status"] = "aborted";
        b.summary["message"] = run.message;
        return kExitNumerical;
    }
    b.status = to_string(rec.status);
    return rec.status == RunStatus::breakdown ? kExitBreakdown : kExitOk;
}

int run_simulation(const RunConfig& cfg, OutputBundle& b) {
    const RunOutcome run = simulate(make_scenario(cfg));
    add_record_tables(b, *run.record, nullptr);
    b.summary = record_summary(*run.record);
    return finish(b, run);
}

int run_equilibrium(const RunConfig& cfg, OutputBundle& b) {
    const Scenario s = make_scenario(cfg);
    const double rho_left = cfg.real("bc.left.rho_value");
    const StationarySolution stat = solve_stationary_two_point(s.epsilon, rho_left, s.grid.size());
    const RunOutcome run = simulate(s);
    const SimulationRecord& rec = *run.record;
    const auto dist = distance_to_stationary(rec, stat.rho);
    add_record_tables(b, rec, &dist);

    Table st{"stationary", {"x", "rho"}, {}};
    for (std::size_t k = 0; k < stat.grid.size(); ++k) st.rows.push_back({stat.grid.x(k), stat.rho[k]});
    b.tables.push_back(std::move(st));

    const std::size_t tail = rec.size() / 2;
    bool monotone = true;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = tail; i < rec.size(); ++i) {
        if (i > tail && dist[i] > dist[i - 1]) monotone = false;
        for (std::size_t k = 0; k < rec.grid.size(); ++k) margin = std::min(margin, stat.rho[k] - rec.rho_snapshots[i][k]);
    }
    b.summary = record_summary(rec);
    b.summary["stationary"] = {
        {"epsilon", s.epsilon},
        {"rho_left", rho_left},
        {"j", stat.j},
        {"tail_start", tail},
        {"tail_monotone", monotone},
        {"dominance_margin", num(margin)},
        {"final_distance", dist.empty() ? 0.0 : dist.back()},
    };
    return finish(b, run);
}

int run_diagnose(const RunConfig& cfg, OutputBundle& b) {
    const RunOutcome run = simulate(make_scenario(cfg));
    const SimulationRecord& rec = *run.record;
    const double alpha = cfg.real("diagnose.alpha");
    const auto ps = parse_list(cfg.text("diagnose.p"), "diagnose.p");
    const EstimateReport rep = estimate_report(rec, alpha, ps);
    const auto from_u = du_lp_norms_from_u(rec, ps);

    Table ly{"lyapunov", {"t", "integral"}, {}};
    for (std::size_t i = 0; i < rep.lyapunov.series.size(); ++i) ly.rows.push_back({rec.times[i], rep.lyapunov.series[i]});
    Table lp{"du_norms", {"t", "p", "identity", "differenced"}, {}};
    json lp_summary = json::array();
    for (const auto& [p, s] : rep.lp_norms) {
        const auto& fd = from_u.at(p);
        for (std::size_t i = 0; i < s.values.size(); ++i) lp.rows.push_back({rec.times[i], p, s.values[i], fd.values[i]});
        json e = {{"p", p}, {"supremum", num(s.supremum)}, {"sup_time", s.sup_time}, {"finite", std::isfinite(s.supremum)},
                  {"differenced_supremum", num(fd.supremum)}};
        if (s.singular_node) e["singular_x"] = rec.grid.x(*s.singular_node);
        lp_summary.push_back(e);
    }
    b.tables.push_back(std::move(ly));
    b.tables.push_back(std::move(lp));
    add_record_tables(b, rec, nullptr);

    b.summary = record_summary(rec);
    b.summary["estimates"] = {
        {"bounds_ok", rep.bounds_ok},
        {"alpha", alpha},
        {"c_hat", rep.lyapunov.c_hat},
        {"gronwall_consistent", rep.lyapunov.gronwall_ok},
        {"singular_index", rep.lyapunov.singular_index ? json(*rep.lyapunov.singular_index) : json(nullptr)},
        {"dissipation_integral", rep.lyapunov.dissipation_integral},
        {"du_norms", lp_summary},
    };
    return finish(b, run);
}

int run_stationary(const RunConfig& cfg, OutputBundle& b) {
    const double eps = cfg.real("epsilon");
    const auto n = static_cast<std::size_t>(cfg.integer("stationary.n"));
    const double j0 = cfg.real("stationary.j_min");
    const double j1 = cfg.real("stationary.j_max");
    const double dj = cfg.real("stationary.j_step");
    std::vector<double> js;
    for (long long i = 0;; ++i) {
        const double j = j0 + static_cast<double>(i) * dj;
        if (j > j1 + 1e-9 * dj) break;
        js.push_back(j);
    }
    const auto sols = sweep_currents(eps, js, n);
    Table t{"stationary", {"j", "x", "rho", "valid"}, {}};
    json entries = json::array();
    for (const auto& s : sols) {
        for (std::size_t k = 0; k < s.grid.size(); ++k) {
            t.rows.push_back({s.j, s.grid.x(k), s.rho[k], k >= s.first_valid ? 1.0 : 0.0});
        }
        entries.push_back({{"j", s.j},
                           {"rho_at_0", num(s.rho_at_0)},
                           {"supercritical", s.supercritical},
                           {"escape_x", s.escape_x ? json(*s.escape_x) : json(nullptr)}});
    }
    b.tables.push_back(std::move(t));
    b.summary = {{"epsilon", eps}, {"solutions", entries}};
    return kExitOk;
}

int run_critical(const RunConfig& cfg, OutputBundle& b) {
    auto eps = parse_list(cfg.text("critical.epsilons"), "critical.epsilons");
    if (eps.empty()) eps.push_back(cfg.real("epsilon"));
    const double tol = cfg.real("tol");
    Table t{"critical_current", {"epsilon", "j_c", "bracket_width", "evaluations"}, {}};
    json entries = json::array();
    for (double e : eps) {
        const CriticalCurrent c = critical_current(e, tol);
        t.rows.push_back({c.epsilon, c.j_c, c.bracket_width, static_cast<double>(c.evaluations)});
        entries.push_back({{"epsilon", c.epsilon}, {"j_c", c.j_c}, {"bracket_width", c.bracket_width},
                           {"evaluations", c.evaluations}});
    }
    b.tables.push_back(std::move(t));
    b.summary = entries.front();
    b.summary["tol"] = tol;
    b.summary["entries"] = entries;
    return kExitOk;
}

int run_radial(const RunConfig& cfg, OutputBundle& b) {
    const RadialProfile profile = make_profile(cfg);
    const double t_end = cfg.real("radial.t_end");
    const double dt = cfg.real("radial.dt");
    ShockOptions opt;
    opt.scan_steps = static_cast<std::size_t>(cfg.integer("radial.scan_steps"));
    const ShockReport shock = detect_shock(profile, t_end, opt);

    // Snapshot times: the output grid up to the shock, the shock time itself,
    // and one grid time past it.
    std::vector<std::pair<double, bool>> times;
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = std::min(t_end, static_cast<double>(k) * dt);
        if (shock.shock_detected && t >= shock.shock_time_estimate) {
            if (t > shock.shock_time_estimate) times.emplace_back(shock.shock_time_estimate, false);
            times.emplace_back(t, true);
            break;
        }
        times.emplace_back(t, false);
    }

    Table prof{"profile", {"r0", "rho0", "drho0"}, {}};
    const auto deriv = profile_derivative(profile);
    for (std::size_t i = 0; i < profile.r0.size(); ++i) prof.rows.push_back({profile.r0[i], profile.rho0[i], deriv[i]});
    Table rad{"radial", {"t", "r0", "r", "rho", "post_shock"}, {}};
    for (const auto& [t, post] : times) {
        const auto pts = radial_snapshot(profile, t);
        for (std::size_t i = 0; i < pts.size(); ++i) rad.rows.push_back({t, profile.r0[i], pts[i].r, pts[i].rho, post ? 1.0 : 0.0});
    }
    b.tables.push_back(std::move(prof));
    b.tables.push_back(std::move(rad));

    b.summary = {
        {"dimension", profile.dimension},
        {"t_end", t_end},
        {"shock_detected", shock.shock_detected},
        {"shock_time", shock.shock_detected ? json(shock.shock_time_estimate) : json(nullptr)},
        {"shock_radius", shock.shock_detected ? json(shock.shock_radius_estimate) : json(nullptr)},
        {"crossing_pair", shock.shock_detected ? json::array({shock.crossing_pair.first, shock.crossing_pair.second})
                                               : json(nullptr)},
        {"analytic_time", shock.analytic_time ? json(*shock.analytic_time) : json(nullptr)},
        {"analytic_r0", shock.analytic_r0 ? json(*shock.analytic_r0) : json(nullptr)},
    };
    return kExitOk;
}

}  // namespace

CommandResult run_command(const RunConfig& cfg) {
    validate(cfg);
    CommandResult r;
    try {
        switch (cfg.command) {
            case Command::exit:
            case Command::flow: r.exit_code = run_simulation(cfg, r.bundle); break;
            case Command::equilibrium: r.exit_code = run_equilibrium(cfg, r.bundle); break;
            case Command::diagnose: r.exit_code = run_diagnose(cfg, r.bundle); break;
            case Command::stationary: r.exit_code = run_stationary(cfg, r.bundle); break;
            case Command::critical_current: r.exit_code = run_critical(cfg, r.bundle); break;
            case Command::radial: r.exit_code = run_radial(cfg, r.bundle); break;
        }
    } catch (const NumericalError& e) {
        r.bundle.status = "aborted";
        r.bundle.summary["status"] = "aborted";
        r.bundle.summary["message"] = e.what();
        r.exit_code = kExitNumerical;
    } catch (const ConvergenceError& e) {
        r.bundle.status = "aborted";
        r.bundle.summary["status"] = "aborted";
        r.bundle.summary["message"] = e.what();
        r.bundle.summary["residual"] = num(e.residual());
        r.exit_code = kExitNumerical;
    }
    return r;
}

}  // namespace crowd::io
