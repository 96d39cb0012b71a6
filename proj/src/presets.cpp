#include "crowd/io.hpp"

namespace crowd::io {

namespace {

// Sets every boundary key so presets never inherit a conflicting condition.
void set_side(json& j, const std::string& side, const std::string& rho, double value, double ramp, double influx,
              const std::string& u) {
    const std::string p = "bc." + side + ".";
    j[p + "rho"] = rho;
    j[p + "rho_value"] = value;
    j[p + "rho_ramp"] = ramp;
    j[p + "influx"] = influx;
    j[p + "u"] = u;
    j[p + "u_value"] = 0.0;
}

json example1() {
    json j = {
        {"epsilon", 0.01},
        {"grid.n", 101},
        {"time.t_end", 3.0},
        {"time.dt", 0.005},
        {"time.record_every", 10},
        {"initial.profile", "sin2"},
        {"initial.amplitude", 0.9},
        {"initial.modes", 3},
    };
    set_side(j, "left", "dirichlet", 0.0, 0.0, 0.0, "exit");
    set_side(j, "right", "dirichlet", 0.0, 0.0, 0.0, "exit");
    return j;
}

json example2() {
    json j = {
        {"epsilon", 0.1},
        {"grid.n", 101},
        {"time.t_end", 3.0},
        {"time.dt", 0.005},
        {"time.record_every", 10},
        {"initial.profile", "sin2"},
        {"initial.amplitude", 0.4},
        {"initial.modes", 3},
    };
    set_side(j, "left", "influx", 0.0, 0.0, 1.0, "reflecting");
    set_side(j, "right", "dirichlet", 0.0, 0.0, 0.0, "exit");
    return j;
}

json trend() {
    json j = {
        {"epsilon", 0.05},
        {"grid.n", 401},
        {"time.t_end", 10.0},
        {"time.dt", 0.00125},
        {"time.record_every", 80},
        {"initial.profile", "poly"},
        {"initial.amplitude", 1.0},
    };
    set_side(j, "left", "dirichlet", -0.2, 10.0, 0.0, "reflecting");
    set_side(j, "right", "dirichlet", 0.0, 0.0, 0.0, "exit");
    return j;
}

json radial_case(double lo, double hi, double peak_r, double peak) {
    return {
        {"radial.profile", "bump"},
        {"radial.support_min", lo},
        {"radial.support_max", hi},
        {"radial.peak_r", peak_r},
        {"radial.peak", peak},
    };
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"example1",     "example2",     "trend",
                                                "radial-case1", "radial-case2", "radial-case3"};
    return names;
}

json preset_values(std::string_view name) {
    if (name == "example1") return example1();
    if (name == "example2") return example2();
    if (name == "trend") return trend();
    if (name == "radial-case1") return radial_case(0.0, 0.6, 0.2, 0.35);
    if (name == "radial-case2") return radial_case(0.5, 1.0, 0.75, 0.8);
    if (name == "radial-case3") return radial_case(0.0, 1.0, 0.5, 0.4);
    throw UsageError("unknown preset '" + std::string(name) + "'");
}

json command_defaults(Command c) {
    switch (c) {
        case Command::exit:
        case Command::diagnose:
            return example1();
        case Command::flow:
            return example2();
        case Command::equilibrium:
            return trend();
        case Command::radial:
            return preset_values("radial-case1");
        case Command::stationary:
        case Command::critical_current:
            return {{"epsilon", 1.0}};
    }
    return json::object();
}

}  // namespace crowd::io
