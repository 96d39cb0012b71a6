#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crowd/diagnostics.hpp"
#include "crowd/io.hpp"

namespace crowd::io {

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 7> kCommandNames{{
    {Command::exit, "exit"},
    {Command::flow, "flow"},
    {Command::stationary, "stationary"},
    {Command::critical_current, "critical-current"},
    {Command::radial, "radial"},
    {Command::equilibrium, "equilibrium"},
    {Command::diagnose, "diagnose"},
}};

std::vector<KeySpec> build_registry() {
    using K = KeyType;
    const std::vector<std::string> rho_kinds{"dirichlet", "noflux", "influx"};
    const std::vector<std::string> u_kinds{"exit", "reflecting"};
    std::vector<KeySpec> r{
        {"grid.x_min", K::real, 0.0, "left end of the interval"},
        {"grid.x_max", K::real, 1.0, "right end of the interval"},
        {"grid.n", K::integer, 101, "number of grid nodes"},
        {"epsilon", K::real, 0.01, "viscosity"},
        {"time.t_end", K::real, 3.0, "final time"},
        {"time.dt", K::real, 0.005, "time step"},
        {"time.record_every", K::integer, 10, "steps between recorded snapshots"},
        {"initial.profile", K::text, "sin2", "initial density shape", {"sin2", "poly", "constant"}},
        {"initial.amplitude", K::real, 0.9, "amplitude of sin2 / poly initial data"},
        {"initial.modes", K::integer, 3, "k in amplitude * sin^2(k pi x)"},
        {"initial.value", K::real, 0.0, "value of constant initial data"},
    };
    for (const std::string side : {"left", "right"}) {
        const std::string p = "bc." + side + ".";
        r.push_back({p + "rho", K::text, "dirichlet", "density condition at the " + side + " end", rho_kinds});
        r.push_back({p + "rho_value", K::real, 0.0, "Dirichlet density value"});
        r.push_back({p + "rho_ramp", K::real, 0.0, "ramp rate: rho = value * (1 - exp(-rate t)) when > 0"});
        r.push_back({p + "influx", K::real, 0.0, "entering current for an influx condition"});
        r.push_back({p + "u", K::text, "exit", "exit-time condition at the " + side + " end", u_kinds});
        r.push_back({p + "u_value", K::real, 0.0, "exit-time value at an exit"});
    }
    const std::vector<KeySpec> tail{
        {"eikonal.max_iterations", K::integer, 10000, "sweep limit of the eikonal solver"},
        {"eikonal.tolerance", K::real, 1e-10, "scaled residual tolerance of the eikonal solver"},
        {"eikonal.rho_cap", K::real, kDefaultRhoCap, "ceiling on rho inside the slowness"},
        {"breakdown_tol", K::real, 1e-3, "halt once max rho > 1 + breakdown_tol"},
        {"stationary.n", K::integer, 201, "grid nodes of stationary profiles"},
        {"stationary.j_min", K::real, 0.0, "first current of the stationary family"},
        {"stationary.j_max", K::real, 1.5, "last current of the stationary family"},
        {"stationary.j_step", K::real, 0.1, "current increment of the stationary family"},
        {"tol", K::real, 1e-4, "bracket width of the critical current"},
        {"critical.epsilons", K::text, "", "comma-separated viscosities (empty: use epsilon)"},
        {"radial.dimension", K::integer, 2, "spatial dimension, 2 or 3"},
        {"radial.profile", K::text, "bump", "initial radial density shape", {"bump", "constant"}},
        {"radial.support_min", K::real, 0.0, "inner radius of the support"},
        {"radial.support_max", K::real, 0.6, "outer radius of the support"},
        {"radial.peak_r", K::real, 0.2, "radius of the bump maximum"},
        {"radial.peak", K::real, 0.35, "bump maximum"},
        {"radial.value", K::real, 0.5, "value of a constant profile"},
        {"radial.samples", K::integer, 400, "number of characteristics"},
        {"radial.r_min", K::real, kDefaultRadialRMin, "smallest launch radius"},
        {"radial.t_end", K::real, 2.0, "final time of the radial run"},
        {"radial.dt", K::real, 0.05, "time between radial snapshots"},
        {"radial.scan_steps", K::integer, 2000, "coarse steps of the shock scan"},
        {"diagnose.alpha", K::real, kDefaultAlpha, "Lyapunov exponent parameter (< -1)"},
        {"diagnose.p", K::text, "2,4", "comma-separated exponents p of int |Du|^(2p)"},
    };
    r.insert(r.end(), tail.begin(), tail.end());
    return r;
}

json normalize(const KeySpec& key, const json& v) {
    switch (key.type) {
        case KeyType::real:
            if (!v.is_number()) throw UsageError("key '" + key.name + "' needs a number");
            if (!std::isfinite(v.get<double>())) throw UsageError("key '" + key.name + "' must be finite");
            return v.get<double>();
        case KeyType::integer:
            if (v.is_number_integer()) return v.get<long long>();
            if (v.is_number_float() && std::trunc(v.get<double>()) == v.get<double>()) {
                return static_cast<long long>(v.get<double>());
            }
            throw UsageError("key '" + key.name + "' needs an integer");
        case KeyType::text: {
            if (!v.is_string()) throw UsageError("key '" + key.name + "' needs a string");
            const auto s = v.get<std::string>();
            if (!key.choices.empty() && std::find(key.choices.begin(), key.choices.end(), s) == key.choices.end()) {
                std::string allowed;
                for (const auto& c : key.choices) allowed += (allowed.empty() ? "" : ", ") + c;
                throw UsageError("key '" + key.name + "' must be one of {" + allowed + "}, got '" + s + "'");
            }
            return s;
        }
    }
    return v;
}

void merge(json& params, const json& overrides, const std::string& origin) {
    for (const auto& [k, v] : overrides.items()) {
        const KeySpec* key = find_key(k);
        if (!key) throw UsageError("unknown key '" + k + "' in " + origin);
        params[k] = normalize(*key, v);
    }
}

std::vector<std::string> parse_formats(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item != "csv" && item != "json") throw UsageError("formats: unknown format '" + item + "'");
        if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw UsageError("key '" + key + "': " + what);
}

}  // namespace

std::string_view to_string(Command c) {
    for (const auto& [cmd, name] : kCommandNames) {
        if (cmd == c) return name;
    }
    return "unknown";
}

std::optional<Command> command_from_string(std::string_view s) {
    for (const auto& [cmd, name] : kCommandNames) {
        if (name == s) return cmd;
    }
    return std::nullopt;
}

const std::vector<Command>& all_commands() {
    static const std::vector<Command> cmds = [] {
        std::vector<Command> v;
        for (const auto& entry : kCommandNames) v.push_back(entry.first);
        return v;
    }();
    return cmds;
}

const std::vector<KeySpec>& key_registry() {
    static const std::vector<KeySpec> registry = build_registry();
    return registry;
}

const KeySpec* find_key(std::string_view name) {
    for (const auto& k : key_registry()) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

double RunConfig::real(const std::string& key) const { return params.at(key).get<double>(); }
long long RunConfig::integer(const std::string& key) const { return params.at(key).get<long long>(); }
std::string RunConfig::text(const std::string& key) const { return params.at(key).get<std::string>(); }
bool RunConfig::wants(std::string_view format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

json parse_value(const KeySpec& key, const std::string& raw) {
    switch (key.type) {
        case KeyType::real: {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(raw, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != raw.size()) throw UsageError("--" + key.name + ": '" + raw + "' is not a number");
            return normalize(key, v);
        }
        case KeyType::integer: {
            std::size_t used = 0;
            long long v = 0;
            try {
                v = std::stoll(raw, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != raw.size()) {
                throw UsageError("--" + key.name + ": '" + raw + "' is not an integer");
            }
            return v;
        }
        case KeyType::text:
            return normalize(key, raw);
    }
    return raw;
}

RunConfig resolve_config(Command command, const std::string& preset, const json& file_values,
                         const std::map<std::string, std::string>& flag_values, const std::string& output_dir,
                         const std::optional<std::string>& formats) {
    RunConfig cfg;
    cfg.command = command;
    cfg.preset = preset;
    cfg.output_dir = output_dir;
    if (formats) cfg.formats = parse_formats(*formats);

    cfg.params = json::object();
    for (const auto& k : key_registry()) cfg.params[k.name] = k.default_value;
    merge(cfg.params, command_defaults(command), "command defaults");
    if (!preset.empty()) merge(cfg.params, preset_values(preset), "preset '" + preset + "'");
    merge(cfg.params, file_values, "config file");
    for (const auto& [k, raw] : flag_values) {
        const KeySpec* key = find_key(k);
        if (!key) throw UsageError("unknown option '--" + k + "'");
        cfg.params[k] = parse_value(*key, raw);
    }
    validate(cfg);
    return cfg;
}

json to_json(const RunConfig& cfg) {
    json j = cfg.params;
    j["command"] = std::string(to_string(cfg.command));
    j["preset"] = cfg.preset;
    j["out"] = cfg.output_dir;
    j["formats"] = join(cfg.formats);
    return j;
}

RunConfig config_from_json(const json& flat) {
    if (!flat.is_object()) throw UsageError("config must be a flat JSON object");
    if (!flat.contains("command") || !flat["command"].is_string()) throw UsageError("config is missing 'command'");
    const auto cmd = command_from_string(flat["command"].get<std::string>());
    if (!cmd) throw UsageError("unknown command '" + flat["command"].get<std::string>() + "'");
    auto text_or = [&](const char* key, std::string fallback) {
        if (!flat.contains(key)) return fallback;
        if (!flat[key].is_string()) throw UsageError(std::string("key '") + key + "' needs a string");
        return flat[key].get<std::string>();
    };
    json params = json::object();
    for (const auto& [k, v] : flat.items()) {
        if (std::find(std::begin(kMetaKeys), std::end(kMetaKeys), k) == std::end(kMetaKeys)) params[k] = v;
    }
    std::optional<std::string> formats;
    if (flat.contains("formats")) formats = text_or("formats", "");
    return resolve_config(*cmd, text_or("preset", ""), params, {}, text_or("out", ""), formats);
}

void validate(const RunConfig& cfg) {
    const bool sim = cfg.command == Command::exit || cfg.command == Command::flow ||
                     cfg.command == Command::equilibrium || cfg.command == Command::diagnose;
    if (sim) {
        require(cfg.real("grid.x_max") > cfg.real("grid.x_min"), "grid.x_max", "must exceed grid.x_min");
        require(cfg.integer("grid.n") >= 3, "grid.n", "must be >= 3");
        require(cfg.real("epsilon") >= 0.0, "epsilon", "must be >= 0");
        require(cfg.real("time.t_end") >= 0.0, "time.t_end", "must be >= 0");
        require(cfg.real("time.dt") > 0.0, "time.dt", "must be > 0");
        require(cfg.integer("time.record_every") >= 1, "time.record_every", "must be >= 1");
        require(cfg.integer("eikonal.max_iterations") >= 1, "eikonal.max_iterations", "must be >= 1");
        require(cfg.real("eikonal.tolerance") > 0.0, "eikonal.tolerance", "must be > 0");
        require(cfg.real("eikonal.rho_cap") > 0.0 && cfg.real("eikonal.rho_cap") < 1.0, "eikonal.rho_cap",
                "must lie in (0, 1)");
        require(cfg.real("breakdown_tol") >= 0.0, "breakdown_tol", "must be >= 0");
        for (const std::string side : {"left", "right"}) {
            const std::string p = "bc." + side + ".";
            const std::string kind = cfg.text(p + "rho");
            require(kind == "influx" || cfg.real(p + "influx") == 0.0, p + "influx",
                    "set but " + p + "rho is '" + kind + "'");
            require(kind == "dirichlet" || (cfg.real(p + "rho_value") == 0.0 && cfg.real(p + "rho_ramp") == 0.0),
                    p + "rho_value", "set but " + p + "rho is '" + kind + "'");
            require(cfg.real(p + "influx") >= 0.0, p + "influx", "must be >= 0");
            require(cfg.real(p + "rho_ramp") >= 0.0, p + "rho_ramp", "must be >= 0");
            require(cfg.text(p + "u") == "exit" || cfg.real(p + "u_value") == 0.0, p + "u_value",
                    "set but " + p + "u is 'reflecting'");
        }
        require(cfg.text("bc.left.u") == "exit" || cfg.text("bc.right.u") == "exit", "bc.left.u",
                "at least one end must be an exit");
    }
    if (cfg.command == Command::equilibrium) {
        require(cfg.real("grid.x_min") == 0.0 && cfg.real("grid.x_max") == 1.0, "grid.x_min",
                "equilibrium runs need the unit interval");
        require(cfg.text("bc.left.rho") == "dirichlet" && cfg.text("bc.right.rho") == "dirichlet" &&
                    cfg.real("bc.right.rho_value") == 0.0,
                "bc.left.rho", "equilibrium runs need Dirichlet density at both ends with rho(1) = 0");
        require(cfg.real("epsilon") > 0.0, "epsilon", "must be > 0 for the stationary comparison");
    }
    if (cfg.command == Command::diagnose) {
        require(cfg.real("diagnose.alpha") < -1.0, "diagnose.alpha", "must be < -1");
        for (double p : parse_list(cfg.text("diagnose.p"), "diagnose.p")) {
            require(p > 1.0, "diagnose.p", "every p must exceed 1");
        }
    }
    if (cfg.command == Command::stationary) {
        require(cfg.real("epsilon") > 0.0, "epsilon", "must be > 0");
        require(cfg.integer("stationary.n") >= 3, "stationary.n", "must be >= 3");
        require(cfg.real("stationary.j_step") > 0.0, "stationary.j_step", "must be > 0");
        require(cfg.real("stationary.j_max") >= cfg.real("stationary.j_min"), "stationary.j_max",
                "must be >= stationary.j_min");
    }
    if (cfg.command == Command::critical_current) {
        require(cfg.real("tol") > 0.0, "tol", "must be > 0");
        const auto eps = parse_list(cfg.text("critical.epsilons"), "critical.epsilons");
        if (eps.empty()) require(cfg.real("epsilon") > 0.0, "epsilon", "must be > 0");
        for (double e : eps) require(e > 0.0, "critical.epsilons", "every epsilon must be > 0");
    }
    if (cfg.command == Command::radial) {
        const auto d = cfg.integer("radial.dimension");
        require(d == 2 || d == 3, "radial.dimension", "must be 2 or 3");
        require(cfg.integer("radial.samples") >= 2, "radial.samples", "must be >= 2");
        require(cfg.real("radial.t_end") > 0.0, "radial.t_end", "must be > 0");
        require(cfg.real("radial.dt") > 0.0, "radial.dt", "must be > 0");
        require(cfg.real("radial.r_min") > 0.0, "radial.r_min", "must be > 0");
        require(cfg.integer("radial.scan_steps") >= 1, "radial.scan_steps", "must be >= 1");
        require(cfg.real("radial.support_max") > cfg.real("radial.support_min"), "radial.support_max",
                "must exceed radial.support_min");
    }
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        if (b == std::string::npos) continue;
        item = item.substr(b, item.find_last_not_of(' ') - b + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !std::isfinite(v)) {
            throw UsageError("key '" + key + "': '" + item + "' is not a number");
        }
        out.push_back(v);
    }
    return out;
}

Scenario make_scenario(const RunConfig& cfg) {
    const Grid1D grid(cfg.real("grid.x_min"), cfg.real("grid.x_max"), static_cast<std::size_t>(cfg.integer("grid.n")));
    const std::string shape = cfg.text("initial.profile");
    const double amp = cfg.real("initial.amplitude");
    const double a = grid.x_min();
    const double b = grid.x_max();
    std::function<double(double)> f;
    if (shape == "sin2") {
        const double k = static_cast<double>(cfg.integer("initial.modes"));
        f = [=](double x) {
            const double s = std::sin(k * std::numbers::pi * (x - a) / (b - a));
            return amp * s * s;
        };
    } else if (shape == "poly") {
        f = [=](double x) { return amp * (x - a) * (x - a) * (b - x) * (b - x); };
    } else {
        const double v = cfg.real("initial.value");
        f = [=](double) { return v; };
    }

    auto endpoint = [&](const std::string& side) {
        const std::string p = "bc." + side + ".";
        EndpointConditions e;
        const std::string kind = cfg.text(p + "rho");
        if (kind == "dirichlet") {
            e.rho = DirichletDensity{cfg.real(p + "rho_value"), cfg.real(p + "rho_ramp")};
        } else if (kind == "noflux") {
            e.rho = NoFlux{};
        } else {
            e.rho = InfluxDensity{cfg.real(p + "influx")};
        }
        if (cfg.text(p + "u") == "exit") {
            e.u = DirichletValue{cfg.real(p + "u_value")};
        } else {
            e.u = ReflectingValue{};
        }
        return e;
    };

    Scenario s{grid, sample_function<DensityField>(grid, f)};
    s.bc = {endpoint("left"), endpoint("right")};
    s.epsilon = cfg.real("epsilon");
    s.t_end = cfg.real("time.t_end");
    s.dt = cfg.real("time.dt");
    s.record_every = static_cast<std::size_t>(cfg.integer("time.record_every"));
    s.eikonal.max_iterations = static_cast<int>(cfg.integer("eikonal.max_iterations"));
    s.eikonal.residual_tolerance = cfg.real("eikonal.tolerance");
    s.eikonal.rho_cap = cfg.real("eikonal.rho_cap");
    s.breakdown_tol = cfg.real("breakdown_tol");
    crowd::validate(s);
    return s;
}

RadialProfile make_profile(const RunConfig& cfg) {
    const int d = static_cast<int>(cfg.integer("radial.dimension"));
    const auto samples = static_cast<std::size_t>(cfg.integer("radial.samples"));
    const double lo = cfg.real("radial.support_min");
    const double hi = cfg.real("radial.support_max");
    if (cfg.text("radial.profile") == "constant") {
        return constant_profile(d, std::max(lo, cfg.real("radial.r_min")), hi, cfg.real("radial.value"), samples);
    }
    return bump_profile(d, lo, hi, cfg.real("radial.peak_r"), cfg.real("radial.peak"), samples,
                        cfg.real("radial.r_min"));
}

}  // namespace crowd::io
