#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "crowd/io.hpp"

namespace crowd::io {

namespace {

struct SubcommandSlots {
    CLI::App* app = nullptr;
    std::string preset;
    std::string config;
    std::string out;
    std::string formats;
    CLI::Option* formats_opt = nullptr;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> options;
};

std::string describe(Command c) {
    switch (c) {
        case Command::exit: return "coupled run of the exit problem";
        case Command::flow: return "coupled run with a prescribed boundary current";
        case Command::stationary: return "stationary profiles for a family of currents";
        case Command::critical_current: return "critical current as a function of viscosity";
        case Command::radial: return "radial characteristics and shock detection";
        case Command::equilibrium: return "coupled run compared against the stationary solution";
        case Command::diagnose: return "coupled run with a priori estimate monitoring";
    }
    return "";
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("--config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw UsageError("--config: '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("--config: '" + path + "' must hold a flat JSON object");
    return j;
}

}  // namespace

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv) {
    CLI::App app{"Hughes crowd model toolkit", "crowdsim"};
    app.require_subcommand(1, 1);

    std::vector<std::unique_ptr<SubcommandSlots>> slots;
    for (Command c : all_commands()) {
        auto s = std::make_unique<SubcommandSlots>();
        s->app = app.add_subcommand(std::string(to_string(c)), describe(c));
        s->app->add_option("--preset", s->preset, "named scenario")->check(CLI::IsMember(preset_names()));
        s->app->add_option("--config", s->config, "flat JSON config file");
        s->app->add_option("--out", s->out, "output directory");
        s->formats_opt = s->app->add_option("--formats", s->formats, "comma-separated subset of csv,json");
        for (const auto& key : key_registry()) {
            s->options[key.name] = s->app->add_option("--" + key.name, s->raw[key.name], key.help);
        }
        slots.push_back(std::move(s));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return std::nullopt;
        }
        throw UsageError(e.what());
    }

    for (std::size_t i = 0; i < slots.size(); ++i) {
        SubcommandSlots& s = *slots[i];
        if (!s.app->parsed()) continue;
        const Command cmd = all_commands()[i];
        json file = json::object();
        std::string preset = s.preset;
        std::string out = s.out;
        std::optional<std::string> formats;
        if (!s.config.empty()) {
            file = read_config_file(s.config);
            if (file.contains("command") && file["command"] != std::string(to_string(cmd))) {
                throw UsageError("--config: file is for command '" + file["command"].dump() + "'");
            }
            if (preset.empty() && file.contains("preset") && file["preset"].is_string()) preset = file["preset"];
            if (out.empty() && file.contains("out") && file["out"].is_string()) out = file["out"];
            if (file.contains("formats") && file["formats"].is_string()) formats = file["formats"].get<std::string>();
            for (auto meta : kMetaKeys) file.erase(std::string(meta));
        }
        if (s.formats_opt->count() > 0) formats = s.formats;
        if (out.empty()) throw UsageError("--out is required");
        std::map<std::string, std::string> flags;
        for (const auto& [name, opt] : s.options) {
            if (opt->count() > 0) flags[name] = s.raw[name];
        }
        return resolve_config(cmd, preset, file, flags, out, formats);
    }
    throw UsageError("missing command");
}

}  // namespace crowd::io
