#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crowd/radial.hpp"
#include "crowd/simulation.hpp"

namespace crowd::io {

using json = nlohmann::json;

enum class Command { exit, flow, stationary, critical_current, radial, equilibrium, diagnose };

std::string_view to_string(Command c);
std::optional<Command> command_from_string(std::string_view s);
const std::vector<Command>& all_commands();

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumerical = 3, kExitBreakdown = 4 };

/// Bad flag, bad key or bad value. Maps to exit code 2.
class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

enum class KeyType { real, integer, text };

struct KeySpec {
    std::string name;
    KeyType type;
    json default_value;
    std::string help;
    /// Allowed values of a text key; empty means free text.
    std::vector<std::string> choices{};
};

/// Every scenario parameter, by flat dotted name. Flags are --<name>.
const std::vector<KeySpec>& key_registry();
const KeySpec* find_key(std::string_view name);

/// Keys outside the parameter registry that a flat config may carry.
inline constexpr std::string_view kMetaKeys[] = {"command", "preset", "out", "formats"};

struct RunConfig {
    Command command = Command::exit;
    std::string preset;
    std::string output_dir;
    std::vector<std::string> formats{"csv", "json"};
    /// Flat object holding a value for every registry key.
    json params;

    double real(const std::string& key) const;
    long long integer(const std::string& key) const;
    std::string text(const std::string& key) const;
    bool wants(std::string_view format) const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

const std::vector<std::string>& preset_names();
/// Flat parameter overrides of a preset; throws UsageError for unknown names.
json preset_values(std::string_view name);
/// Overrides applied for a command before any preset.
json command_defaults(Command c);

/// Converts a raw flag string to the registry type of `key`.
json parse_value(const KeySpec& key, const std::string& raw);

/// Layers defaults, command defaults, preset, file values and flag values
/// (later wins) and validates the result.
RunConfig resolve_config(Command command, const std::string& preset, const json& file_values,
                         const std::map<std::string, std::string>& flag_values, const std::string& output_dir,
                         const std::optional<std::string>& formats);

/// Flat echo: meta keys plus every parameter.
json to_json(const RunConfig& cfg);
/// Inverse of to_json; also accepts partial flat configs (missing keys take
/// their defaults). Requires "command".
RunConfig config_from_json(const json& flat);

/// Full command-line front end: crowdsim <command> [--preset NAME]
/// [--config FILE] [--key value ...] --out DIR. Throws UsageError.
/// Returns nullopt when help was printed.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv);

/// Parameter checks that need more than one key.
void validate(const RunConfig& cfg);

Scenario make_scenario(const RunConfig& cfg);
RadialProfile make_profile(const RunConfig& cfg);
std::vector<double> parse_list(const std::string& text, const std::string& key);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);
std::string to_csv(const Table& t);
std::string sha256_hex(std::string_view bytes);

struct OutputBundle {
    std::vector<Table> tables;
    json summary = json::object();
    std::string status = "completed";
};

struct CommandResult {
    OutputBundle bundle;
    int exit_code = kExitOk;
};

/// Runs the configured computation. Numerical failures and breakdowns are
/// reported through the bundle status and exit code; configuration errors
/// throw.
CommandResult run_command(const RunConfig& cfg);

/// Writes <name>.csv per table, summary.json, then manifest.json. Returns the
/// manifest.
json write_bundle(const OutputBundle& bundle, const RunConfig& cfg, double wall_seconds);

}  // namespace crowd::io
