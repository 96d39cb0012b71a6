#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crowd/io.hpp"

using namespace crowd;
using namespace crowd::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("crowdsim_unit_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CROWDSIM_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::optional<RunConfig> parse(std::vector<std::string> args) {
    args.insert(args.begin(), "crowdsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_command_line(static_cast<int>(argv.size()), argv.data());
}

RunConfig resolve(Command c, const std::string& preset, std::map<std::string, std::string> flags = {}) {
    return resolve_config(c, preset, json::object(), flags, "out", std::nullopt);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("command names") {
    for (Command c : all_commands()) CHECK(command_from_string(to_string(c)) == c);
    CHECK(to_string(Command::critical_current) == "critical-current");
    CHECK_FALSE(command_from_string("simulate"));
}

TEST_CASE("preset expansion") {
    const auto ex1 = resolve(Command::exit, "example1");
    CHECK(ex1.real("epsilon") == 0.01);
    CHECK(ex1.integer("grid.n") == 101);
    CHECK(ex1.real("initial.amplitude") == 0.9);
    CHECK(ex1.text("bc.left.u") == "exit");
    CHECK(ex1.text("bc.right.rho") == "dirichlet");

    const auto ex2 = resolve(Command::flow, "example2");
    CHECK(ex2.real("epsilon") == 0.1);
    CHECK(ex2.text("bc.left.rho") == "influx");
    CHECK(ex2.real("bc.left.influx") == 1.0);
    CHECK(ex2.text("bc.left.u") == "reflecting");
    CHECK(ex2.real("initial.amplitude") == 0.4);

    const auto tr = resolve(Command::equilibrium, "trend");
    CHECK(tr.text("initial.profile") == "poly");
    CHECK(tr.real("bc.left.rho_value") == -0.2);
    CHECK(tr.real("bc.left.rho_ramp") == 10.0);
    CHECK(tr.real("epsilon") == 0.05);

    const auto r2 = resolve(Command::radial, "radial-case2");
    CHECK(r2.real("radial.support_min") == 0.5);
    CHECK(r2.real("radial.peak") == 0.8);

    CHECK_THROWS_AS(resolve(Command::exit, "example9"), UsageError);
}

TEST_CASE("layering: flags beat file values beat presets") {
    json file = {{"epsilon", 0.02}, {"grid.n", 51}};
    const auto cfg = resolve_config(Command::exit, "example1", file, {{"grid.n", "61"}}, "o", std::nullopt);
    CHECK(cfg.real("epsilon") == 0.02);
    CHECK(cfg.integer("grid.n") == 61);
    // Switching a preset's influx end to a Dirichlet end drops the influx.
    const auto flow = resolve(Command::flow, "example1");
    CHECK(flow.text("bc.left.rho") == "dirichlet");
}

TEST_CASE("config echo round-trips") {
    for (Command c : all_commands()) {
        const auto cfg = resolve_config(c, "", json::object(), {}, "dir", std::string("csv"));
        const auto back = config_from_json(to_json(cfg));
        CHECK(back == cfg);
        CHECK(config_from_json(json::parse(to_json(cfg).dump())) == cfg);
    }
    const auto cfg = resolve(Command::radial, "radial-case3", {{"radial.dimension", "3"}});
    CHECK(config_from_json(to_json(cfg)) == cfg);
}

TEST_CASE("usage errors") {
    CHECK_THROWS_AS(parse({"exit", "--bogus", "1", "--out", "x"}), UsageError);
    CHECK_THROWS_AS(parse({"--out", "x"}), UsageError);
    CHECK_THROWS_AS(parse({"exit", "--preset", "example1"}), UsageError);
    CHECK_THROWS_AS(parse({"exit", "--epsilon", "abc", "--out", "x"}), UsageError);
    CHECK_THROWS_AS(parse({"exit", "--grid.n", "1.5", "--out", "x"}), UsageError);
    CHECK_THROWS_AS(parse({"flow", "--bc.left.rho", "dirichlet", "--bc.left.influx", "2", "--out", "x"}),
                    UsageError);
    CHECK_THROWS_AS(parse({"exit", "--bc.left.u", "reflecting", "--bc.right.u", "reflecting", "--out", "x"}),
                    UsageError);
    CHECK_THROWS_AS(parse({"exit", "--initial.profile", "gauss", "--out", "x"}), UsageError);
    const auto ok = parse({"exit", "--preset", "example1", "--epsilon", "0.02", "--out", "x"});
    REQUIRE(ok);
    CHECK(ok->real("epsilon") == 0.02);
    CHECK(ok->output_dir == "x");
}

TEST_CASE("config files") {
    const auto dir = scratch("cfgfile");
    fs::create_directories(dir);
    const auto file = dir / "c.json";
    std::ofstream(file) << R"({"command": "exit", "preset": "example1", "epsilon": 0.03})";
    const auto cfg = parse({"exit", "--config", file.string(), "--out", "o"});
    REQUIRE(cfg);
    CHECK(cfg->real("epsilon") == 0.03);
    CHECK(cfg->preset == "example1");
    CHECK_THROWS_AS(parse({"flow", "--config", file.string(), "--out", "o"}), UsageError);
    std::ofstream(dir / "bad.json") << "[1, 2]";
    CHECK_THROWS_AS(parse({"exit", "--config", (dir / "bad.json").string(), "--out", "o"}), UsageError);
    CHECK_THROWS_AS(parse({"exit", "--config", (dir / "missing.json").string(), "--out", "o"}), UsageError);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-2.5e-300) == "-2.5e-300");
    CHECK(format_number(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(NAN) == "nan");
    for (double v : {0.1, 1.0 / 3.0, 123456.789, 6.02214076e23}) CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("csv layout") {
    const Table t{"t", {"a", "b"}, {{1.0, 0.5}, {2.0, 0.25}}};
    CHECK(to_csv(t) == "a,b\n1,0.5\n2,0.25\n");
    const Table ragged{"r", {"a", "b"}, {{1.0}}};
    CHECK_THROWS(to_csv(ragged));
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("bundle files are hashed in the manifest") {
    const auto dir = scratch("bundle");
    auto cfg = resolve(Command::exit, "example1", {{"time.t_end", "0.1"}});
    cfg.output_dir = dir.string();
    const auto result = run_command(cfg);
    CHECK(result.exit_code == kExitOk);
    const auto manifest = write_bundle(result.bundle, cfg, 0.5);
    CHECK(json::parse(slurp(dir / "manifest.json")) == manifest);
    CHECK(manifest.at("status") == "completed");
    CHECK(config_from_json(manifest.at("config")) == cfg);
    REQUIRE(manifest.at("files").size() >= 2);
    for (const auto& f : manifest.at("files")) {
        const auto bytes = slurp(dir / f.at("name").get<std::string>());
        CHECK(f.at("sha256") == sha256_hex(bytes));
        CHECK(f.at("bytes").get<std::size_t>() == bytes.size());
    }
}

TEST_CASE("format selection") {
    const auto dir = scratch("formats");
    auto cfg = resolve_config(Command::critical_current, "", json::object(), {}, dir.string(), std::string("json"));
    const auto result = run_command(cfg);
    write_bundle(result.bundle, cfg, 0.0);
    CHECK(fs::exists(dir / "summary.json"));
    CHECK_FALSE(fs::exists(dir / "critical_current.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("critical-current summary") {
    const auto cfg = resolve(Command::critical_current, "", {{"epsilon", "1"}});
    const auto res = run_command(cfg);
    const auto& s = res.bundle.summary;
    for (const char* key : {"epsilon", "j_c", "bracket_width", "evaluations", "tol", "entries"}) {
        CHECK_MESSAGE(s.contains(key), key);
    }
    CHECK(s.at("j_c").get<double>() == doctest::Approx(1.172).epsilon(1e-3));
}

TEST_CASE("zero-length run still writes a bundle") {
    const auto dir = scratch("zero");
    auto cfg = resolve(Command::exit, "example1", {{"time.t_end", "0"}});
    cfg.output_dir = dir.string();
    const auto res = run_command(cfg);
    CHECK(res.exit_code == kExitOk);
    write_bundle(res.bundle, cfg, 0.0);
    const auto csv = slurp(dir / "snapshots.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);
}

TEST_CASE("radial tables") {
    const auto cfg = resolve(Command::radial, "radial-case2");
    const auto res = run_command(cfg);
    REQUIRE(res.exit_code == kExitOk);
    bool seen = false;
    for (const auto& t : res.bundle.tables) {
        if (t.name == "radial") {
            seen = true;
            CHECK(t.columns == std::vector<std::string>{"t", "r0", "r", "rho", "post_shock"});
        }
    }
    CHECK(seen);
    CHECK(res.bundle.summary.at("shock_detected") == true);
}

TEST_CASE("cli exit codes and determinism") {
    const auto a = scratch("cli_a");
    const auto b = scratch("cli_b");
    CHECK(run_cli("exit --preset example1 --time.t_end 0.2 --out " + a.string()) == kExitOk);
    CHECK(run_cli("exit --preset example1 --time.t_end 0.2 --out " + b.string()) == kExitOk);
    CHECK(slurp(a / "snapshots.csv") == slurp(b / "snapshots.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(run_cli("exit --nope 1 --out " + a.string()) == kExitUsage);
    CHECK(run_cli("") == kExitUsage);
    CHECK(run_cli("flow --preset example2 --out " + scratch("cli_c").string()) == kExitBreakdown);
    CHECK(run_cli("exit --eikonal.max_iterations 1 --initial.amplitude 0.95 --out " + scratch("cli_d").string()) ==
          kExitNumerical);
    CHECK(run_cli("exit --help") == kExitOk);
}

}  // TEST_SUITE
