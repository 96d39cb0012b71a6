#include <chrono>
#include <iostream>

#include "crowd/io.hpp"

int main(int argc, char** argv) {
    using namespace crowd::io;
    try {
        const auto cfg = parse_command_line(argc, argv);
        if (!cfg) return kExitOk;
        const auto start = std::chrono::steady_clock::now();
        CommandResult result = run_command(*cfg);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_bundle(result.bundle, *cfg, wall);
        if (result.exit_code != kExitOk) {
            std::cerr << "crowdsim: " << result.bundle.status;
            if (result.bundle.summary.contains("message")) {
                std::cerr << ": " << result.bundle.summary["message"].get<std::string>();
            }
            std::cerr << "\n";
        }
        return result.exit_code;
    } catch (const crowd::ConfigError& e) {
        std::cerr << "crowdsim: usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "crowdsim: " << e.what() << "\n";
        return 1;
    }
}
