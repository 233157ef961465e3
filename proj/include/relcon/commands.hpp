#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "relcon/config.hpp"

namespace relcon {

// Exit statuses shared by every command.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;      // infeasible, uncertified or a failed check
inline constexpr int kExitConfig = 2;    // bad config or usage
inline constexpr int kExitNumeric = 3;   // solver or integration breakdown

struct CommandOptions {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps, step, horizon;
    std::string format = "csv";  // trace format: csv or json
    bool write_files = true;
};

struct CommandResult {
    int exit_code = kExitPass;
    nlohmann::json report;
};

// Applies --seed/--eps/--step/--horizon/--out on top of a loaded config.
RunConfig apply_overrides(RunConfig c, const CommandOptions& opts);

CommandResult run_spectrum(const RunConfig& c, const CommandOptions& opts);
CommandResult run_synthesize(const RunConfig& c, const CommandOptions& opts);
CommandResult run_analyze(const RunConfig& c, const CommandOptions& opts);
CommandResult run_simulate(const RunConfig& c, const CommandOptions& opts);
CommandResult run_verify(const RunConfig& c, const CommandOptions& opts);

enum class Scenario { Robots, OscillatorsConstrained, OscillatorsUncertain };

Scenario parse_scenario(const std::string& s);
const char* to_string(Scenario s);
RunConfig default_config(Scenario s);

inline constexpr int kUncertainDraws = 20;

CommandResult run_reproduce(Scenario s, const RunConfig& c, const CommandOptions& opts);

// Catches library errors and maps them to exit statuses with an error report.
template <typename F>
CommandResult guarded(F&& f);

nlohmann::json error_report(const std::exception& e);
int exit_code_for(const std::exception& e);

template <typename F>
CommandResult guarded(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {exit_code_for(e), error_report(e)};
    }
}

}  // namespace relcon
