#include <iostream>

#include <CLI11.hpp>

#include "relcon/commands.hpp"

using namespace relcon;

int main(int argc, char** argv) {
    CLI::App app{"Robust consensus design under sector-bounded relative-state channels"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scenario;
    CommandOptions opts;
    std::uint64_t seed = 0;
    double eps = 0.0, step = 0.0, horizon = 0.0;
    std::string out;

    auto add_flags = [&](CLI::App* sub, bool config_required) {
        auto* cfg = sub->add_option("--config", config_path, "JSON run configuration");
        if (config_required) cfg->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "seed for random channel gains");
        sub->add_option("--eps", eps, "decay rate epsilon");
        sub->add_option("--step", step, "RK4 step");
        sub->add_option("--horizon", horizon, "simulation horizon");
        sub->add_option("--format", opts.format, "trace format")->check(CLI::IsMember({"csv", "json"}));
    };

    for (const char* name : {"spectrum", "synthesize", "analyze", "simulate", "verify"}) {
        add_flags(app.add_subcommand(name, std::string("run ") + name), true);
    }
    auto* rep = app.add_subcommand("reproduce", "reproduce a worked example with embedded defaults");
    rep->add_option("scenario", scenario, "robots | oscillators-constrained | oscillators-uncertain")
        ->required()
        ->check(CLI::IsMember({"robots", "oscillators-constrained", "oscillators-uncertain"}));
    add_flags(rep, false);

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out")) opts.out = out;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--eps")) opts.eps = eps;
    if (sub->count("--step")) opts.step = step;
    if (sub->count("--horizon")) opts.horizon = horizon;

    const std::string name = sub->get_name();
    CommandResult result = guarded([&]() -> CommandResult {
        if (name == "reproduce") {
            const Scenario s = parse_scenario(scenario);
            RunConfig c = config_path.empty() ? default_config(s) : load_config(config_path);
            return run_reproduce(s, apply_overrides(c, opts), opts);
        }
        const RunConfig c = apply_overrides(load_config(config_path), opts);
        if (name == "spectrum") return run_spectrum(c, opts);
        if (name == "synthesize") return run_synthesize(c, opts);
        if (name == "analyze") return run_analyze(c, opts);
        if (name == "simulate") return run_simulate(c, opts);
        return run_verify(c, opts);
    });

    std::cout << result.report.dump(2) << '\n';
    if (result.exit_code != kExitPass && result.report.contains("message")) {
        std::cerr << "error: " << result.report["message"].get<std::string>() << '\n';
    }
    return result.exit_code;
}
