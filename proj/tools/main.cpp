// decowork command-line front end

#include "decowork/commands.hpp"
#include "decowork/errors.hpp"
#include "decowork/experiment.hpp"
#include "decowork/io.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit : int { ok = 0, other = 1, config = 2, numerical = 3 };

int self_test() {
    bool all = true;
    for (const auto& line : decowork::run_self_test()) {
        std::cout << (line.pass ? "PASS " : "FAIL ") << line.name << " (" << line.detail << ")\n";
        all = all && line.pass;
    }
    return all ? ok : numerical;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoherence-rate and adiabatic-work experiments for a system coupled to a bath"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", decowork::tool_version());
    bool run_self_test = false;
    app.add_flag("--self-test", run_self_test, "Replay built-in synthetic series through the estimators");

    std::string config_path;
    decowork::RunOptions options;
    std::uint64_t seed = 0;
    std::string out;

    using Command = std::string (*)(const decowork::ExperimentConfig&, const decowork::RunOptions&);
    struct Sub {
        const char* name;
        const char* help;
        Command run;
    };
    const Sub subs[] = {
        {"decay", "Coherence decay at fixed coupling; fitted and predicted rates", decowork::command_decay},
        {"scaling", "Sweep the coupling and regress both rates against it", decowork::command_scaling},
        {"border", "Perturbative border for every level pair", decowork::command_border},
        {"work", "Ramp the coupling; mixture work, two-point work and Jarzynski check", decowork::command_work},
        {"trend", "Late-time coherence against the populated window size", decowork::command_trend},
        {"full-suite", "Run every experiment the config supports", decowork::command_full_suite},
    };
    std::vector<std::pair<CLI::App*, Command>> registered;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Run seed (overrides the config)");
        sub->add_option("--workers", options.workers, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "Output directory (overrides the config)");
        registered.emplace_back(sub, s.run);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config;
    }

    if (run_self_test) return self_test();

    for (const auto& [sub, run] : registered) {
        if (!sub->parsed()) continue;
        if (sub->count("--seed")) options.seed = seed;
        if (sub->count("--out")) options.out = out;
        try {
            const auto cfg = decowork::load_config(config_path);
            const std::string dir = run(cfg, options);
            std::cout << "wrote " << dir << "\n";
            return ok;
        } catch (const decowork::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return config;
        } catch (const decowork::NumericalError& e) {
            std::cerr << "numerical error: " << e.what() << "\n";
            return numerical;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return other;
        }
    }
    std::cerr << app.help();
    return config;
}
