#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "vform/experiment.hpp"

namespace {

int env_workers() {
    if (const char* env = std::getenv("VFORM_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
        std::cerr << "warning: ignoring invalid VFORM_WORKERS='" << env << "'\n";
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"V-formation flight planning experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int runs = 0;
    bool runs_given = false;

    const auto add_mode = [&](vform::Mode mode) {
        CLI::App* sub = app.add_subcommand(vform::to_string(mode));
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
            seed_given = true;
        });
        sub->add_option("--runs", runs, "batch size (smc-batch)")
            ->each([&](const std::string&) { runs_given = true; });
        sub->callback([&, mode] {
            vform::ExperimentConfig cfg;
            std::vector<std::string> errors;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) {
                    std::cerr << "cannot open config file: " << config_path << '\n';
                    std::exit(2);
                }
                std::ostringstream text;
                text << in.rdbuf();
                cfg = vform::parse_config(text.str(), errors);
            }
            cfg.mode = mode;
            if (!errors.empty()) {
                for (const std::string& e : errors) std::cerr << "config error: " << e << '\n';
                std::exit(2);
            }

            vform::CliOverrides ov;
            if (seed_given) ov.seed = seed;
            if (runs_given) ov.runs = runs;
            ov.out_dir = out_dir;
            ov.workers = env_workers();
            std::exit(vform::run_experiment(cfg, ov, std::cout));
        });
    };

    for (vform::Mode m : {vform::Mode::Ares, vform::Mode::Dampc, vform::Mode::GameBrg,
                          vform::Mode::GameRdg, vform::Mode::GameAmpc,
                          vform::Mode::SmcBatch})
        add_mode(m);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
