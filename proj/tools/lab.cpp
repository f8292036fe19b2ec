#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "mslab/errors.hpp"
#include "mslab/experiments.hpp"
#include "mslab/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for mean-shift dynamics and the "
                 "anti-diffusion density equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = -1;
    bool deterministic = false;

    CLI::App* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--out", out_dir, "override the config's output directory");
    run->add_option("--threads", threads, "cap worker threads (0 = hardware)");
    run->add_flag("--deterministic", deterministic,
                  "force ordered reductions (on by construction; recorded in the manifest)");

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("config", config_path, "JSON config file")->required();

    app.add_subcommand("list-experiments", "print the known experiment names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-experiments")) {
            for (const std::string& name : mslab::list_experiments())
                std::cout << name << '\n';
            return 0;
        }
        if (app.got_subcommand("validate")) {
            const mslab::ExperimentConfig config = mslab::load_config(config_path);
            std::cout << "valid: " << config.experiment << '\n';
            return 0;
        }
        mslab::ExperimentConfig config = mslab::load_config(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (threads >= 0) mslab::set_worker_count(static_cast<std::size_t>(threads));
        if (deterministic) config.deterministic = true;
        const mslab::RunManifest manifest = mslab::run_experiment(config);
        std::cout << config.out_dir << "/manifest.json: " << manifest.artifacts.size()
                  << " artifacts, " << manifest.duration_seconds << " s\n";
        return 0;
    } catch (const mslab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const mslab::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
