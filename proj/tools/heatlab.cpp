#include <iostream>

#include <CLI11.hpp>

#include "heatlab/tasks.hpp"

int main(int argc, char** argv) {
    CLI::App app{"heatlab: heat-kernel estimates on weighted model manifolds"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the task described by a config file");
    run->add_option("config", config_path, "config file")->required();

    std::string sweep_dir;
    auto* sweep = app.add_subcommand("sweep", "run every *.cfg in a directory and merge the reports");
    sweep->add_option("dir", sweep_dir, "directory of config files")->required();

    std::uint64_t seed = 42;
    auto* verify = app.add_subcommand("verify", "run the invariant suites");
    verify->add_option("--seed", seed, "seed for the randomized suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : heatlab::exit_config;
    }

    if (*run) {
        heatlab::TaskOutcome o = heatlab::run_config_file(config_path);
        if (!o.message.empty()) (o.exit_code == 0 ? std::cout : std::cerr) << o.message << (o.message.back() == '\n' ? "" : "\n");
        if (o.exit_code == 0) std::cout << "wrote " << o.out_dir << '\n';
        return o.exit_code;
    }
    if (*sweep) return heatlab::sweep(sweep_dir, std::cout);

    auto lines = heatlab::run_verify_suites(seed);
    heatlab::print_verify_table(lines, std::cout);
    for (const auto& l : lines)
        if (!l.pass) return heatlab::exit_verify;
    return heatlab::exit_ok;
}
