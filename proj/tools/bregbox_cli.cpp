#include "bregbox/runner.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"bregbox: iterative Bregman regularization for box-constrained "
                 "linear-quadratic problems"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    std::string suite = "all";
    std::uint64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "execute the run described by a config file");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_override, "override the output directory");

    CLI::App* sweep = app.add_subcommand("sweep", "one run per schedule variant in the config");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--out", out_override, "override the output directory");

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite, "adjoint | oracle | rates | invariants | all");
    verify->add_option("--seed", seed, "seed for the randomized checks");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return bregbox::cmd_run(config_path, out_override);
    if (sweep->parsed()) return bregbox::cmd_sweep(config_path, out_override);
    return bregbox::cmd_verify(suite, seed);
}
