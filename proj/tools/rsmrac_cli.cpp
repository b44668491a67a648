#include <iostream>

#include <CLI11.hpp>

#include "rsmrac/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Robust safe MRAC simulator"};
    app.require_subcommand(1);

    std::string config, out, filters;
    auto* run = app.add_subcommand("run", "simulate one scenario");
    run->add_option("--config", config, "scenario config (JSON)")->required();
    run->add_option("--out", out, "output directory")->required();

    auto* cmp = app.add_subcommand("compare", "run several filters on one scenario");
    cmp->add_option("--config", config, "scenario config (JSON)")->required();
    cmp->add_option("--filters", filters, "comma separated: none,plant_qp,reference_qp,robust_socp")
        ->required();
    cmp->add_option("--out", out, "output directory")->required();

    int count = 100;
    std::uint64_t seed = 1;
    auto* orc = app.add_subcommand("oracle-check", "solver vs grid oracle on random instances");
    orc->add_option("--count", count, "number of instances");
    orc->add_option("--seed", seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : rsm::kExitError;
    }
    if (*run) return rsm::cmd_run(config, out, std::cerr);
    if (*cmp) return rsm::cmd_compare(config, filters, out, std::cerr);
    return rsm::cmd_oracle_check(count, seed, std::cout);
}
