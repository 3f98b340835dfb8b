#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Wilson loops of planar Yang-Mills: Monte Carlo, master field and loop-equation checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ymcli::kVersion);

    ymcli::RunConfig cfg;
    auto common = [&cfg](CLI::App* sub, bool graph = true) {
        if (graph) {
            sub->add_option("--graph", cfg.graph, "graph file (JSON)")->required();
            sub->add_option("--loop", cfg.loops, "loop name; repeat for several");
            sub->add_option("--areas", cfg.areas, "area override F=value; repeatable")->delimiter(',');
        }
        sub->add_option("--group-size,-N", cfg.group_size, "N of U(N)");
        sub->add_option("--samples", cfg.samples, "Monte Carlo samples");
        sub->add_option("--seed", cfg.seed, "random seed");
        sub->add_option("--shards", cfg.shards, "sampling shards (threads)");
        sub->add_option("--rw-steps", cfg.rw_steps, "heat-kernel walk steps per face (0: default)");
        sub->add_option("--fd-step", cfg.fd_step, "finite-difference area step (0: default)");
        sub->add_option("--format", cfg.format, "json, or csv for sweep");
    };

    common(app.add_subcommand("validate", "build the map and run the invariant suite"));
    common(app.add_subcommand("expect", "Monte Carlo Wilson loop expectation"));
    auto* master = app.add_subcommand("master", "large-N master field value");
    common(master);
    master->add_flag("--cross-check", cfg.cross_check, "compare with a large-N Monte Carlo oracle");
    master->add_option("--oracle-size", cfg.oracle_size, "N of the oracle");
    common(app.add_subcommand("mm-check", "loop-equation residual at every crossing"));
    common(app.add_subcommand("gauge-check", "gauge and extended gauge invariance"));
    auto* local = app.add_subcommand("local-mm", "U(1) local identity by quadrature");
    common(local, false);
    local->add_option("--grid", cfg.grid, "quadrature points per angle");
    auto* sweep = app.add_subcommand("sweep", "grid of area vectors");
    common(sweep);
    sweep->add_option("--vary", cfg.sweep, "F=lo:hi:count; repeat for a product grid")->required();
    sweep->add_option("--method", cfg.method, "master, mc or both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        auto rep = ymcli::dispatch(cfg);
        if (!rep.text.empty()) std::cout << rep.text;
        else std::cout << rep.json.dump(2) << "\n";
        if (rep.exit_code != 0) std::cerr << "ymloop: " << cfg.command << ": check failed\n";
        return rep.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "ymloop: " << e.what() << "\n";
        return ymcli::exit_code_for(e);
    }
}
