#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smilansky/harness/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Eigenvalue counting for the two-oscillator Smilansky model"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    int threads = 0;
    bool no_cache = false;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config, "configuration file");
        if (needs_config)
            opt->required();
        sub->add_option("--out", out, "output directory (overrides OUTPUT_DIR and [output] directory)");
        sub->add_option("--threads", threads, "worker threads (0: all processors)")->check(CLI::NonNegativeNumber);
        sub->add_flag("--no-cache", no_cache, "ignore and do not write the report cache");
    };
    add_common(app.add_subcommand("count", "converged eigenvalue count for one parameter point"), true);
    add_common(app.add_subcommand("sweep", "counts along a path of (eta+, eta-) points"), true);
    add_common(app.add_subcommand("oracle", "cross-check a count against the secular-equation crossings"), true);
    add_common(app.add_subcommand("selfcheck", "variational and trace-inequality checks"), false);

    CLI11_PARSE(app, argc, argv);

    smilansky::harness::CommandContext ctx;
    if (!out.empty())
        ctx.out_dir = out;
    if (threads > 0)
        ctx.threads = threads;
    ctx.no_cache = no_cache;

    const auto* sub = app.get_subcommands().front();
    std::optional<std::string> path;
    if (!config.empty())
        path = config;
    try {
        return smilansky::harness::run_command(sub->get_name(), path, ctx);
    } catch (const smilansky::NotConvergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return smilansky::harness::exit_not_converged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return smilansky::harness::exit_inconsistent;
    }
}
