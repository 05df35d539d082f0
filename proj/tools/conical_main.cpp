#include <CLI11.hpp>

#include <cstdio>

#include "conical/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical dynamics through conical potential singularities"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 0;
    long long seed = -1;

    for (const char* name :
         {"trajectory", "evolve", "wigner", "egorov-check", "two-microlocal"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--threads", threads, "worker threads (overrides config)");
        sub->add_option("--seed", seed, "random seed (overrides config)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        conical::RunConfig cfg = conical::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (threads > 0) cfg.threads = threads;
        if (seed >= 0) cfg.seed = std::uint64_t(seed);
        return conical::run_subcommand(cfg, sub);
    } catch (const conical::ConfigError& e) {
        std::fprintf(stderr, "config error:\n");
        for (const auto& v : e.violations) std::fprintf(stderr, "  %s\n", v.c_str());
        return conical::kConfigError;
    } catch (const conical::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return conical::kNumericalError;
    }
}
