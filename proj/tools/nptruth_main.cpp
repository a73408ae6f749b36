#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nptruth/cli.hpp"
#include "nptruth/errors.hpp"
#include "nptruth/io.hpp"
#include "nptruth/version.hpp"

namespace {

nptruth::io::Json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw nptruth::domain_error("cannot open config file: " + path);
    nptruth::io::Json j;
    try {
        j = nptruth::io::Json::parse(in);
    } catch (const std::exception& e) {
        throw nptruth::domain_error("config parse error: " + std::string(e.what()));
    }
    if (!j.is_object())
        throw nptruth::domain_error("config root must be a JSON object");
    return j;
}

struct CommonFlags {
    std::string config_path;
    std::int64_t seed = -1;
    std::string out;
    int jobs = 1;
};

void attach(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "scenario JSON file")
        ->required();
    sub->add_option("--seed", flags.seed, "RNG seed (overrides config)");
    sub->add_option("--out", flags.out, "output directory (overrides config)");
    sub->add_option("--jobs", flags.jobs, "worker threads for multi-run commands");
}

int run(const std::string& name, const CommonFlags& flags) {
    nptruth::io::Json config = load_config(flags.config_path);
    nptruth::cli::RunContext ctx;
    if (flags.seed >= 0)
        ctx.seed = static_cast<std::uint64_t>(flags.seed);
    else if (config.contains("seed"))
        ctx.seed = config.at("seed").get<std::uint64_t>();
    if (!flags.out.empty())
        ctx.out_dir = flags.out;
    else if (config.contains("out"))
        ctx.out_dir = config.at("out").get<std::string>();
    else
        ctx.out_dir = ".";
    ctx.jobs = flags.jobs;
    const nptruth::io::Json results = nptruth::cli::run_command(name, config, ctx);
    std::cout << results.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decision-theoretic testing toolkit"};
    app.set_version_flag("--version", std::string(nptruth::version));
    app.require_subcommand(1);

    const char* names[] = {"roc",  "tea",          "replicate",   "sequential",
                           "bias", "optimize-los", "sample-size", "profile",
                           "table1"};
    const char* blurbs[] = {
        "evaluate a power curve on an interior grid",
        "tasting designs: decide, realized level, evidence profiles",
        "simulate a replication field of independent two-sample studies",
        "sequential knowledge updating until a belief threshold",
        "sequential updating under a publication filter",
        "optimal level of significance under a cost matrix",
        "smallest balanced design reaching a target log-odds swing",
        "evidence profiles and contour grids over effect size",
        "optimal levels across a reference grid of settings"};

    CommonFlags flags[sizeof(names) / sizeof(names[0])];
    for (std::size_t i = 0; i < sizeof(names) / sizeof(names[0]); ++i)
        attach(app.add_subcommand(names[i], blurbs[i]), flags[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (std::size_t i = 0; i < sizeof(names) / sizeof(names[0]); ++i)
            if (app.get_subcommand(names[i])->parsed()) return run(names[i], flags[i]);
        std::cerr << "error: no subcommand given\n";
        return 2;
    } catch (const nptruth::solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const nptruth::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
