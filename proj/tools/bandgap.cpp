// bandgap <subcommand> --config <path> [--out <dir>] [--threads N]
//
// Exit codes: 0 ok, 1 I/O or unexpected failure, 2 config error, 3 numeric failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bandgap/bandgap.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bandgap::ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet bands and spectral gaps of periodic manifolds"};
    app.set_version_flag("--version", std::string("bandgap ") + bandgap::tool_version);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    for (const auto& [experiment, name] : bandgap::experiment_names) {
        auto* sub = app.add_subcommand(std::string(name), "run the " + std::string(name) + " experiment");
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (default: config output.path or .)");
        sub->add_option("--threads", threads, "worker threads for theta sweeps (0 = all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto* chosen = app.get_subcommands().front();
    const auto experiment = bandgap::parse_experiment(chosen->get_name());
    try {
        const auto config = bandgap::parse_config(slurp(config_path), experiment);
        bandgap::RunOptions options;
        options.out_dir = !out_dir.empty() ? out_dir : config.path.value_or(".");
        options.threads = threads;
        const auto result = bandgap::run(config, options);
        for (const auto& f : result.files) std::cout << f.string() << '\n';
        return 0;
    } catch (const bandgap::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const bandgap::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const bandgap::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
