#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ringqed_cli/commands.hpp"
#include "ringqed_cli/config.hpp"

using namespace ringqed::cli;

int main(int argc, char** argv) {
    CLI::App app{"Ring-cavity atom-array model: spectra, dark-mode metrics and figure data"};
    app.require_subcommand(1, 1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "Config file (key = value with [sections])")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Root random seed");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--set", overrides, "Override, e.g. --set cavity.kappa=34khz");

    std::string figure;
    for (const auto& name : subcommand_names()) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();  // global flags may follow the subcommand
        if (name == "reproduce") sub->add_option("figure", figure, "Figure to regenerate")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path, std::ios::binary);
            std::stringstream text;
            text << f.rdbuf();
            cfg = parse_config(text.str());
        }
        for (const auto& o : overrides) apply_override(cfg, o);
        if (!out_dir.empty()) cfg.out = out_dir;
        if (*seed_opt) cfg.seed = seed;
        if (*threads_opt) cfg.threads = threads;
        cfg.validate();
    } catch (const ringqed::ValidationError& e) {
        std::cerr << "error: " << (config_path.empty() ? "" : config_path + ": ") << e.what() << '\n';
        return exit_validation;
    }

    const auto* sub = app.get_subcommands().front();
    std::vector<std::string> args;
    if (sub->get_name() == "reproduce") args.push_back(figure);
    return run_subcommand(sub->get_name(), args, cfg, std::cout, std::cerr);
}
