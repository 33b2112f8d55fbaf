#include "agelab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit { pass = 0, fail = 1, config_error = 2, budget_refused = 3 };

int cmd_list()
{
    for (const auto& s : agelab::experiment_schemas()) {
        std::cout << s.tag << "\n    " << s.summary << '\n';
        for (const auto& k : s.keys)
            std::cout << "    " << k.name << (k.default_value ? " = " + *k.default_value : " (required)") << "    "
                      << k.help << '\n';
    }
    return pass;
}

agelab::Config load(const std::string& path, const std::vector<std::string>& overrides)
{
    auto c = agelab::Config::load(path);
    for (const auto& o : overrides) c.apply_override(o);
    return c;
}

int cmd_validate(const std::string& path, const std::vector<std::string>& overrides)
{
    const auto rep = agelab::validate(load(path, overrides));
    if (rep.ok()) {
        std::cout << path << ": valid (" << rep.experiment << ")\n";
        return pass;
    }
    for (const auto& v : rep.violations) std::cout << path << ": " << v << '\n';
    return config_error;
}

int cmd_run(const std::string& path, const std::vector<std::string>& overrides, int workers, const std::string& out)
{
    agelab::RunOptions opt;
    opt.workers = workers;
    opt.out = out;
    const auto r = agelab::run_experiment(load(path, overrides), opt);
    std::cout << r.summary;
    for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
    return r.pass ? pass : fail;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"agelab: trap-model and spin-glass aging experiments"};
    app.set_version_flag("--version", agelab::agelab_version());
    app.require_subcommand(1);

    std::string config;
    std::vector<std::string> overrides;
    int workers = 0;
    std::string out;

    auto* run = app.add_subcommand("run", "run an experiment");
    run->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "override key=value (repeatable)");
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "output directory");

    auto* val = app.add_subcommand("validate", "check a config without running");
    val->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
    val->add_option("--set", overrides, "override key=value (repeatable)");

    app.add_subcommand("list-experiments", "print every experiment and its keys");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? pass : config_error;
    }

    try {
        if (app.got_subcommand("list-experiments")) return cmd_list();
        if (app.got_subcommand("validate")) return cmd_validate(config, overrides);
        return cmd_run(config, overrides, workers, out);
    } catch (const agelab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const agelab::BudgetRefused& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return budget_refused;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fail;
    }
}
