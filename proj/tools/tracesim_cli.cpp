#include "tracesim/tracesim.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

int report(ts_status status)
{
    std::cerr << "error: " << ts_last_error() << '\n';
    return status == TS_ERR_CELLS_FAILED ? 3 : 2;
}

struct SimulateArgs {
    std::string profile = "paper";
    std::string config;
    std::string preset;
    std::string strategy;
    std::string daily_tests;
    std::string n;
    std::string seed;
    std::string parallel;
    std::string out;
    bool emit_trajectories = false;
    bool mixed = false;
    bool dump_config = false;
    std::vector<std::string> overrides;
};

int run_simulate(const SimulateArgs& args)
{
    ts_experiment* exp = nullptr;
    if (auto s = ts_experiment_create(args.profile.c_str(), &exp); s != TS_OK)
        return report(s);
    struct Guard {
        ts_experiment* e;
        ~Guard() { ts_experiment_free(e); }
    } guard{exp};

    if (!args.config.empty())
        if (auto s = ts_experiment_load_config(exp, args.config.c_str()); s != TS_OK)
            return report(s);
    if (!args.preset.empty())
        if (auto s = ts_experiment_apply_preset(exp, args.preset.c_str()); s != TS_OK)
            return report(s);

    std::vector<std::pair<std::string, std::string>> settings;
    if (!args.strategy.empty())
        settings.emplace_back("strategy", args.strategy);
    if (!args.daily_tests.empty())
        settings.emplace_back("daily_tests", args.daily_tests);
    if (!args.n.empty())
        settings.emplace_back("N", args.n);
    if (!args.seed.empty())
        settings.emplace_back("base_seed", args.seed);
    if (!args.parallel.empty())
        settings.emplace_back("parallel", args.parallel);
    if (!args.out.empty())
        settings.emplace_back("output_dir", args.out);
    if (args.emit_trajectories)
        settings.emplace_back("emit_trajectories", "true");
    if (args.mixed)
        settings.emplace_back("mixed", "true");
    for (const auto& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
            return 2;
        }
        settings.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : settings)
        if (auto s = ts_experiment_set(exp, key.c_str(), value.c_str()); s != TS_OK)
            return report(s);

    if (args.dump_config) {
        std::size_t needed = 0;
        ts_experiment_dump(exp, nullptr, 0, &needed);
        std::string text(needed, '\0');
        if (auto s = ts_experiment_dump(exp, text.data(), text.size(), &needed); s != TS_OK)
            return report(s);
        std::cout << text.c_str();
        return 0;
    }

    std::size_t ok = 0, failed = 0;
    const auto status = ts_experiment_run(exp, &ok, &failed);
    if (status != TS_OK && status != TS_ERR_CELLS_FAILED)
        return report(status);
    std::cout << ok << " cell(s) completed, " << failed << " failed\n";
    return status == TS_OK ? 0 : report(status);
}

struct GenArgs {
    std::string kind = "superspreading";
    double k = 0.1;
    double r0 = 2.5;
    double beta = 0.6;
    double gamma = 0.05;
    std::uint64_t n = 10000;
    std::uint64_t seed = 1;
    std::string out;
};

int run_gen_network(const GenArgs& args)
{
    ts_network* net = nullptr;
    if (auto s = ts_network_generate(args.kind.c_str(), args.k, args.r0, args.beta, args.gamma, args.n, args.seed,
                                     &net);
        s != TS_OK)
        return report(s);
    const auto status = ts_network_write(net, args.out.c_str());
    const auto nodes = ts_network_node_count(net);
    const auto edges = ts_network_edge_count(net);
    ts_network_free(net);
    if (status != TS_OK)
        return report(status);
    std::cout << "wrote " << nodes << " nodes, " << edges << " edges to " << args.out << '\n';
    return 0;
}

int run_estimate_k(const std::string& path, std::uint64_t first_m)
{
    double k = 0.0, mean = 0.0;
    std::uint64_t n = 0;
    if (auto s = ts_estimate_k_from_file(path.c_str(), first_m, &k, &mean, &n); s != TS_OK)
        return report(s);
    std::cout << "k_hat=" << (std::isinf(k) ? std::string("inf") : std::to_string(k)) << " mean=" << mean
              << " n=" << n << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic epidemic and contact-tracing simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ts_version()));

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a parameter sweep");
    simulate->add_option("--config", sim.config, "key=value config file")->check(CLI::ExistingFile);
    simulate->add_option("--profile", sim.profile, "Base defaults")
        ->check(CLI::IsMember({"paper", "desk"}))
        ->capture_default_str();
    simulate->add_option("--preset", sim.preset, "Disease preset (covid19, sars, h1n1, ebola, measles)");
    simulate->add_option("--strategy", sim.strategy, "none|rt|fct|bct|cto|got (comma-separated list allowed)");
    simulate->add_option("--daily-tests", sim.daily_tests, "Daily test budget(s)");
    simulate->add_flag("--mixed", sim.mixed, "Reserve part of the budget for random testing");
    simulate->add_option("--n", sim.n, "Population size(s)");
    simulate->add_option("--seed", sim.seed, "Base seed");
    simulate->add_option("--parallel", sim.parallel, "Worker threads");
    simulate->add_flag("--emit-trajectories", sim.emit_trajectories, "Write per-run trajectory CSVs");
    simulate->add_option("--out", sim.out, "Output directory");
    simulate->add_option("--set", sim.overrides, "Override any config key (key=value, repeatable)");
    simulate->add_flag("--dump-config", sim.dump_config, "Print the effective config and exit");

    GenArgs gen;
    auto* gen_network = app.add_subcommand("gen-network", "Generate a contact network edge list");
    gen_network->add_option("--kind", gen.kind, "superspreading|erdos_renyi|gamma_infectiousness")
        ->capture_default_str();
    gen_network->add_option("--k", gen.k, "Dispersion")->capture_default_str();
    gen_network->add_option("--r0", gen.r0, "Basic reproduction number")->capture_default_str();
    gen_network->add_option("--beta", gen.beta, "Infection rate")->capture_default_str();
    gen_network->add_option("--gamma", gen.gamma, "Recovery rate")->capture_default_str();
    gen_network->add_option("--n", gen.n, "Node count")->capture_default_str();
    gen_network->add_option("--seed", gen.seed, "Seed")->capture_default_str();
    gen_network->add_option("--out", gen.out, "Output edge-list path")->required();

    std::string trajectory;
    std::uint64_t first_m = 100;
    auto* estimate = app.add_subcommand("estimate-k", "Estimate the dispersion from a run's infections");
    estimate->add_option("--trajectory", trajectory, "Trajectory or infections CSV")
        ->required()
        ->check(CLI::ExistingFile);
    estimate->add_option("--first-m", first_m, "Number of earliest infected nodes")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*simulate)
        return run_simulate(sim);
    if (*gen_network)
        return run_gen_network(gen);
    return run_estimate_k(trajectory, first_m);
}
