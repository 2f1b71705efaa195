#include "tracesim/error.hpp"
#include "tracesim/experiment.hpp"
#include "tracesim/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

using namespace tracesim;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("tracesim_harness_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentSpec small_spec(const std::string& dir)
{
    auto spec = ExperimentSpec::desk_profile();
    spec.N = {1000};
    spec.networks_per_cell = 2;
    spec.replicas_per_network = 2;
    spec.output_dir = dir;
    return spec;
}

} // namespace

TEST_CASE("disease presets")
{
    const auto covid = load_preset("covid19");
    CHECK(covid.model == Model::SEIR);
    CHECK(covid.R0 == 2.5);
    CHECK(covid.beta == 1.0);
    CHECK(covid.gamma == 0.4);
    CHECK(covid.kappa == 0.2);
    CHECK(covid.p_H == 0.008372);
    CHECK(covid.k == 0.1);

    const auto measles = load_preset("measles");
    CHECK(measles.model == Model::SIR);
    CHECK(measles.R0 == 18.0);
    CHECK(measles.beta == 4.932);
    CHECK(measles.k == 0.32);

    CHECK(load_preset("h1n1").k == 8.092);
    CHECK(load_preset("ebola").p_H == 0.0);
    CHECK(load_preset("sars").gamma == 0.125);
    CHECK(preset_names().size() == 5);
    CHECK_THROWS_AS(load_preset("influenza"), ParameterError);
}

TEST_CASE("applying a preset sets the disease fields")
{
    ExperimentSpec spec;
    spec.apply_preset(load_preset("sars"));
    CHECK(spec.model == std::vector<Model>{Model::SEIR});
    CHECK(spec.R0 == std::vector<double>{1.2});
    CHECK(spec.k == std::vector<double>{0.16});
    CHECK(spec.p_H == std::vector<double>{0.333});
}

TEST_CASE("config dump round trip")
{
    auto spec = ExperimentSpec::desk_profile();
    spec.set("R0", "1,2.5,3.5");
    spec.set("k", "0.1,0.30000000000000004");
    spec.set("strategy", "none,rt,got");
    spec.set("base_seed", "18446744073709551615");
    spec.set("tail_mass", "1e-12");
    spec.set("output_dir", "out dir");
    std::istringstream in(spec.dump());
    CHECK(ExperimentSpec::parse(in) == spec);

    std::istringstream again(spec.dump());
    CHECK(ExperimentSpec::parse(again).dump() == spec.dump());
}

TEST_CASE("every listed key is settable and rejects junk")
{
    const auto dumped = ExperimentSpec::desk_profile().dump();
    for (auto key : ExperimentSpec::keys()) {
        CHECK(dumped.find(std::string(key) + "=") != std::string::npos);
    }
    ExperimentSpec spec;
    CHECK_THROWS_AS(spec.set("no_such_key", "1"), ParameterError);
    CHECK_THROWS(spec.set("N", "ten"));
    CHECK_THROWS(spec.set("strategy", "quarantine_everyone"));
}

TEST_CASE("config overlay keeps base values")
{
    auto base = ExperimentSpec::desk_profile();
    base.replicas_per_network = 9;
    std::istringstream in("# comment\nR0 = 3.5\n\nk=0.5,1\n");
    const auto spec = ExperimentSpec::parse(in, base);
    CHECK(spec.replicas_per_network == 9);
    CHECK(spec.R0 == std::vector<double>{3.5});
    CHECK(spec.k == std::vector<double>{0.5, 1.0});
}

TEST_CASE("cells form the cartesian product")
{
    ExperimentSpec spec;
    spec.R0 = {1, 2.5, 3.5};
    spec.k = {0.1, 0.5};
    spec.strategy = {Strategy::none, Strategy::fct, Strategy::got};
    spec.daily_tests = {10, 100};
    CHECK(spec.cells().size() == 3 * 2 * 3 * 2);

    const auto cells = spec.cells();
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j)
            CHECK(cells[i].key() != cells[j].key());
}

TEST_CASE("network key ignores epidemic and intervention settings")
{
    Cell a, b;
    b.strategy = Strategy::cto;
    b.daily_tests = 500;
    b.p_H = 0.2;
    CHECK(a.network_key() == b.network_key());
    CHECK(a.key() != b.key());
    b.k = 0.5;
    CHECK(a.network_key() != b.network_key());
}

TEST_CASE("one cell, one run writes one trajectory and one row")
{
    const auto dir = scratch_dir("single");
    auto spec = small_spec(dir.string());
    spec.networks_per_cell = 1;
    spec.replicas_per_network = 1;
    spec.emit_trajectories = true;
    const auto result = run_experiment(spec);
    REQUIRE(result.aggregates.size() == 1);
    CHECK(result.aggregates[0].replicas == 1);
    CHECK(result.failures.empty());
    CHECK_FALSE(fs::exists(dir / "failures.csv"));

    std::size_t trajectories = 0, infections = 0;
    for (const auto& entry : fs::directory_iterator(dir / "trajectories")) {
        const auto name = entry.path().filename().string();
        if (name.ends_with(".infections.csv"))
            ++infections;
        else if (name != "index.csv")
            ++trajectories;
    }
    CHECK(trajectories == 1);
    CHECK(infections == 1);

    std::ifstream agg(dir / "aggregate.csv");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(agg, line))
        ++lines;
    CHECK(lines == 2);
    fs::remove_all(dir);
}

TEST_CASE("outputs are byte-identical across runs and thread counts")
{
    const auto d1 = scratch_dir("det1");
    const auto d2 = scratch_dir("det2");
    auto spec = small_spec(d1.string());
    spec.strategy = {Strategy::none, Strategy::fct};
    spec.daily_tests = {20};
    spec.emit_trajectories = true;
    run_experiment(spec);
    spec.output_dir = d2.string();
    spec.parallel = 3;
    run_experiment(spec);

    CHECK(slurp(d1 / "aggregate.csv") == slurp(d2 / "aggregate.csv"));
    CHECK(slurp(d1 / "trajectories" / "index.csv") == slurp(d2 / "trajectories" / "index.csv"));
    for (const auto& entry : fs::directory_iterator(d1 / "trajectories"))
        CHECK(slurp(entry.path()) == slurp(d2 / "trajectories" / entry.path().filename()));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("default plan gives 450 runs per cell")
{
    Cell c;
    c.N = 200;
    c.I0 = 2;
    ReplicationPlan plan;
    plan.parallel = 4;
    const auto runs = run_cells({c}, plan);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].size() == 450);
    CHECK(aggregate_runs(c, runs[0]).replicas == 450);
    for (std::size_t i = 0; i < runs[0].size(); ++i) {
        CHECK(runs[0][i].network_index == i / 30);
        CHECK(runs[0][i].replica_index == i % 30);
    }
}

TEST_CASE("aggregates are the means of the per-run trajectories")
{
    Cell c;
    c.N = 2000;
    c.strategy = Strategy::cto;
    c.daily_tests = 20;
    ReplicationPlan plan;
    plan.networks_per_cell = 2;
    plan.replicas_per_network = 3;

    std::vector<double> finals, days;
    const auto runs = run_cells({c}, plan, [&](const Cell&, std::size_t, std::size_t, const Trajectory& traj) {
        finals.push_back(static_cast<double>(traj.final_infected_total) / static_cast<double>(traj.node_count));
        days.push_back(traj.days_to_end);
    });
    REQUIRE(finals.size() == 6);
    const auto agg = aggregate_runs(c, runs[0]);
    CHECK(agg.mean_final_infection_fraction ==
          doctest::Approx(std::accumulate(finals.begin(), finals.end(), 0.0) / 6));
    CHECK(agg.mean_days_to_end == doctest::Approx(std::accumulate(days.begin(), days.end(), 0.0) / 6));
}

TEST_CASE("adding replicas or grid values leaves existing runs unchanged")
{
    Cell c;
    c.N = 1000;
    ReplicationPlan small;
    small.networks_per_cell = 2;
    small.replicas_per_network = 2;
    ReplicationPlan big = small;
    big.networks_per_cell = 3;
    big.replicas_per_network = 4;

    Cell other = c;
    other.R0 = 3.5;
    const auto a = run_cells({c}, small)[0];
    const auto b = run_cells({other, c}, big)[1];
    for (const auto& run : a) {
        const auto& match = b[run.network_index * 4 + run.replica_index];
        CHECK(match.final_fraction == run.final_fraction);
        CHECK(match.days_to_end == run.days_to_end);
    }
}

TEST_CASE("seed derivation")
{
    CHECK(network_seed(1, "a", 0) != network_seed(1, "a", 1));
    CHECK(network_seed(1, "a", 0) != network_seed(1, "b", 0));
    CHECK(network_seed(1, "a", 0) != network_seed(2, "a", 0));
    CHECK(network_seed(7, "x", 3) == network_seed(7, "x", 3));
    CHECK(replica_seed(5, 0) != replica_seed(5, 1));
}

TEST_CASE("failing cells are recorded while others complete")
{
    const auto dir = scratch_dir("failures");
    auto spec = small_spec(dir.string());
    spec.N = {20};
    spec.I0 = {2};
    spec.network_kind = {NetworkKind::erdos_renyi};
    spec.R0 = {1.0, 30.0};
    const auto result = run_experiment(spec);
    CHECK(result.aggregates.size() == 1);
    CHECK(result.failures.size() == 1);
    CHECK(fs::exists(dir / "failures.csv"));
    CHECK(slurp(dir / "failures.csv").starts_with("cell,error\n"));
    fs::remove_all(dir);
}

TEST_CASE("secondary counts read back from a trajectory path")
{
    const auto dir = scratch_dir("secondary");
    auto spec = small_spec(dir.string());
    spec.networks_per_cell = 1;
    spec.replicas_per_network = 1;
    spec.emit_trajectories = true;
    run_experiment(spec);

    fs::path trajectory;
    for (const auto& entry : fs::directory_iterator(dir / "trajectories")) {
        const auto name = entry.path().filename().string();
        if (!name.ends_with(".infections.csv") && name != "index.csv")
            trajectory = entry.path();
    }
    REQUIRE_FALSE(trajectory.empty());
    const auto from_traj = read_secondary_counts(trajectory);
    const auto from_inf = read_secondary_counts(infections_path_for(trajectory));
    CHECK(from_traj == from_inf);
    CHECK(from_traj.size() >= 10);
    // Every non-seed infection has exactly one infector.
    CHECK(std::accumulate(from_traj.begin(), from_traj.end(), std::size_t{0}) == from_traj.size() - 10);

    std::istringstream bad("day,S\n");
    CHECK_THROWS_AS(read_secondary_counts(bad), FormatError);
    CHECK_THROWS_AS(read_secondary_counts(dir / "missing.csv"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("aggregate CSV header")
{
    std::ostringstream out;
    write_aggregate_csv({}, out);
    CHECK(out.str() ==
          "model,network_kind,N,I0,beta,gamma,kappa,R0,k,p_H,P_c,P_q,strategy,mixed,daily_tests,"
          "mean_final_infection_fraction,mean_top5_community_fraction,mean_days_to_end,"
          "mean_daily_correlation,max_threat_actual,max_threat_confirmed,max_threat_posrate,"
          "max_threat_rt_only,k_hat_mean,replicas\n");
}
