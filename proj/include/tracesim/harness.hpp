#pragma once

#include "tracesim/epidemic.hpp"
#include "tracesim/experiment.hpp"
#include "tracesim/metrics.hpp"
#include "tracesim/netgen.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tracesim {

/// Seed of network `index` of the population identified by `network_key`.
std::uint64_t network_seed(std::uint64_t base_seed, const std::string& network_key, std::size_t index);
/// Seed of replica `replica` run on a network generated from `net_seed`.
std::uint64_t replica_seed(std::uint64_t net_seed, std::size_t replica);

ContactNetwork generate_cell_network(const Cell& cell, std::uint64_t seed, double tail_mass);

/// Everything the aggregate CSV needs from a single run.
struct RunSummary {
    std::size_t network_index = 0;
    std::size_t replica_index = 0;
    double final_fraction = 0.0;
    double top_community_fraction = 0.0;
    int days_to_end = 0;
    std::optional<double> daily_correlation;
    int max_threat_actual = 1;
    int max_threat_confirmed = 1;
    int max_threat_posrate = 1;
    std::optional<int> max_threat_rt_only;
    /// Capped NB-MLE over the first `first_m` infected nodes; absent when the
    /// run infected fewer nodes than that.
    std::optional<double> k_hat;
};

RunSummary summarize_run(const Trajectory& traj, const ComponentIndex& components, const Cell& cell,
                         std::size_t first_m, std::size_t top_communities);

struct CellAggregate {
    Cell cell;
    double mean_final_infection_fraction = 0.0;
    double mean_top5_community_fraction = 0.0;
    double mean_days_to_end = 0.0;
    /// NaN when no run had a defined correlation.
    double mean_daily_correlation = 0.0;
    std::size_t correlation_excluded = 0;
    double max_threat_actual = 0.0;
    double max_threat_confirmed = 0.0;
    double max_threat_posrate = 0.0;
    double max_threat_rt_only = 0.0;
    double k_hat_mean = 0.0;
    std::size_t replicas = 0;
};

CellAggregate aggregate_runs(const Cell& cell, const std::vector<RunSummary>& runs);

/// Options that apply to every cell of a sweep.
struct ReplicationPlan {
    std::size_t networks_per_cell = 15;
    std::size_t replicas_per_network = 30;
    std::uint64_t base_seed = 1;
    std::size_t parallel = 1;
    double tail_mass = default_tail_mass;
    std::size_t first_m = 100;
    std::size_t top_communities = 5;

    static ReplicationPlan from_spec(const ExperimentSpec& spec);
};

/// Called once per finished run (from worker threads, serialised by the
/// harness) when trajectory output is wanted.
using TrajectorySink = std::function<void(const Cell&, std::size_t network_index, std::size_t replica_index,
                                          const Trajectory&)>;

/// Runs every replica of every cell; cells sharing a network key share the
/// generated networks. Results come back in the order of `cells`, each with
/// networks_per_cell * replicas_per_network summaries ordered by (network,
/// replica).
std::vector<std::vector<RunSummary>> run_cells(const std::vector<Cell>& cells, const ReplicationPlan& plan,
                                               const TrajectorySink& sink = {});

/// Same as run_cells but hands every finished trajectory to `visit` instead
/// of summarising it. Used where per-run detail (secondary counts, daily
/// series) matters.
void for_each_run(const std::vector<Cell>& cells, const ReplicationPlan& plan,
                  const std::function<void(std::size_t cell_index, std::size_t network_index,
                                           std::size_t replica_index, const Trajectory&,
                                           const ContactNetwork&, const ComponentIndex&)>& visit);

struct CellFailure {
    Cell cell;
    std::string message;
};

struct ExperimentResult {
    std::vector<CellAggregate> aggregates;
    std::vector<CellFailure> failures;
    std::filesystem::path aggregate_csv;
};

/// Full sweep: validates the spec, runs all cells, writes aggregate.csv (and
/// failures.csv / trajectories/ when relevant) under spec.output_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_aggregate_csv(const std::vector<CellAggregate>& rows, std::ostream& out);

/// Per-day CSV: day,S,E,I,R,H,new_infections,tests_used,positives_found,
/// positive_rate,quarantined_cumulative,threat_level_actual
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
/// order,node,time,infector,secondary_infections (infector -1 for seeds)
void write_infections_csv(const Trajectory& traj, std::ostream& out);
/// Secondary counts in infection order from an infections CSV.
std::vector<std::size_t> read_secondary_counts(std::istream& in);
/// Accepts an infections CSV or a trajectory CSV with its
/// `<stem>.infections.csv` sibling.
std::vector<std::size_t> read_secondary_counts(const std::filesystem::path& path);
std::filesystem::path infections_path_for(const std::filesystem::path& trajectory_path);

} // namespace tracesim
