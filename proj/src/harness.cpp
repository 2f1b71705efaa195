#include "tracesim/harness.hpp"

#include "text_util.hpp"
#include "tracesim/error.hpp"
#include "tracesim/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace tracesim {

using detail::format_double;

std::uint64_t network_seed(std::uint64_t base_seed, const std::string& network_key, std::size_t index)
{
    return base_seed ^ splitmix64(hash_string(network_key) ^ splitmix64(index));
}

std::uint64_t replica_seed(std::uint64_t net_seed, std::size_t replica)
{
    return net_seed ^ static_cast<std::uint64_t>(replica);
}

ContactNetwork generate_cell_network(const Cell& cell, std::uint64_t seed, double tail_mass)
{
    switch (cell.network_kind) {
    case NetworkKind::superspreading:
        return generate_superspreading_network(
            derive_degree_distribution(cell.k, cell.R0, cell.beta, cell.gamma, tail_mass), cell.N, seed);
    case NetworkKind::erdos_renyi:
        return generate_er_network(cell.R0, cell.beta, cell.gamma, cell.N, seed);
    case NetworkKind::gamma_infectiousness:
        return generate_gamma_infectiousness_network(cell.k, cell.R0, cell.beta, cell.gamma, cell.N, seed);
    }
    throw ParameterError("unknown network kind");
}

RunSummary summarize_run(const Trajectory& traj, const ComponentIndex& components, const Cell& cell,
                         std::size_t first_m, std::size_t top_communities)
{
    RunSummary s;
    const std::size_t n = traj.node_count;
    s.final_fraction = static_cast<double>(traj.final_infected_total) / static_cast<double>(n);
    s.top_community_fraction = community_infection(components, traj.final_compartments, top_communities);
    s.days_to_end = days_to_end(traj);

    const auto rates = positive_rate_series(traj);
    const auto ratios = infection_ratio_series(traj);
    s.daily_correlation = daily_correlation(rates, ratios);

    s.max_threat_actual = inferred_threat_levels(traj, ThreatBasis::actual, n).max_level();
    s.max_threat_confirmed = inferred_threat_levels(traj, ThreatBasis::confirmed_counts, n).max_level();
    s.max_threat_posrate = inferred_threat_levels(traj, ThreatBasis::positive_rate_all, n).max_level();
    const auto plan = cell.plan();
    if (plan.strategy == Strategy::rt || (plan.mixed_rt_share > 0 && plan.strategy != Strategy::none)) {
        try {
            s.max_threat_rt_only = inferred_threat_levels(traj, ThreatBasis::positive_rate_rt_only, n).max_level();
        } catch (const ParameterError&) {
            // Run ended before the first testing day.
        }
    }

    // Runs that never reach first_m infections have no exponential phase to measure.
    const auto counts = secondary_infection_counts(traj, first_m);
    if (counts.size() >= std::max<std::size_t>(first_m, 2))
        s.k_hat = estimate_dispersion(counts).capped();
    return s;
}

CellAggregate aggregate_runs(const Cell& cell, const std::vector<RunSummary>& runs)
{
    CellAggregate agg;
    agg.cell = cell;
    agg.replicas = runs.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (runs.empty()) {
        agg.mean_final_infection_fraction = agg.mean_top5_community_fraction = agg.mean_days_to_end = nan;
        agg.mean_daily_correlation = agg.max_threat_actual = agg.max_threat_confirmed = nan;
        agg.max_threat_posrate = agg.max_threat_rt_only = agg.k_hat_mean = nan;
        return agg;
    }

    double corr = 0.0, rt = 0.0, khat = 0.0;
    std::size_t n_corr = 0, n_rt = 0, n_khat = 0;
    for (const auto& r : runs) {
        agg.mean_final_infection_fraction += r.final_fraction;
        agg.mean_top5_community_fraction += r.top_community_fraction;
        agg.mean_days_to_end += r.days_to_end;
        agg.max_threat_actual += r.max_threat_actual;
        agg.max_threat_confirmed += r.max_threat_confirmed;
        agg.max_threat_posrate += r.max_threat_posrate;
        if (r.daily_correlation) {
            corr += *r.daily_correlation;
            ++n_corr;
        } else {
            ++agg.correlation_excluded;
        }
        if (r.max_threat_rt_only) {
            rt += *r.max_threat_rt_only;
            ++n_rt;
        }
        if (r.k_hat) {
            khat += *r.k_hat;
            ++n_khat;
        }
    }
    const double n = static_cast<double>(runs.size());
    agg.mean_final_infection_fraction /= n;
    agg.mean_top5_community_fraction /= n;
    agg.mean_days_to_end /= n;
    agg.max_threat_actual /= n;
    agg.max_threat_confirmed /= n;
    agg.max_threat_posrate /= n;
    agg.mean_daily_correlation = n_corr ? corr / static_cast<double>(n_corr) : nan;
    agg.max_threat_rt_only = n_rt ? rt / static_cast<double>(n_rt) : nan;
    agg.k_hat_mean = n_khat ? khat / static_cast<double>(n_khat) : nan;
    return agg;
}

ReplicationPlan ReplicationPlan::from_spec(const ExperimentSpec& spec)
{
    ReplicationPlan plan;
    plan.networks_per_cell = spec.networks_per_cell;
    plan.replicas_per_network = spec.replicas_per_network;
    plan.base_seed = spec.base_seed;
    plan.parallel = spec.parallel;
    plan.tail_mass = spec.tail_mass;
    plan.first_m = spec.first_m;
    plan.top_communities = spec.top_communities;
    return plan;
}

namespace {

template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F&& fn)
{
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                fn(i);
        });
}

using Visitor = std::function<void(std::size_t, std::size_t, std::size_t, const Trajectory&,
                                   const ContactNetwork&, const ComponentIndex&)>;

/// Runs all replicas; returns a per-cell error message (empty when fine).
std::vector<std::string> execute(const std::vector<Cell>& cells, const ReplicationPlan& plan, const Visitor& visit)
{
    std::vector<std::string> errors(cells.size());
    std::mutex error_mutex;
    const auto fail = [&](std::size_t cell, const std::string& message) {
        std::lock_guard lock(error_mutex);
        if (errors[cell].empty())
            errors[cell] = message;
    };

    // Group cells by network population, in first-appearance order.
    std::vector<std::string> group_keys;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto key = cells[c].network_key();
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted)
            group_keys.push_back(key);
        it->second.push_back(c);
    }

    for (const auto& key : group_keys) {
        const auto& members = groups[key];
        const Cell& proto = cells[members.front()];

        std::vector<std::optional<ContactNetwork>> networks(plan.networks_per_cell);
        std::vector<ComponentIndex> components(plan.networks_per_cell);
        std::vector<std::uint64_t> seeds(plan.networks_per_cell);
        std::string generation_error;
        std::mutex gen_mutex;
        parallel_for(plan.networks_per_cell, plan.parallel, [&](std::size_t i) {
            seeds[i] = network_seed(plan.base_seed, key, i);
            try {
                networks[i].emplace(generate_cell_network(proto, seeds[i], plan.tail_mass));
                components[i] = connected_components(*networks[i]);
            } catch (const std::exception& e) {
                std::lock_guard lock(gen_mutex);
                generation_error = e.what();
            }
        });
        if (!generation_error.empty()) {
            for (auto c : members)
                fail(c, "network generation failed: " + generation_error);
            continue;
        }

        const std::size_t per_cell = plan.networks_per_cell * plan.replicas_per_network;
        parallel_for(members.size() * per_cell, plan.parallel, [&](std::size_t task) {
            const std::size_t c = members[task / per_cell];
            const std::size_t within = task % per_cell;
            const std::size_t net_index = within / plan.replicas_per_network;
            const std::size_t replica = within % plan.replicas_per_network;
            try {
                const auto traj = run_epidemic(*networks[net_index], cells[c].epidemic(), cells[c].plan(),
                                               replica_seed(seeds[net_index], replica));
                visit(c, net_index, replica, traj, *networks[net_index], components[net_index]);
            } catch (const std::exception& e) {
                fail(c, e.what());
            }
        });
    }
    return errors;
}

std::vector<std::vector<RunSummary>> summarize_all(const std::vector<Cell>& cells, const ReplicationPlan& plan,
                                                   const TrajectorySink& sink, std::vector<std::string>& errors)
{
    const std::size_t per_cell = plan.networks_per_cell * plan.replicas_per_network;
    std::vector<std::vector<RunSummary>> results(cells.size(), std::vector<RunSummary>(per_cell));
    std::mutex sink_mutex;
    errors = execute(cells, plan, [&](std::size_t c, std::size_t net, std::size_t rep, const Trajectory& traj,
                                      const ContactNetwork&, const ComponentIndex& comps) {
        auto s = summarize_run(traj, comps, cells[c], plan.first_m, plan.top_communities);
        s.network_index = net;
        s.replica_index = rep;
        results[c][net * plan.replicas_per_network + rep] = s;
        if (sink) {
            std::lock_guard lock(sink_mutex);
            sink(cells[c], net, rep, traj);
        }
    });
    return results;
}

std::string hex_id(std::uint64_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::vector<std::vector<RunSummary>> run_cells(const std::vector<Cell>& cells, const ReplicationPlan& plan,
                                               const TrajectorySink& sink)
{
    std::vector<std::string> errors;
    auto results = summarize_all(cells, plan, sink, errors);
    for (std::size_t c = 0; c < cells.size(); ++c)
        if (!errors[c].empty())
            throw ParameterError("cell " + cells[c].key() + ": " + errors[c]);
    return results;
}

void for_each_run(const std::vector<Cell>& cells, const ReplicationPlan& plan,
                  const std::function<void(std::size_t, std::size_t, std::size_t, const Trajectory&,
                                           const ContactNetwork&, const ComponentIndex&)>& visit)
{
    const auto errors = execute(cells, plan, visit);
    for (std::size_t c = 0; c < cells.size(); ++c)
        if (!errors[c].empty())
            throw ParameterError("cell " + cells[c].key() + ": " + errors[c]);
}

// --- CSV output ------------------------------------------------------------

void write_aggregate_csv(const std::vector<CellAggregate>& rows, std::ostream& out)
{
    out << "model,network_kind,N,I0,beta,gamma,kappa,R0,k,p_H,P_c,P_q,strategy,mixed,daily_tests,"
           "mean_final_infection_fraction,mean_top5_community_fraction,mean_days_to_end,"
           "mean_daily_correlation,max_threat_actual,max_threat_confirmed,max_threat_posrate,"
           "max_threat_rt_only,k_hat_mean,replicas\n";
    for (const auto& r : rows) {
        const Cell& c = r.cell;
        out << to_string(c.model) << ',' << to_string(c.network_kind) << ',' << c.N << ',' << c.I0 << ','
            << format_double(c.beta) << ',' << format_double(c.gamma) << ',' << format_double(c.kappa) << ','
            << format_double(c.R0) << ',' << format_double(c.k) << ',' << format_double(c.p_H) << ','
            << format_double(c.P_c) << ',' << format_double(c.P_q) << ',' << to_string(c.strategy) << ','
            << (c.mixed ? 1 : 0) << ',' << c.daily_tests << ',' << format_double(r.mean_final_infection_fraction)
            << ',' << format_double(r.mean_top5_community_fraction) << ',' << format_double(r.mean_days_to_end)
            << ',' << format_double(r.mean_daily_correlation) << ',' << format_double(r.max_threat_actual) << ','
            << format_double(r.max_threat_confirmed) << ',' << format_double(r.max_threat_posrate) << ','
            << format_double(r.max_threat_rt_only) << ',' << format_double(r.k_hat_mean) << ',' << r.replicas
            << '\n';
    }
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out)
{
    std::vector<double> incidence;
    incidence.reserve(traj.daily.size());
    for (const auto& r : traj.daily)
        incidence.push_back(static_cast<double>(r.new_infections));
    const auto threat = threat_levels(incidence, traj.node_count);
    const auto rates = positive_rate_series(traj);

    out << "day,S,E,I,R,H,new_infections,tests_used,positives_found,positive_rate,quarantined_cumulative,"
           "threat_level_actual\n";
    for (std::size_t d = 0; d < traj.daily.size(); ++d) {
        const auto& r = traj.daily[d];
        out << r.day << ',' << r.count(Compartment::S) << ',' << r.count(Compartment::E) << ','
            << r.count(Compartment::I) << ',' << r.count(Compartment::R) << ',' << r.count(Compartment::H) << ','
            << r.new_infections << ',' << r.tests_used << ',' << r.positives_found() << ','
            << format_double(rates[d]) << ',' << r.quarantined_cumulative << ',' << threat.daily_level[d] << '\n';
    }
}

void write_infections_csv(const Trajectory& traj, std::ostream& out)
{
    out << "order,node,time,infector,secondary_infections\n";
    for (std::size_t i = 0; i < traj.infections.size(); ++i) {
        const auto& rec = traj.infections[i];
        out << i << ',' << rec.node << ',' << format_double(rec.time) << ',';
        if (rec.infector == kNoNode)
            out << -1;
        else
            out << rec.infector;
        out << ',' << rec.secondary << '\n';
    }
}

std::vector<std::size_t> read_secondary_counts(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "order,node,time,infector,secondary_infections")
        throw FormatError("not an infections CSV (bad header)");
    std::vector<std::size_t> counts;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty())
            continue;
        const auto fields = detail::split(line, ',');
        if (fields.size() != 5)
            throw FormatError("infections CSV line " + std::to_string(line_no) + ": expected 5 fields");
        counts.push_back(detail::parse_value<std::size_t>(fields[4], "secondary_infections"));
    }
    return counts;
}

std::filesystem::path infections_path_for(const std::filesystem::path& trajectory_path)
{
    auto p = trajectory_path;
    p.replace_extension(".infections.csv");
    return p;
}

std::vector<std::size_t> read_secondary_counts(const std::filesystem::path& path)
{
    auto source = path;
    {
        std::ifstream probe(path);
        if (!probe)
            throw IoError("cannot open '" + path.string() + "'");
        std::string header;
        std::getline(probe, header);
        if (detail::trim(header).starts_with("day,"))
            source = infections_path_for(path);
    }
    std::ifstream in(source);
    if (!in)
        throw IoError("cannot open '" + source.string() + "'");
    return read_secondary_counts(in);
}

// --- experiment ------------------------------------------------------------

ExperimentResult run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    const auto cells = spec.cells();
    const auto plan = ReplicationPlan::from_spec(spec);

    const std::filesystem::path out_dir(spec.output_dir);
    std::filesystem::create_directories(out_dir);
    const auto traj_dir = out_dir / "trajectories";
    if (spec.emit_trajectories)
        std::filesystem::create_directories(traj_dir);

    std::vector<std::pair<std::string, std::string>> index;
    TrajectorySink sink;
    if (spec.emit_trajectories) {
        sink = [&](const Cell& cell, std::size_t net, std::size_t rep, const Trajectory& traj) {
            const std::string stem =
                hex_id(hash_string(cell.key())) + "_net" + std::to_string(net) + "_rep" + std::to_string(rep);
            std::ostringstream t, inf;
            write_trajectory_csv(traj, t);
            write_infections_csv(traj, inf);
            write_file(traj_dir / (stem + ".csv"), t.str());
            write_file(traj_dir / (stem + ".infections.csv"), inf.str());
            index.emplace_back(stem + ".csv", cell.key());
        };
    }

    std::vector<std::string> errors;
    const auto results = summarize_all(cells, plan, sink, errors);

    ExperimentResult result;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (errors[c].empty())
            result.aggregates.push_back(aggregate_runs(cells[c], results[c]));
        else
            result.failures.push_back({cells[c], errors[c]});
    }
    std::sort(result.aggregates.begin(), result.aggregates.end(),
              [](const CellAggregate& a, const CellAggregate& b) { return cell_less(a.cell, b.cell); });
    std::sort(result.failures.begin(), result.failures.end(),
              [](const CellFailure& a, const CellFailure& b) { return cell_less(a.cell, b.cell); });

    std::ostringstream agg;
    write_aggregate_csv(result.aggregates, agg);
    result.aggregate_csv = out_dir / "aggregate.csv";
    write_file(result.aggregate_csv, agg.str());

    const auto failures_path = out_dir / "failures.csv";
    if (!result.failures.empty()) {
        std::ostringstream f;
        f << "cell,error\n";
        for (const auto& failure : result.failures)
            f << csv_field(failure.cell.key()) << ',' << csv_field(failure.message) << '\n';
        write_file(failures_path, f.str());
    } else {
        std::filesystem::remove(failures_path);
    }

    if (spec.emit_trajectories) {
        std::sort(index.begin(), index.end());
        std::ostringstream idx;
        idx << "file,cell\n";
        for (const auto& [file, key] : index)
            idx << file << ',' << csv_field(key) << '\n';
        write_file(traj_dir / "index.csv", idx.str());
    }
    return result;
}

} // namespace tracesim
