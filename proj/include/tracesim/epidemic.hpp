#pragma once

#include "tracesim/interventions.hpp"
#include "tracesim/netgen.hpp"
#include "tracesim/state.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace tracesim {

enum class Model { SIR, SEIR };

std::string_view to_string(Model m);
Model parse_model(std::string_view name);

/// I -> H rate that makes hospitalization win the race against recovery
/// with probability p_H: gamma p_H / (1 - p_H).
double hospitalization_rate(double p_H, double gamma);

/// Rates are per day.
struct EpidemicParams {
    Model model = Model::SIR;
    double beta = 0.6;
    double gamma = 0.05;
    /// E -> I rate; ignored for SIR.
    double kappa = 0.2;
    double p_H = 0.0;
    std::size_t I0 = 10;

    double eta() const { return hospitalization_rate(p_H, gamma); }
    void validate() const;
};

/// Day d covers event times in [d, d+1); its testing happens at t = d+1.
/// The last record of a run may cover a partial day and carries no tests.
struct DailyRecord {
    int day = 0;
    /// End-of-day compartment sizes, indexed by Compartment.
    std::array<std::size_t, compartment_count> counts{};
    std::size_t new_infections = 0;
    std::size_t tests_used = 0;
    std::size_t test_positives = 0;
    std::size_t hospital_confirmations = 0;
    std::size_t rt_tests = 0;
    std::size_t rt_positives = 0;
    /// Confirmed-unrecovered count when testing started.
    std::size_t ctd = 0;
    std::size_t quarantined_cumulative = 0;

    std::size_t count(Compartment c) const { return counts[static_cast<std::size_t>(c)]; }
    std::size_t positives_found() const { return test_positives + hospital_confirmations; }
};

struct InfectionRecord {
    NodeId node = 0;
    double time = 0.0;
    NodeId infector = kNoNode;
    /// Direct infections this node caused over its whole infectious period.
    std::size_t secondary = 0;
};

struct Trajectory {
    std::size_t node_count = 0;
    std::vector<DailyRecord> daily;
    std::size_t final_infected_total = 0;
    int days_to_end = 0;
    /// Every ever-infected node, in infection order (seeds first).
    std::vector<InfectionRecord> infections;
    std::vector<Compartment> final_compartments;
    /// Filled only with RunOptions::record_events.
    std::vector<EventRecord> events;
};

struct RunOptions {
    bool record_events = false;
    /// Explicit seed nodes; when non-empty they replace the I0 uniform draws.
    std::vector<NodeId> initial_infected;
};

/// Continuous-time Gillespie simulation on `net`, paused at every integer day
/// for the intervention step. Ends when no E or I node remains.
Trajectory run_epidemic(const ContactNetwork& net, const EpidemicParams& params,
                        const InterventionPlan& plan, std::uint64_t seed, const RunOptions& options = {});

/// Secondary-infection counts of the first min(first_m, #infected) infected
/// nodes, seeds included.
std::vector<std::size_t> secondary_infection_counts(const Trajectory& traj, std::size_t first_m);

} // namespace tracesim
