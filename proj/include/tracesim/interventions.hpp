#pragma once

#include "tracesim/netgen.hpp"
#include "tracesim/random.hpp"
#include "tracesim/state.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace tracesim {

enum class Strategy {
    none, ///< no tests at all
    rt,   ///< random testing
    fct,  ///< forward contact tracing: FIFO queue
    bct,  ///< backward contact tracing: most recent source positive first
    cto,  ///< contact tracing oracle: truly infected queue entries first
    got,  ///< global oracle: queue holds exactly the current infections
};

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct InterventionPlan {
    Strategy strategy = Strategy::none;
    std::size_t daily_tests = 0;
    /// Probability that each contact of a confirmed case is discovered.
    double P_c = 1.0;
    /// Probability that a positive is quarantined.
    double P_q = 1.0;
    /// Tests per day reserved for random testing before the strategy runs.
    std::size_t mixed_rt_share = 0;

    void validate() const;
};

/// Random-testing reservation used by the mixed plan: 5 of 10, 50 of 100,
/// capped at 100 from 1000 daily tests up, nothing below 10.
std::size_t mixed_rt_share(std::size_t daily_tests);

struct TestOutcome {
    std::size_t tests_used = 0;
    std::size_t positives = 0;
    std::size_t positives_by_rt = 0;
    std::size_t rt_tests = 0;
    std::size_t newly_quarantined = 0;
    /// Confirmed-unrecovered count when the day's testing started.
    std::size_t ctd_before = 0;
    /// Nodes deactivated during the step; the event engine must refresh
    /// their rates.
    std::vector<NodeId> quarantined_nodes;
};

/// Confirms `node` as a case: quarantines it (always when `force_quarantine`,
/// otherwise with P_q) and enqueues each unconfirmed contact with P_c.
/// Returns false if the node was already confirmed.
bool confirm_case(SimulationState& state, const ContactNetwork& net, const InterventionPlan& plan,
                  Rng& rng, NodeId node, bool force_quarantine, std::vector<NodeId>* quarantined);

/// Nodes eligible for a random test today: everyone except confirmed cases
/// that have not recovered, hospitalised nodes, and nodes already tested today.
bool eligible_for_random_test(const SimulationState& state, NodeId node);

/// Uniform sample without replacement of min(budget, #eligible) nodes.
std::vector<NodeId> select_random_tests(const SimulationState& state, std::size_t budget, Rng& rng);

/// Visit order of the queue for a tracing strategy. Any non-tracing strategy
/// yields FIFO order.
std::vector<NodeId> order_queue(const TracingQueue& queue, Strategy strategy,
                                const SimulationState& state);

/// Replaces the queue with the currently infected (E or I), unconfirmed,
/// active nodes, oldest infection first.
void got_refill(SimulationState& state);

/// One day of budget-limited testing. Must be called once per integer day
/// with state.day set to that day.
TestOutcome daily_step(SimulationState& state, const ContactNetwork& net, const InterventionPlan& plan,
                       Rng& rng);

} // namespace tracesim
