#include "tracesim/interventions.hpp"

#include "tracesim/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace tracesim {

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::none: return "none";
    case Strategy::rt: return "rt";
    case Strategy::fct: return "fct";
    case Strategy::bct: return "bct";
    case Strategy::cto: return "cto";
    case Strategy::got: return "got";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name)
{
    for (auto s : {Strategy::none, Strategy::rt, Strategy::fct, Strategy::bct, Strategy::cto, Strategy::got})
        if (name == to_string(s))
            return s;
    throw ParameterError("unknown strategy '" + std::string(name) + "' (expected none|rt|fct|bct|cto|got)");
}

void InterventionPlan::validate() const
{
    if (!(P_c >= 0.0 && P_c <= 1.0))
        throw ParameterError("P_c must lie in [0, 1]");
    if (!(P_q >= 0.0 && P_q <= 1.0))
        throw ParameterError("P_q must lie in [0, 1]");
    if (mixed_rt_share > daily_tests)
        throw ParameterError("mixed_rt_share exceeds daily_tests");
}

std::size_t mixed_rt_share(std::size_t daily_tests)
{
    if (daily_tests < 10)
        return 0;
    return std::min<std::size_t>(daily_tests / 2, 100);
}

bool confirm_case(SimulationState& state, const ContactNetwork& net, const InterventionPlan& plan,
                  Rng& rng, NodeId node, bool force_quarantine, std::vector<NodeId>* quarantined)
{
    if (!state.confirm(node))
        return false;

    const bool isolate = force_quarantine || plan.P_q >= 1.0 || (plan.P_q > 0.0 && uniform01(rng) < plan.P_q);
    if (isolate && state.quarantine(node) && quarantined)
        quarantined->push_back(node);

    // The global oracle rebuilds its queue every day; traced contacts would
    // only pollute it.
    if (plan.strategy == Strategy::got || plan.P_c <= 0.0)
        return true;
    for (NodeId contact : net.neighbors(node)) {
        if (state.confirmed[contact] || state.compartment[contact] == Compartment::H)
            continue;
        if (plan.P_c >= 1.0 || uniform01(rng) < plan.P_c)
            state.queue.enqueue(contact, state.day, state.day);
    }
    return true;
}

bool eligible_for_random_test(const SimulationState& state, NodeId node)
{
    const auto c = state.compartment[node];
    if (c == Compartment::H)
        return false;
    if (state.confirmed[node] && is_infected(c))
        return false;
    return state.tested_stamp[node] != state.day + 1;
}

std::vector<NodeId> select_random_tests(const SimulationState& state, std::size_t budget, Rng& rng)
{
    std::vector<NodeId> picks;
    const std::size_t n = state.node_count();
    if (budget == 0 || n == 0)
        return picks;

    // Sparse budgets: rejection sampling avoids an O(N) scan per day.
    const std::size_t excluded_estimate = state.confirmed_unrecovered + state.count(Compartment::H);
    if (excluded_estimate < n && budget * 4 <= n - excluded_estimate) {
        std::unordered_set<NodeId> chosen;
        chosen.reserve(budget * 2);
        std::uniform_int_distribution<NodeId> any(0, static_cast<NodeId>(n - 1));
        std::size_t attempts = 0;
        const std::size_t max_attempts = 20 * budget + 1000;
        while (picks.size() < budget && attempts < max_attempts) {
            ++attempts;
            const NodeId v = any(rng);
            if (!eligible_for_random_test(state, v) || !chosen.insert(v).second)
                continue;
            picks.push_back(v);
        }
        if (picks.size() == budget)
            return picks;
        picks.clear();
    }

    std::vector<NodeId> pool;
    pool.reserve(n);
    for (NodeId v = 0; v < n; ++v)
        if (eligible_for_random_test(state, v))
            pool.push_back(v);
    const std::size_t take = std::min(budget, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
        const auto j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(take);
    return pool;
}

std::vector<NodeId> order_queue(const TracingQueue& queue, Strategy strategy, const SimulationState& state)
{
    auto entries = queue.entries();
    switch (strategy) {
    case Strategy::bct:
        std::stable_sort(entries.begin(), entries.end(), [](const QueueEntry& a, const QueueEntry& b) {
            return a.source_positive_day > b.source_positive_day;
        });
        break;
    case Strategy::cto:
        std::stable_partition(entries.begin(), entries.end(), [&](const QueueEntry& e) {
            return is_infected(state.compartment[e.node]);
        });
        break;
    default:
        break;
    }
    std::vector<NodeId> order;
    order.reserve(entries.size());
    for (const auto& e : entries)
        order.push_back(e.node);
    return order;
}

void got_refill(SimulationState& state)
{
    state.queue.clear();
    for (NodeId v : state.infection_order)
        if (is_infected(state.compartment[v]) && !state.confirmed[v] && state.active[v])
            state.queue.enqueue(v, state.day, state.day);
}

TestOutcome daily_step(SimulationState& state, const ContactNetwork& net, const InterventionPlan& plan,
                       Rng& rng)
{
    TestOutcome out;
    out.ctd_before = state.confirmed_unrecovered;
    if (plan.strategy == Strategy::none)
        return out;

    std::size_t budget = plan.daily_tests;
    const auto test = [&](NodeId v, bool by_rt) {
        state.queue.remove(v);
        state.tested_stamp[v] = state.day + 1;
        ++out.tests_used;
        --budget;
        if (by_rt)
            ++out.rt_tests;
        if (!is_infected(state.compartment[v]))
            return;
        ++out.positives;
        if (by_rt)
            ++out.positives_by_rt;
        confirm_case(state, net, plan, rng, v, false, &out.quarantined_nodes);
    };
    const auto random_testing = [&](std::size_t n) {
        for (NodeId v : select_random_tests(state, std::min(n, budget), rng))
            test(v, true);
    };

    if (plan.mixed_rt_share > 0 && plan.strategy != Strategy::rt)
        random_testing(plan.mixed_rt_share);

    switch (plan.strategy) {
    case Strategy::none:
    case Strategy::rt:
        break;
    case Strategy::fct:
    case Strategy::bct:
    case Strategy::cto:
        // Contacts traced today join the queue and are reordered in the next
        // round while budget remains.
        while (budget > 0 && !state.queue.empty()) {
            for (NodeId v : order_queue(state.queue, plan.strategy, state)) {
                if (budget == 0)
                    break;
                if (!state.queue.contains(v))
                    continue;
                // Re-traced after a negative test earlier today.
                if (state.tested_stamp[v] == state.day + 1)
                    state.queue.remove(v);
                else
                    test(v, false);
            }
        }
        break;
    case Strategy::got:
        got_refill(state);
        for (NodeId v : order_queue(state.queue, plan.strategy, state)) {
            if (budget == 0)
                break;
            test(v, false);
        }
        break;
    }
    random_testing(budget);

    out.newly_quarantined = out.quarantined_nodes.size();
    return out;
}

} // namespace tracesim
