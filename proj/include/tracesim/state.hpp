#pragma once

#include "tracesim/netgen.hpp"
#include "tracesim/tracing_queue.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace tracesim {

enum class Compartment : std::uint8_t { S, E, I, R, H };
inline constexpr std::size_t compartment_count = 5;

std::string_view to_string(Compartment c);

inline bool is_infected(Compartment c) { return c == Compartment::E || c == Compartment::I; }

enum class Transition : std::uint8_t {
    infection,       // S -> E (SEIR) or S -> I (SIR, seeds)
    activation,      // E -> I
    recovery,        // I -> R
    hospitalization, // I -> H
    quarantine,      // removed from the contact network
};

struct EventRecord {
    double time = 0.0;
    NodeId node = 0;
    Transition transition = Transition::infection;
    /// Infector for infection events, kNoNode otherwise (and for seeds).
    NodeId source = 0;
};

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Mutable per-run state shared by the event engine and the daily
/// intervention step. One instance per run; never shared across threads.
struct SimulationState {
    explicit SimulationState(std::size_t node_count);

    std::size_t node_count() const { return compartment.size(); }
    std::size_t count(Compartment c) const { return counts[static_cast<std::size_t>(c)]; }

    /// Moves `node` to `to`, keeping the compartment counts and the
    /// confirmed-unrecovered tally in step.
    void set_compartment(NodeId node, Compartment to);

    /// Flags `node` as confirmed positive. Returns false if it already was.
    bool confirm(NodeId node);

    /// Removes `node` from the contact network. Returns false if already inactive.
    bool quarantine(NodeId node);

    std::vector<Compartment> compartment;
    std::vector<std::uint8_t> active;
    std::vector<std::uint8_t> confirmed;
    std::vector<NodeId> infector;
    std::vector<double> infection_time;
    /// Ever-infected nodes in order of infection.
    std::vector<NodeId> infection_order;
    /// Day + 1 of the node's most recent test, 0 if never tested.
    std::vector<std::int32_t> tested_stamp;

    TracingQueue queue;
    std::array<std::size_t, compartment_count> counts{};
    /// Confirmed nodes still in E or I ("ctd").
    std::size_t confirmed_unrecovered = 0;
    std::size_t quarantined_total = 0;
    int day = 0;

    bool record_events = false;
    std::vector<EventRecord> event_log;
};

} // namespace tracesim
