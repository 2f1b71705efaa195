#include "tracesim/state.hpp"

#include <cmath>

namespace tracesim {

std::string_view to_string(Compartment c)
{
    switch (c) {
    case Compartment::S: return "S";
    case Compartment::E: return "E";
    case Compartment::I: return "I";
    case Compartment::R: return "R";
    case Compartment::H: return "H";
    }
    return "?";
}

SimulationState::SimulationState(std::size_t node_count)
    : compartment(node_count, Compartment::S),
      active(node_count, 1),
      confirmed(node_count, 0),
      infector(node_count, kNoNode),
      infection_time(node_count, std::nan("")),
      tested_stamp(node_count, 0),
      queue(node_count)
{
    counts[static_cast<std::size_t>(Compartment::S)] = node_count;
}

void SimulationState::set_compartment(NodeId node, Compartment to)
{
    const Compartment from = compartment[node];
    if (from == to)
        return;
    --counts[static_cast<std::size_t>(from)];
    ++counts[static_cast<std::size_t>(to)];
    compartment[node] = to;
    if (confirmed[node]) {
        if (is_infected(from) && !is_infected(to))
            --confirmed_unrecovered;
        else if (!is_infected(from) && is_infected(to))
            ++confirmed_unrecovered;
    }
}

bool SimulationState::confirm(NodeId node)
{
    if (confirmed[node])
        return false;
    confirmed[node] = 1;
    if (is_infected(compartment[node]))
        ++confirmed_unrecovered;
    queue.remove(node);
    return true;
}

bool SimulationState::quarantine(NodeId node)
{
    if (!active[node])
        return false;
    active[node] = 0;
    ++quarantined_total;
    return true;
}

} // namespace tracesim
