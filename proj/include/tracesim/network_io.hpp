#pragma once

#include "tracesim/netgen.hpp"

#include <filesystem>
#include <iosfwd>

namespace tracesim {

/// Edge-list text format:
///
///     N <node_count> kind=<kind>
///     u v            (u < v, 0-based, ascending)
///
/// Per-node infection rates, when present, go to a sibling `<stem>.rates`
/// file with one shortest-round-trip decimal per line.
void write_network(const ContactNetwork& net, const std::filesystem::path& path);
ContactNetwork read_network(const std::filesystem::path& path);

void write_edge_list(const ContactNetwork& net, std::ostream& out);
ContactNetwork read_edge_list(std::istream& in, std::optional<std::vector<double>> rates = std::nullopt);

std::filesystem::path rates_path_for(const std::filesystem::path& network_path);

} // namespace tracesim
