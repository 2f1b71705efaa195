#include "tracesim/network_io.hpp"

#include "tracesim/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace tracesim {

namespace {

template <typename T>
T parse_number(std::string_view text, std::size_t line_no)
{
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw FormatError("line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

std::filesystem::path rates_path_for(const std::filesystem::path& network_path)
{
    auto p = network_path;
    p.replace_extension(".rates");
    return p;
}

void write_edge_list(const ContactNetwork& net, std::ostream& out)
{
    out << "N " << net.node_count() << " kind=" << to_string(net.kind()) << '\n';
    for (auto [u, v] : net.edges())
        out << u << ' ' << v << '\n';
}

ContactNetwork read_edge_list(std::istream& in, std::optional<std::vector<double>> rates)
{
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("empty network file");
    const auto header = split_ws(line);
    if (header.size() != 3 || header[0] != "N" || !header[2].starts_with("kind="))
        throw FormatError("bad network header '" + line + "'");
    const auto n = parse_number<std::size_t>(header[1], 1);
    NetworkKind kind{};
    try {
        kind = parse_network_kind(header[2].substr(5));
    } catch (const ParameterError& e) {
        throw FormatError(std::string("network header: ") + e.what());
    }

    std::vector<ContactNetwork::Edge> edges;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty())
            continue;
        if (fields.size() != 2)
            throw FormatError("line " + std::to_string(line_no) + ": expected 'u v'");
        const auto u = parse_number<NodeId>(fields[0], line_no);
        const auto v = parse_number<NodeId>(fields[1], line_no);
        if (u >= v || v >= n)
            throw FormatError("line " + std::to_string(line_no) + ": need u < v < N");
        edges.emplace_back(u, v);
    }
    return ContactNetwork::from_edges(n, edges, kind, std::move(rates));
}

void write_network(const ContactNetwork& net, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_edge_list(net, out);
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");

    if (!net.has_infection_rates())
        return;
    const auto rates_path = rates_path_for(path);
    std::ofstream rates_out(rates_path, std::ios::binary);
    if (!rates_out)
        throw IoError("cannot open '" + rates_path.string() + "' for writing");
    char buf[64];
    for (double r : net.infection_rates()) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, r);
        rates_out.write(buf, ptr - buf);
        rates_out.put('\n');
    }
}

ContactNetwork read_network(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    auto net = read_edge_list(in);
    if (net.kind() != NetworkKind::gamma_infectiousness)
        return net;

    const auto rates_path = rates_path_for(path);
    std::ifstream rin(rates_path, std::ios::binary);
    if (!rin || rates_path == path)
        throw FormatError("gamma_infectiousness network '" + path.string() + "' lacks its .rates file");
    std::vector<double> rates;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(rin, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        rates.push_back(parse_number<double>(line, line_no));
    }
    const auto edges = net.edges();
    return ContactNetwork::from_edges(net.node_count(), edges, net.kind(), std::move(rates));
}

} // namespace tracesim
