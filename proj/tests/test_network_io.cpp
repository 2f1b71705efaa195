#include "tracesim/error.hpp"
#include "tracesim/netgen.hpp"
#include "tracesim/network_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tracesim;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "tracesim_io_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST_CASE("edge list round trip")
{
    const auto dist = derive_degree_distribution(0.5, 2.5, 0.6, 0.05);
    const auto net = generate_superspreading_network(dist, 2000, 4);
    const auto path = scratch("ss.txt");
    write_network(net, path);
    CHECK(read_network(path) == net);
}

TEST_CASE("gamma network round trip keeps the rates bit-exact")
{
    const auto net = generate_gamma_infectiousness_network(0.3, 2.5, 0.6, 0.05, 1000, 4);
    const auto path = scratch("gamma.txt");
    write_network(net, path);
    CHECK(std::filesystem::exists(rates_path_for(path)));
    CHECK(read_network(path) == net);

    std::filesystem::remove(rates_path_for(path));
    CHECK_THROWS_AS(read_network(path), FormatError);
}

TEST_CASE("edge list parse errors")
{
    const auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_edge_list(in);
    };
    CHECK(parse("N 3 kind=superspreading\n0 1\n1 2\n").edge_count() == 2);
    CHECK_THROWS_AS(parse(""), FormatError);
    CHECK_THROWS_AS(parse("3\n0 1\n"), FormatError);
    CHECK_THROWS_AS(parse("N 3 kind=superspreading\n0 3\n"), FormatError);
    CHECK_THROWS_AS(parse("N 3 kind=superspreading\n1 0\n"), FormatError);
    CHECK_THROWS_AS(parse("N 3 kind=superspreading\n0 x\n"), FormatError);
    CHECK_THROWS_AS(parse("N 3 kind=lattice\n0 1\n"), FormatError);
    CHECK_THROWS_AS(read_network(scratch("missing.txt")), IoError);
}
