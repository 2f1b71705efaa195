#include "oracles.hpp"

#include "tracesim/error.hpp"
#include "tracesim/netgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace tracesim;

namespace {

void check_simple_and_symmetric(const ContactNetwork& net)
{
    for (NodeId u = 0; u < net.node_count(); ++u) {
        const auto nb = net.neighbors(u);
        std::set<NodeId> seen(nb.begin(), nb.end());
        REQUIRE(seen.size() == nb.size());
        REQUIRE(seen.count(u) == 0);
        for (NodeId v : nb) {
            const auto back = net.neighbors(v);
            REQUIRE(std::find(back.begin(), back.end(), u) != back.end());
        }
    }
}

double mean_degree(const ContactNetwork& net)
{
    return 2.0 * static_cast<double>(net.edge_count()) / static_cast<double>(net.node_count());
}

} // namespace

TEST_CASE("infection probability")
{
    CHECK(infection_probability(0.5, 0.5) == 0.5);
    CHECK(infection_probability(0.6, 0.0) == 1.0);
    CHECK(infection_probability(0.6, 0.25) == doctest::Approx(0.6 / 0.85).epsilon(1e-15));
}

TEST_CASE("degree distribution is normalised and starts at degree 1")
{
    for (double k : {0.1, 0.5, 1.0, 8.0})
        for (double R0 : {1.0, 2.5, 18.0}) {
            const auto d = derive_degree_distribution(k, R0, 0.6, 0.05);
            double sum = 0.0;
            for (double p : d.probabilities())
                sum += p;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(d.probability(0) == 0.0);
            REQUIRE(d.params());
            CHECK(d.params()->R0 == R0);
        }
}

TEST_CASE("degree mean matches direct summation of the excess-degree law")
{
    // k = 1, R0 = 2, beta = gamma = 1: the NB mean is 4 and the mean degree is 4 / ln 5.
    const auto d = derive_degree_distribution(1.0, 2.0, 1.0, 1.0);
    const double brute = oracle::degree_mean_by_summation(1.0, 4.0, 1000000);
    CHECK(brute == doctest::Approx(4.0 / std::log(5.0)).epsilon(1e-9));
    CHECK(d.mean_degree() == doctest::Approx(brute).epsilon(1e-8));

    const auto d2 = derive_degree_distribution(0.5, 2.5, 0.6, 0.05);
    CHECK(d2.mean_degree() == doctest::Approx(oracle::degree_mean_by_summation(0.5, 2.5 * 0.65 / 0.6, 20000))
                                  .epsilon(1e-8));
}

TEST_CASE("degree distribution rejects invalid parameters")
{
    CHECK_THROWS_AS(derive_degree_distribution(0.0, 2.5, 0.6, 0.05), ParameterError);
    CHECK_THROWS_AS(derive_degree_distribution(0.5, 0.0, 0.6, 0.05), ParameterError);
    CHECK_THROWS_AS(derive_degree_distribution(0.5, 2.5, 0.0, 0.05), ParameterError);
    CHECK_THROWS_AS(derive_degree_distribution(0.5, 2.5, 0.6, -0.1), ParameterError);
    CHECK_THROWS_AS(derive_degree_distribution(0.5, 2.5, 0.6, 0.05, 0.0), ParameterError);
    CHECK_THROWS_AS(derive_degree_distribution(0.5, 2.5, 0.6, 0.05, 1e-3), ParameterError);
    CHECK_THROWS_AS(DegreeDistribution::from_pmf({0.5, 0.5}), ParameterError);
    CHECK_THROWS_AS(DegreeDistribution::from_pmf({}), ParameterError);
}

TEST_CASE("configuration model on all-degree-2 triples is simple")
{
    const auto dist = DegreeDistribution::from_pmf({0, 0, 1});
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto net = generate_superspreading_network(dist, 3, seed);
        check_simple_and_symmetric(net);
        CHECK(net.edge_count() <= 3);
    }
}

TEST_CASE("superspreading network mean degree follows the distribution")
{
    const auto dist = derive_degree_distribution(0.5, 2.5, 0.6, 0.05);
    GenerationStats stats;
    const auto net = generate_superspreading_network(dist, 100000, 11, &stats);
    CHECK(mean_degree(net) == doctest::Approx(dist.mean_degree()).epsilon(0.02));
    check_simple_and_symmetric(net);
    CHECK(stats.clamped_degrees == 0);
}

TEST_CASE("generators are deterministic under a fixed seed")
{
    const auto dist = derive_degree_distribution(0.1, 2.5, 0.6, 0.05);
    CHECK(generate_superspreading_network(dist, 5000, 3).edges() ==
          generate_superspreading_network(dist, 5000, 3).edges());
    CHECK(generate_superspreading_network(dist, 5000, 3).edges() !=
          generate_superspreading_network(dist, 5000, 4).edges());
    CHECK(generate_er_network(2.5, 0.6, 0.05, 5000, 3) == generate_er_network(2.5, 0.6, 0.05, 5000, 3));
    CHECK(generate_gamma_infectiousness_network(0.5, 2.5, 0.6, 0.05, 5000, 3) ==
          generate_gamma_infectiousness_network(0.5, 2.5, 0.6, 0.05, 5000, 3));
}

TEST_CASE("configuration model clamps degrees above N-1")
{
    const auto dist = DegreeDistribution::from_pmf({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1});
    GenerationStats stats;
    const auto net = generate_superspreading_network(dist, 5, 1, &stats);
    CHECK(stats.clamped_degrees == 5);
    check_simple_and_symmetric(net);
    CHECK_THROWS_AS(generate_superspreading_network(dist, 1, 1), ParameterError);
}

TEST_CASE("ER network mean degree")
{
    const auto net = generate_er_network(2.5, 0.6, 0.05, 100000, 5);
    CHECK(mean_degree(net) == doctest::Approx(2.5 * 0.65 / 0.6).epsilon(0.02));
    check_simple_and_symmetric(net);
    CHECK(generate_er_network(0.0, 0.6, 0.05, 1000, 5).edge_count() == 0);
    CHECK_THROWS_AS(generate_er_network(2.5, 0.6, 0.05, 3, 5), ParameterError);
}

TEST_CASE("gamma infectiousness rates")
{
    const double beta = 0.6;
    const auto net = generate_gamma_infectiousness_network(0.1, 2.5, beta, 0.05, 100000, 8);
    REQUIRE(net.has_infection_rates());
    const auto rates = net.infection_rates();
    double sum = 0.0, sq = 0.0;
    for (double r : rates) {
        sum += r;
        sq += r * r;
    }
    const double n = static_cast<double>(rates.size());
    const double mean = sum / n;
    CHECK((sq / n - mean * mean) == doctest::Approx(beta * beta / 0.1).epsilon(0.10));

    const auto tame = generate_gamma_infectiousness_network(1.0, 2.5, beta, 0.05, 100000, 8);
    double tame_sum = 0.0;
    for (double r : tame.infection_rates())
        tame_sum += r;
    CHECK(tame_sum / 100000 == doctest::Approx(beta).epsilon(0.02));

    const auto flat = generate_gamma_infectiousness_network(1e6, 2.5, beta, 0.05, 1000, 8);
    for (double r : flat.infection_rates())
        CHECK(r == doctest::Approx(beta).epsilon(0.01));
}

TEST_CASE("expected clustering coefficient")
{
    const auto d3 = DegreeDistribution::from_pmf({0, 0, 0, 1});
    CHECK(expected_clustering_coefficient(d3, 100) == doctest::Approx(36.0 / 2700.0).epsilon(1e-14));
    const auto d = derive_degree_distribution(0.5, 2.5, 0.6, 0.05);
    const double a = expected_clustering_coefficient(d, 1000);
    const double b = expected_clustering_coefficient(d, 10000);
    CHECK(a == doctest::Approx(10 * b).epsilon(1e-14));
    CHECK_THROWS_AS(expected_clustering_coefficient(d, 0), ParameterError);
}

TEST_CASE("expected clustering agrees with triangle counting on a generated network")
{
    const auto dist = derive_degree_distribution(0.5, 2.5, 1.0, 0.05);
    const auto net = generate_superspreading_network(dist, 100000, 21);
    const auto stats = network_stats(net);
    CHECK(stats.clustering_coefficient_expected ==
          doctest::Approx(oracle::transitivity(net)).epsilon(0.25));
}

TEST_CASE("network stats on small graphs")
{
    const std::vector<ContactNetwork::Edge> triangle{{0, 1}, {1, 2}, {0, 2}};
    auto stats = network_stats(ContactNetwork::from_edges(3, triangle, NetworkKind::superspreading));
    CHECK(stats.component_sizes == std::vector<std::size_t>{3});
    CHECK(stats.empirical_mean_degree == 2.0);
    CHECK(stats.degree_histogram.at(2) == 3);

    const std::vector<ContactNetwork::Edge> pairs{{0, 1}, {2, 3}};
    stats = network_stats(ContactNetwork::from_edges(4, pairs, NetworkKind::superspreading));
    CHECK(stats.component_sizes == std::vector<std::size_t>{2, 2});
}

TEST_CASE("components ranked by size, ties by smallest node id")
{
    const std::vector<ContactNetwork::Edge> edges{{0, 1}, {2, 3}, {4, 5}, {5, 6}, {7, 7}, {1, 0}};
    const auto net = ContactNetwork::from_edges(8, edges, NetworkKind::superspreading);
    CHECK(net.edge_count() == 4);
    const auto c = connected_components(net);
    CHECK(c.sizes == std::vector<std::size_t>{3, 2, 2, 1});
    CHECK(c.rank_of_node[4] == 0);
    CHECK(c.rank_of_node[0] == 1);
    CHECK(c.rank_of_node[2] == 2);
    CHECK(c.rank_of_node[7] == 3);
}

TEST_CASE("superspreading degrees have a heavier tail than ER at equal mean")
{
    const auto dist = derive_degree_distribution(0.1, 2.5, 0.6, 0.05);
    const auto ss = generate_superspreading_network(dist, 100000, 2);
    const auto er = generate_er_network(dist.mean_degree() * 0.6 / 0.65, 0.6, 0.05, 100000, 2);
    const auto quantile = [](const ContactNetwork& net) {
        std::vector<std::size_t> deg(net.node_count());
        for (NodeId v = 0; v < net.node_count(); ++v)
            deg[v] = net.degree(v);
        std::sort(deg.begin(), deg.end());
        return deg[deg.size() * 999 / 1000];
    };
    CHECK(mean_degree(er) == doctest::Approx(mean_degree(ss)).epsilon(0.05));
    CHECK(quantile(ss) > quantile(er));
}

TEST_CASE("network kind names")
{
    CHECK(parse_network_kind("ss") == NetworkKind::superspreading);
    CHECK(parse_network_kind("er") == NetworkKind::erdos_renyi);
    CHECK(parse_network_kind("gamma_infectiousness") == NetworkKind::gamma_infectiousness);
    CHECK_THROWS_AS(parse_network_kind("lattice"), ParameterError);
}
