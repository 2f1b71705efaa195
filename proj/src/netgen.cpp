#include "tracesim/netgen.hpp"

#include "tracesim/error.hpp"
#include "tracesim/random.hpp"

#include <boost/math/distributions/negative_binomial.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tracesim {

namespace {

void require(bool ok, const char* message)
{
    if (!ok)
        throw ParameterError(message);
}

/// Mean of the Poisson / NB law the degrees are built around, R0 / T.
double calibrated_mean(double R0, double beta, double gamma)
{
    return R0 / infection_probability(beta, gamma);
}

double er_edge_probability(double R0, double beta, double gamma, std::size_t N)
{
    require(N >= 2, "ER network needs N >= 2");
    require(std::isfinite(R0) && R0 >= 0.0, "R0 must be finite and >= 0");
    const double mean = R0 > 0.0 ? calibrated_mean(R0, beta, gamma) : 0.0;
    const double n_minus_1 = static_cast<double>(N - 1);
    if (!(mean < n_minus_1))
        throw ParameterError("ER mean degree " + std::to_string(mean) + " must be below N-1 = " +
                             std::to_string(N - 1));
    return mean / n_minus_1;
}

} // namespace

std::string_view to_string(NetworkKind kind)
{
    switch (kind) {
    case NetworkKind::superspreading: return "superspreading";
    case NetworkKind::erdos_renyi: return "erdos_renyi";
    case NetworkKind::gamma_infectiousness: return "gamma_infectiousness";
    }
    return "unknown";
}

NetworkKind parse_network_kind(std::string_view name)
{
    if (name == "superspreading" || name == "ss")
        return NetworkKind::superspreading;
    if (name == "erdos_renyi" || name == "er")
        return NetworkKind::erdos_renyi;
    if (name == "gamma_infectiousness" || name == "gamma")
        return NetworkKind::gamma_infectiousness;
    throw ParameterError("unknown network kind '" + std::string(name) +
                         "' (expected superspreading|erdos_renyi|gamma_infectiousness)");
}

double infection_probability(double beta, double gamma)
{
    require(std::isfinite(beta) && beta > 0.0, "beta must be finite and > 0");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be finite and >= 0");
    return beta / (gamma + beta);
}

// --- DegreeDistribution ----------------------------------------------------

DegreeDistribution::DegreeDistribution(std::vector<double> pmf, std::optional<DispersionParams> params)
    : pmf_(std::move(pmf)), params_(params)
{
    require(pmf_.size() >= 2, "degree distribution needs support on degree >= 1");
    require(pmf_[0] == 0.0, "degree distribution must not put mass on degree 0");
    double total = 0.0;
    for (double p : pmf_) {
        require(std::isfinite(p) && p >= 0.0, "degree probabilities must be finite and >= 0");
        total += p;
    }
    require(total > 0.0, "degree distribution has no mass");
    for (double& p : pmf_)
        p /= total;
    while (pmf_.size() > 2 && pmf_.back() == 0.0)
        pmf_.pop_back();
    for (std::size_t d = 1; d < pmf_.size(); ++d) {
        const double dd = static_cast<double>(d);
        mean_ += dd * pmf_[d];
        second_moment_ += dd * dd * pmf_[d];
    }
}

DegreeDistribution DegreeDistribution::from_pmf(std::vector<double> pmf)
{
    return DegreeDistribution(std::move(pmf), std::nullopt);
}

DegreeDistribution derive_degree_distribution(double k, double R0, double beta, double gamma,
                                              double tail_mass)
{
    require(std::isfinite(k) && k > 0.0, "dispersion k must be finite and > 0");
    require(std::isfinite(R0) && R0 > 0.0, "R0 must be finite and > 0");
    require(std::isfinite(tail_mass) && tail_mass > 0.0 && tail_mass <= 1e-6,
            "tail_mass must lie in (0, 1e-6]");
    const double mean = calibrated_mean(R0, beta, gamma);

    // Excess-degree law q_n = NB(n | k, mean); degree i = n + 1.
    const boost::math::negative_binomial_distribution<double> nb(k, k / (k + mean));
    constexpr std::size_t max_support = 50'000'000;
    std::vector<double> pmf{0.0};
    for (std::size_t n = 0;; ++n) {
        require(n < max_support, "degree distribution tail does not vanish");
        const double q = boost::math::pdf(nb, static_cast<double>(n));
        pmf.push_back(q / static_cast<double>(n + 1));
        if (boost::math::cdf(boost::math::complement(nb, static_cast<double>(n))) < tail_mass)
            break;
    }
    return DegreeDistribution(std::move(pmf), DispersionParams{k, R0, beta, gamma});
}

// --- ContactNetwork --------------------------------------------------------

ContactNetwork ContactNetwork::from_edges(std::size_t node_count, std::span<const Edge> edges,
                                          NetworkKind kind,
                                          std::optional<std::vector<double>> infection_rates)
{
    ContactNetwork net;
    net.kind_ = kind;
    if (infection_rates) {
        if (infection_rates->size() != node_count)
            throw ParameterError("per-node infection rates must have one entry per node");
        net.rates_ = std::move(*infection_rates);
    }

    std::vector<std::size_t> degree(node_count, 0);
    for (auto [u, v] : edges) {
        if (u >= node_count || v >= node_count)
            throw ParameterError("edge endpoint out of range");
        if (u == v)
            continue;
        ++degree[u];
        ++degree[v];
    }
    net.offsets_.assign(node_count + 1, 0);
    for (std::size_t i = 0; i < node_count; ++i)
        net.offsets_[i + 1] = net.offsets_[i] + degree[i];
    net.targets_.resize(net.offsets_.back());
    std::vector<std::size_t> cursor(net.offsets_.begin(), net.offsets_.end() - 1);
    for (auto [u, v] : edges) {
        if (u == v)
            continue;
        net.targets_[cursor[u]++] = v;
        net.targets_[cursor[v]++] = u;
    }

    // Sort and dedupe each row, then compact.
    std::size_t write = 0;
    std::size_t row_begin = 0;
    for (std::size_t i = 0; i < node_count; ++i) {
        const std::size_t row_end = net.offsets_[i + 1];
        auto first = net.targets_.begin() + static_cast<std::ptrdiff_t>(row_begin);
        auto last = net.targets_.begin() + static_cast<std::ptrdiff_t>(row_end);
        std::sort(first, last);
        last = std::unique(first, last);
        net.offsets_[i] = write;
        for (auto it = first; it != last; ++it)
            net.targets_[write++] = *it;
        row_begin = row_end;
    }
    net.offsets_[node_count] = write;
    net.targets_.resize(write);
    net.targets_.shrink_to_fit();
    return net;
}

std::vector<ContactNetwork::Edge> ContactNetwork::edges() const
{
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u)
        for (NodeId v : neighbors(u))
            if (u < v)
                out.emplace_back(u, v);
    return out;
}

// --- generators ------------------------------------------------------------

ContactNetwork generate_superspreading_network(const DegreeDistribution& dist, std::size_t N,
                                               std::uint64_t seed, GenerationStats* stats)
{
    require(N >= 2, "network needs N >= 2");
    require(N <= std::size_t{1} << 31, "network too large for 32-bit node ids");
    GenerationStats local;
    Rng rng = make_rng(seed, Stream::topology);

    const auto pmf = dist.probabilities();
    std::vector<double> cdf(pmf.size());
    std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());

    const std::size_t max_degree = N - 1;
    std::vector<std::size_t> degrees(N);
    std::size_t stub_total = 0;
    for (auto& d : degrees) {
        const double u = uniform01(rng) * cdf.back();
        d = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        d = std::clamp<std::size_t>(d, 1, pmf.size() - 1);
        if (d > max_degree) {
            d = max_degree;
            ++local.clamped_degrees;
        }
        stub_total += d;
    }
    if (stub_total % 2 == 1) {
        const auto i = std::uniform_int_distribution<std::size_t>(0, N - 1)(rng);
        if (degrees[i] < max_degree)
            ++degrees[i];
        else
            --degrees[i];
    }

    std::vector<NodeId> stubs;
    stubs.reserve(stub_total + 1);
    for (std::size_t i = 0; i < N; ++i)
        stubs.insert(stubs.end(), degrees[i], static_cast<NodeId>(i));
    std::shuffle(stubs.begin(), stubs.end(), rng);

    std::vector<ContactNetwork::Edge> edges;
    edges.reserve(stubs.size() / 2);
    for (std::size_t s = 0; s + 1 < stubs.size(); s += 2) {
        const NodeId u = stubs[s];
        const NodeId v = stubs[s + 1];
        if (u == v) {
            ++local.self_loops_removed;
            continue;
        }
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    const std::size_t before = edges.size();
    auto net = ContactNetwork::from_edges(N, edges, NetworkKind::superspreading);
    local.multi_edges_removed = before - net.edge_count();
    if (stats)
        *stats = local;
    return net;
}

namespace {

// Batagelj & Brandes geometric skipping; equivalent to an independent
// Bernoulli(p) trial on every pair.
std::vector<ContactNetwork::Edge> sample_gnp_edges(std::size_t N, double p, Rng& rng)
{
    std::vector<ContactNetwork::Edge> edges;
    if (p <= 0.0)
        return edges;
    edges.reserve(static_cast<std::size_t>(p * static_cast<double>(N) * static_cast<double>(N - 1) / 2.0 * 1.05) + 16);
    const double log_q = std::log1p(-p);
    std::int64_t v = 1;
    std::int64_t w = -1;
    const auto n = static_cast<std::int64_t>(N);
    while (v < n) {
        const double r = uniform01(rng);
        w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
        while (w >= v && v < n) {
            w -= v;
            ++v;
        }
        if (v < n)
            edges.emplace_back(static_cast<NodeId>(w), static_cast<NodeId>(v));
    }
    return edges;
}

} // namespace

ContactNetwork generate_er_network(double R0, double beta, double gamma, std::size_t N,
                                   std::uint64_t seed)
{
    const double p = er_edge_probability(R0, beta, gamma, N);
    require(N <= std::size_t{1} << 31, "network too large for 32-bit node ids");
    Rng rng = make_rng(seed, Stream::topology);
    const auto edges = sample_gnp_edges(N, p, rng);
    return ContactNetwork::from_edges(N, edges, NetworkKind::erdos_renyi);
}

ContactNetwork generate_gamma_infectiousness_network(double k, double R0, double beta,
                                                     double gamma, std::size_t N,
                                                     std::uint64_t seed)
{
    require(std::isfinite(k) && k > 0.0, "dispersion k must be finite and > 0");
    const double p = er_edge_probability(R0, beta, gamma, N);
    require(N <= std::size_t{1} << 31, "network too large for 32-bit node ids");
    Rng topo = make_rng(seed, Stream::topology);
    const auto edges = sample_gnp_edges(N, p, topo);

    Rng rate_rng = make_rng(seed, Stream::node_rates);
    std::gamma_distribution<double> shape_scale(k, beta / k);
    std::vector<double> rates(N);
    for (auto& r : rates)
        r = shape_scale(rate_rng);
    return ContactNetwork::from_edges(N, edges, NetworkKind::gamma_infectiousness, std::move(rates));
}

// --- statistics ------------------------------------------------------------

double expected_clustering_coefficient(const DegreeDistribution& dist, std::size_t N)
{
    require(N >= 1, "N must be >= 1");
    const double m1 = dist.mean_degree();
    const double m2 = dist.second_moment();
    const double excess = m2 - m1;
    return excess * excess / (static_cast<double>(N) * m1 * m1 * m1);
}

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0u); }

    std::uint32_t find(std::uint32_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (size[a] < size[b])
            std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }

    std::vector<std::uint32_t> parent;
    std::vector<std::size_t> size;
};

} // namespace

ComponentIndex connected_components(const ContactNetwork& net)
{
    const std::size_t n = net.node_count();
    DisjointSets sets(n);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : net.neighbors(u))
            if (u < v)
                sets.unite(u, v);

    // Roots visited in ascending node order, so the first node seen per root
    // is that component's smallest id.
    struct Component {
        std::uint32_t root;
        std::uint32_t min_node;
        std::size_t size;
    };
    std::vector<std::int64_t> slot(n, -1);
    std::vector<Component> comps;
    for (NodeId u = 0; u < n; ++u) {
        const auto r = sets.find(u);
        if (slot[r] < 0) {
            slot[r] = static_cast<std::int64_t>(comps.size());
            comps.push_back({r, u, sets.size[r]});
        }
    }
    std::vector<std::size_t> order(comps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (comps[a].size != comps[b].size)
            return comps[a].size > comps[b].size;
        return comps[a].min_node < comps[b].min_node;
    });

    ComponentIndex index;
    index.sizes.resize(comps.size());
    std::vector<std::uint32_t> rank_of_slot(comps.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        rank_of_slot[order[r]] = static_cast<std::uint32_t>(r);
        index.sizes[r] = comps[order[r]].size;
    }
    index.rank_of_node.resize(n);
    for (NodeId u = 0; u < n; ++u)
        index.rank_of_node[u] = rank_of_slot[static_cast<std::size_t>(slot[sets.find(u)])];
    return index;
}

NetworkStats network_stats(const ContactNetwork& net)
{
    NetworkStats stats;
    const std::size_t n = net.node_count();
    double m1 = 0.0;
    double m2 = 0.0;
    for (NodeId u = 0; u < n; ++u) {
        const auto d = net.degree(u);
        ++stats.degree_histogram[d];
        m1 += static_cast<double>(d);
        m2 += static_cast<double>(d) * static_cast<double>(d);
    }
    if (n > 0) {
        m1 /= static_cast<double>(n);
        m2 /= static_cast<double>(n);
    }
    stats.empirical_mean_degree = m1;
    stats.clustering_coefficient_expected =
        m1 > 0.0 ? (m2 - m1) * (m2 - m1) / (static_cast<double>(n) * m1 * m1 * m1) : 0.0;
    stats.component_sizes = connected_components(net).sizes;
    return stats;
}

} // namespace tracesim
