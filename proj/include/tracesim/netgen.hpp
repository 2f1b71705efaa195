#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace tracesim {

using NodeId = std::uint32_t;

enum class NetworkKind { superspreading, erdos_renyi, gamma_infectiousness };

std::string_view to_string(NetworkKind kind);
NetworkKind parse_network_kind(std::string_view name);

/// Epidemic parameters the superspreading degree law is derived from.
struct DispersionParams {
    double k = 1.0;
    double R0 = 1.0;
    double beta = 1.0;
    double gamma = 0.0;
};

/// Probability that an infectious node infects a given neighbour before it
/// recovers: beta / (gamma + beta).
double infection_probability(double beta, double gamma);

/// Truncated degree law over degrees 1..truncation_degree().
///
/// Built either from epidemic parameters (derive_degree_distribution) or from
/// an explicit pmf, the latter mostly for fixed-degree test graphs.
class DegreeDistribution {
public:
    /// `pmf[d]` is the probability of degree d; pmf[0] must be 0. The
    /// vector is renormalised.
    static DegreeDistribution from_pmf(std::vector<double> pmf);

    double probability(std::size_t degree) const
    {
        return degree < pmf_.size() ? pmf_[degree] : 0.0;
    }
    /// Index = degree; entry 0 is always 0.
    std::span<const double> probabilities() const { return pmf_; }
    std::size_t truncation_degree() const { return pmf_.size() - 1; }
    double mean_degree() const { return mean_; }
    double second_moment() const { return second_moment_; }
    /// Only meaningful for distributions obtained from derive_degree_distribution.
    const std::optional<DispersionParams>& params() const { return params_; }

private:
    friend DegreeDistribution derive_degree_distribution(double, double, double, double, double);

    DegreeDistribution(std::vector<double> pmf, std::optional<DispersionParams> params);

    std::vector<double> pmf_;
    double mean_ = 0.0;
    double second_moment_ = 0.0;
    std::optional<DispersionParams> params_;
};

inline constexpr double default_tail_mass = 1e-10;

/// p(i) proportional to NB(i-1 | k, mean = R0 (gamma+beta)/beta) / i, truncated
/// where the NB upper tail drops below `tail_mass` and renormalised.
DegreeDistribution derive_degree_distribution(double k, double R0, double beta, double gamma,
                                              double tail_mass = default_tail_mass);

/// Simple undirected graph in CSR form. Immutable once built.
class ContactNetwork {
public:
    using Edge = std::pair<NodeId, NodeId>;

    /// Self-loops and duplicate edges in `edges` are dropped.
    static ContactNetwork from_edges(std::size_t node_count, std::span<const Edge> edges,
                                     NetworkKind kind,
                                     std::optional<std::vector<double>> infection_rates = std::nullopt);

    std::size_t node_count() const { return offsets_.size() - 1; }
    std::size_t edge_count() const { return targets_.size() / 2; }
    NetworkKind kind() const { return kind_; }

    std::span<const NodeId> neighbors(NodeId node) const
    {
        return {targets_.data() + offsets_[node], targets_.data() + offsets_[node + 1]};
    }
    std::size_t degree(NodeId node) const { return offsets_[node + 1] - offsets_[node]; }

    bool has_infection_rates() const { return !rates_.empty(); }
    /// Per-node infection rates (gamma_infectiousness networks only).
    std::span<const double> infection_rates() const { return rates_; }

    /// All edges as (u, v) with u < v, ascending.
    std::vector<Edge> edges() const;

    friend bool operator==(const ContactNetwork&, const ContactNetwork&) = default;

private:
    ContactNetwork() = default;

    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> targets_;
    NetworkKind kind_ = NetworkKind::superspreading;
    std::vector<double> rates_;
};

struct GenerationStats {
    /// Sampled degrees above N-1 that were clamped.
    std::size_t clamped_degrees = 0;
    std::size_t self_loops_removed = 0;
    std::size_t multi_edges_removed = 0;
};

/// Configuration model: i.i.d. degrees from `dist`, odd stub total repaired
/// on one random node, uniform stub matching, then erasure of self-loops and
/// parallel edges.
ContactNetwork generate_superspreading_network(const DegreeDistribution& dist, std::size_t N,
                                               std::uint64_t seed, GenerationStats* stats = nullptr);

/// G(N, p) with p = R0 (gamma+beta) / (beta (N-1)).
ContactNetwork generate_er_network(double R0, double beta, double gamma, std::size_t N,
                                   std::uint64_t seed);

/// ER topology as generate_er_network plus per-node infection rates drawn
/// from Gamma(shape = k, scale = beta / k).
ContactNetwork generate_gamma_infectiousness_network(double k, double R0, double beta,
                                                     double gamma, std::size_t N,
                                                     std::uint64_t seed);

/// Configuration-model clustering, (<i^2> - <i>)^2 / (N <i>^3).
double expected_clustering_coefficient(const DegreeDistribution& dist, std::size_t N);

/// Connected components ranked by size (descending), ties broken by the
/// smaller lowest node id.
struct ComponentIndex {
    std::vector<std::uint32_t> rank_of_node;
    std::vector<std::size_t> sizes;
};

ComponentIndex connected_components(const ContactNetwork& net);

struct NetworkStats {
    double empirical_mean_degree = 0.0;
    std::map<std::size_t, std::size_t> degree_histogram;
    double clustering_coefficient_expected = 0.0;
    std::vector<std::size_t> component_sizes;
};

NetworkStats network_stats(const ContactNetwork& net);

} // namespace tracesim
