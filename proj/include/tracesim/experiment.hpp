#pragma once

#include "tracesim/epidemic.hpp"
#include "tracesim/interventions.hpp"
#include "tracesim/netgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tracesim {

/// Parameters of a known disease.
struct DiseasePreset {
    std::string name;
    Model model = Model::SIR;
    double R0 = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    /// 0 for SIR presets.
    double kappa = 0.0;
    double p_H = 0.0;
    double k = 0.0;
};

/// covid19, sars, h1n1, ebola, measles.
DiseasePreset load_preset(std::string_view name);
std::vector<std::string> preset_names();

/// One point of the sweep grid.
struct Cell {
    Model model = Model::SIR;
    NetworkKind network_kind = NetworkKind::superspreading;
    std::size_t N = 10000;
    std::size_t I0 = 10;
    double beta = 0.6;
    double gamma = 0.05;
    double kappa = 0.2;
    double R0 = 2.5;
    double k = 0.1;
    double p_H = 0.05;
    Strategy strategy = Strategy::none;
    std::size_t daily_tests = 0;
    bool mixed = false;
    double P_c = 1.0;
    double P_q = 1.0;

    EpidemicParams epidemic() const;
    InterventionPlan plan() const;
    /// Identifies the network population of the cell; cells that differ only
    /// in epidemic or intervention settings share networks and run seeds.
    std::string network_key() const;
    std::string key() const;
};

bool cell_less(const Cell& a, const Cell& b);

/// Sweep definition. Grid fields take comma-separated lists in config files;
/// the cartesian product forms the cells.
struct ExperimentSpec {
    std::vector<std::size_t> N{100000};
    std::vector<std::size_t> I0{10};
    std::vector<double> beta{0.6};
    std::vector<double> gamma{0.05};
    std::vector<double> kappa{0.2};
    std::vector<double> R0{2.5};
    std::vector<double> k{0.1};
    std::vector<double> p_H{0.05};
    std::vector<std::size_t> daily_tests{0};
    std::vector<Strategy> strategy{Strategy::none};
    std::vector<NetworkKind> network_kind{NetworkKind::superspreading};
    std::vector<Model> model{Model::SIR};

    bool mixed = false;
    double P_c = 1.0;
    double P_q = 1.0;
    std::size_t networks_per_cell = 15;
    std::size_t replicas_per_network = 30;
    std::uint64_t base_seed = 1;
    std::string output_dir = "results";
    std::size_t parallel = 1;
    bool emit_trajectories = false;
    double tail_mass = default_tail_mass;
    std::size_t first_m = 100;
    std::size_t top_communities = 5;

    /// Workstation-sized defaults: N = 10000, 5 networks x 6 replicas.
    static ExperimentSpec desk_profile();

    /// Sets one field from its config-file spelling.
    void set(std::string_view key, std::string_view value);
    void apply_preset(const DiseasePreset& preset);
    void validate() const;
    std::vector<Cell> cells() const;

    /// Canonical `key=value` text; parsing it back yields an identical spec.
    std::string dump() const;
    /// Applies the keys found in `in` on top of `base`.
    static ExperimentSpec parse(std::istream& in);
    static ExperimentSpec parse(std::istream& in, ExperimentSpec base);
    static ExperimentSpec parse_file(const std::string& path);
    static ExperimentSpec parse_file(const std::string& path, ExperimentSpec base);

    static const std::vector<std::string_view>& keys();

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

} // namespace tracesim
