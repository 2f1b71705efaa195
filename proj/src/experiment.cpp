#include "tracesim/experiment.hpp"

#include "text_util.hpp"
#include "tracesim/error.hpp"

#include <fstream>
#include <sstream>
#include <tuple>
#include <utility>

namespace tracesim {

using detail::format_double;

// --- presets ---------------------------------------------------------------

namespace {

const std::vector<DiseasePreset>& preset_table()
{
    static const std::vector<DiseasePreset> table{
        {"covid19", Model::SEIR, 2.5, 1.0, 0.4, 0.2, 0.008372, 0.1},
        {"sars", Model::SEIR, 1.2, 0.15, 0.125, 0.1, 0.333, 0.16},
        {"h1n1", Model::SIR, 1.33, 0.19, 0.143, 0.0, 0.294, 8.092},
        {"ebola", Model::SEIR, 1.4, 0.2, 0.143, 0.2, 0.0, 0.18},
        {"measles", Model::SIR, 18.0, 4.932, 0.274, 0.0, 0.079, 0.32},
    };
    return table;
}

} // namespace

DiseasePreset load_preset(std::string_view name)
{
    for (const auto& p : preset_table())
        if (p.name == name)
            return p;
    std::string valid;
    for (const auto& p : preset_table())
        valid += (valid.empty() ? "" : ", ") + p.name;
    throw ParameterError("unknown preset '" + std::string(name) + "'; valid presets: " + valid);
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& p : preset_table())
        names.push_back(p.name);
    return names;
}

// --- Cell ------------------------------------------------------------------

EpidemicParams Cell::epidemic() const
{
    EpidemicParams p;
    p.model = model;
    p.beta = beta;
    p.gamma = gamma;
    p.kappa = kappa;
    p.p_H = p_H;
    p.I0 = I0;
    return p;
}

InterventionPlan Cell::plan() const
{
    InterventionPlan plan;
    plan.strategy = strategy;
    plan.daily_tests = daily_tests;
    plan.P_c = P_c;
    plan.P_q = P_q;
    plan.mixed_rt_share = mixed ? mixed_rt_share(daily_tests) : 0;
    return plan;
}

std::string Cell::network_key() const
{
    std::string key = std::string(to_string(network_kind)) + "|N=" + std::to_string(N) +
                      "|R0=" + format_double(R0) + "|beta=" + format_double(beta) +
                      "|gamma=" + format_double(gamma);
    if (network_kind != NetworkKind::erdos_renyi)
        key += "|k=" + format_double(k);
    return key;
}

std::string Cell::key() const
{
    return network_key() + "|model=" + std::string(to_string(model)) + "|I0=" + std::to_string(I0) +
           "|kappa=" + format_double(kappa) + "|p_H=" + format_double(p_H) +
           "|strategy=" + std::string(to_string(strategy)) + "|daily_tests=" + std::to_string(daily_tests) +
           "|mixed=" + (mixed ? "1" : "0") + "|P_c=" + format_double(P_c) + "|P_q=" + format_double(P_q);
}

bool cell_less(const Cell& a, const Cell& b)
{
    const auto tie = [](const Cell& c) {
        return std::make_tuple(c.model, c.network_kind, c.N, c.I0, c.beta, c.gamma, c.kappa, c.R0, c.k,
                               c.p_H, c.strategy, c.mixed, c.daily_tests, c.P_c, c.P_q);
    };
    return tie(a) < tie(b);
}

// --- ExperimentSpec --------------------------------------------------------

ExperimentSpec ExperimentSpec::desk_profile()
{
    ExperimentSpec spec;
    spec.N = {10000};
    spec.networks_per_cell = 5;
    spec.replicas_per_network = 6;
    return spec;
}

const std::vector<std::string_view>& ExperimentSpec::keys()
{
    static const std::vector<std::string_view> k{
        "model", "network_kind", "N", "I0", "beta", "gamma", "kappa", "R0", "k", "p_H",
        "strategy", "daily_tests", "mixed", "P_c", "P_q", "networks_per_cell",
        "replicas_per_network", "base_seed", "output_dir", "parallel", "emit_trajectories",
        "tail_mass", "first_m", "top_communities"};
    return k;
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view value, std::string_view key, Parse parse)
{
    std::vector<T> out;
    for (auto item : detail::split(value, ','))
        out.push_back(parse(item, key));
    if (out.empty())
        throw ParameterError("empty list for " + std::string(key));
    return out;
}

std::vector<double> doubles(std::string_view v, std::string_view key)
{
    return parse_list<double>(v, key, detail::parse_value<double>);
}

std::vector<std::size_t> counts(std::string_view v, std::string_view key)
{
    return parse_list<std::size_t>(v, key, detail::parse_value<std::size_t>);
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F format)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out += ',';
        out += format(values[i]);
    }
    return out;
}

} // namespace

void ExperimentSpec::set(std::string_view key, std::string_view value)
{
    value = detail::trim(value);
    if (key == "model")
        model = parse_list<Model>(value, key, [](std::string_view s, std::string_view) { return parse_model(s); });
    else if (key == "network_kind")
        network_kind = parse_list<NetworkKind>(value, key, [](std::string_view s, std::string_view) {
            return parse_network_kind(s);
        });
    else if (key == "N")
        N = counts(value, key);
    else if (key == "I0")
        I0 = counts(value, key);
    else if (key == "beta")
        beta = doubles(value, key);
    else if (key == "gamma")
        gamma = doubles(value, key);
    else if (key == "kappa")
        kappa = doubles(value, key);
    else if (key == "R0")
        R0 = doubles(value, key);
    else if (key == "k")
        k = doubles(value, key);
    else if (key == "p_H")
        p_H = doubles(value, key);
    else if (key == "strategy")
        strategy = parse_list<Strategy>(value, key, [](std::string_view s, std::string_view) {
            return parse_strategy(s);
        });
    else if (key == "daily_tests")
        daily_tests = counts(value, key);
    else if (key == "mixed")
        mixed = detail::parse_bool(value, key);
    else if (key == "P_c")
        P_c = detail::parse_value<double>(value, key);
    else if (key == "P_q")
        P_q = detail::parse_value<double>(value, key);
    else if (key == "networks_per_cell")
        networks_per_cell = detail::parse_value<std::size_t>(value, key);
    else if (key == "replicas_per_network")
        replicas_per_network = detail::parse_value<std::size_t>(value, key);
    else if (key == "base_seed")
        base_seed = detail::parse_value<std::uint64_t>(value, key);
    else if (key == "output_dir")
        output_dir = std::string(value);
    else if (key == "parallel")
        parallel = detail::parse_value<std::size_t>(value, key);
    else if (key == "emit_trajectories")
        emit_trajectories = detail::parse_bool(value, key);
    else if (key == "tail_mass")
        tail_mass = detail::parse_value<double>(value, key);
    else if (key == "first_m")
        first_m = detail::parse_value<std::size_t>(value, key);
    else if (key == "top_communities")
        top_communities = detail::parse_value<std::size_t>(value, key);
    else
        throw ParameterError("unknown config key '" + std::string(key) + "'");
}

void ExperimentSpec::apply_preset(const DiseasePreset& preset)
{
    model = {preset.model};
    R0 = {preset.R0};
    beta = {preset.beta};
    gamma = {preset.gamma};
    kappa = {preset.kappa};
    p_H = {preset.p_H};
    k = {preset.k};
}

void ExperimentSpec::validate() const
{
    const auto require = [](bool ok, const std::string& message) {
        if (!ok)
            throw ParameterError(message);
    };
    const auto nonempty = [&](bool empty, const char* key) { require(!empty, std::string(key) + " is empty"); };
    nonempty(N.empty(), "N");
    nonempty(I0.empty(), "I0");
    nonempty(beta.empty(), "beta");
    nonempty(gamma.empty(), "gamma");
    nonempty(kappa.empty(), "kappa");
    nonempty(R0.empty(), "R0");
    nonempty(k.empty(), "k");
    nonempty(p_H.empty(), "p_H");
    nonempty(daily_tests.empty(), "daily_tests");
    nonempty(strategy.empty(), "strategy");
    nonempty(network_kind.empty(), "network_kind");
    nonempty(model.empty(), "model");

    for (auto n : N)
        require(n >= 2, "N must be >= 2");
    for (auto i0 : I0)
        for (auto n : N)
            require(i0 <= n, "I0 exceeds N");
    for (double v : beta)
        require(std::isfinite(v) && v > 0.0, "beta must be > 0");
    for (double v : gamma)
        require(std::isfinite(v) && v > 0.0, "gamma must be > 0");
    for (double v : kappa)
        require(std::isfinite(v) && v >= 0.0, "kappa must be >= 0");
    for (double v : R0)
        require(std::isfinite(v) && v > 0.0, "R0 must be > 0");
    for (double v : k)
        require(std::isfinite(v) && v > 0.0, "k must be > 0");
    for (double v : p_H)
        require(v >= 0.0 && v < 1.0, "p_H must lie in [0, 1)");
    for (auto m : model)
        if (m == Model::SEIR)
            for (double v : kappa)
                require(v > 0.0, "SEIR needs kappa > 0");
    require(P_c >= 0.0 && P_c <= 1.0, "P_c must lie in [0, 1]");
    require(P_q >= 0.0 && P_q <= 1.0, "P_q must lie in [0, 1]");
    require(networks_per_cell >= 1, "networks_per_cell must be >= 1");
    require(replicas_per_network >= 1, "replicas_per_network must be >= 1");
    require(parallel >= 1, "parallel must be >= 1");
    require(tail_mass > 0.0 && tail_mass <= 1e-6, "tail_mass must lie in (0, 1e-6]");
    require(first_m >= 2, "first_m must be >= 2");
    require(top_communities >= 1, "top_communities must be >= 1");
    require(!output_dir.empty(), "output_dir is empty");
}

std::vector<Cell> ExperimentSpec::cells() const
{
    std::vector<Cell> out;
    for (auto m : model)
        for (auto kind : network_kind)
            for (auto n : N)
                for (auto i0 : I0)
                    for (double b : beta)
                        for (double g : gamma)
                            for (double kap : kappa)
                                for (double r0 : R0)
                                    for (double disp : k)
                                        for (double ph : p_H)
                                            for (auto s : strategy)
                                                for (auto t : daily_tests) {
                                                    Cell c;
                                                    c.model = m;
                                                    c.network_kind = kind;
                                                    c.N = n;
                                                    c.I0 = i0;
                                                    c.beta = b;
                                                    c.gamma = g;
                                                    c.kappa = kap;
                                                    c.R0 = r0;
                                                    c.k = disp;
                                                    c.p_H = ph;
                                                    c.strategy = s;
                                                    c.daily_tests = t;
                                                    c.mixed = mixed;
                                                    c.P_c = P_c;
                                                    c.P_q = P_q;
                                                    out.push_back(c);
                                                }
    return out;
}

std::string ExperimentSpec::dump() const
{
    const auto num = [](auto v) { return std::to_string(v); };
    std::ostringstream out;
    out << "model=" << join(model, [](Model m) { return std::string(to_string(m)); }) << '\n';
    out << "network_kind=" << join(network_kind, [](NetworkKind n) { return std::string(to_string(n)); }) << '\n';
    out << "N=" << join(N, num) << '\n';
    out << "I0=" << join(I0, num) << '\n';
    out << "beta=" << join(beta, format_double) << '\n';
    out << "gamma=" << join(gamma, format_double) << '\n';
    out << "kappa=" << join(kappa, format_double) << '\n';
    out << "R0=" << join(R0, format_double) << '\n';
    out << "k=" << join(k, format_double) << '\n';
    out << "p_H=" << join(p_H, format_double) << '\n';
    out << "strategy=" << join(strategy, [](Strategy s) { return std::string(to_string(s)); }) << '\n';
    out << "daily_tests=" << join(daily_tests, num) << '\n';
    out << "mixed=" << (mixed ? "true" : "false") << '\n';
    out << "P_c=" << format_double(P_c) << '\n';
    out << "P_q=" << format_double(P_q) << '\n';
    out << "networks_per_cell=" << networks_per_cell << '\n';
    out << "replicas_per_network=" << replicas_per_network << '\n';
    out << "base_seed=" << base_seed << '\n';
    out << "output_dir=" << output_dir << '\n';
    out << "parallel=" << parallel << '\n';
    out << "emit_trajectories=" << (emit_trajectories ? "true" : "false") << '\n';
    out << "tail_mass=" << format_double(tail_mass) << '\n';
    out << "first_m=" << first_m << '\n';
    out << "top_communities=" << top_communities << '\n';
    return out.str();
}

ExperimentSpec ExperimentSpec::parse(std::istream& in)
{
    return parse(in, ExperimentSpec{});
}

ExperimentSpec ExperimentSpec::parse(std::istream& in, ExperimentSpec base)
{
    ExperimentSpec spec = std::move(base);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto text = detail::trim(line);
        if (text.empty() || text.front() == '#')
            continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw FormatError("config line " + std::to_string(line_no) + ": expected key=value");
        try {
            spec.set(detail::trim(text.substr(0, eq)), text.substr(eq + 1));
        } catch (const ParameterError& e) {
            throw ParameterError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return spec;
}

ExperimentSpec ExperimentSpec::parse_file(const std::string& path)
{
    return parse_file(path, ExperimentSpec{});
}

ExperimentSpec ExperimentSpec::parse_file(const std::string& path, ExperimentSpec base)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config '" + path + "'");
    return parse(in, std::move(base));
}

} // namespace tracesim
