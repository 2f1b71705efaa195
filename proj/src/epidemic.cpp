#include "tracesim/epidemic.hpp"

#include "tracesim/error.hpp"
#include "tracesim/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace tracesim {

std::string_view to_string(Model m)
{
    return m == Model::SIR ? "SIR" : "SEIR";
}

Model parse_model(std::string_view name)
{
    if (name == "SIR" || name == "sir")
        return Model::SIR;
    if (name == "SEIR" || name == "seir")
        return Model::SEIR;
    throw ParameterError("unknown model '" + std::string(name) + "' (expected SIR|SEIR)");
}

double hospitalization_rate(double p_H, double gamma)
{
    if (!(p_H >= 0.0 && p_H < 1.0))
        throw ParameterError("p_H must lie in [0, 1)");
    if (!(std::isfinite(gamma) && gamma > 0.0))
        throw ParameterError("gamma must be finite and > 0");
    return gamma * p_H / (1.0 - p_H);
}

void EpidemicParams::validate() const
{
    if (!(std::isfinite(beta) && beta >= 0.0))
        throw ParameterError("beta must be finite and >= 0");
    if (model == Model::SEIR && !(std::isfinite(kappa) && kappa > 0.0))
        throw ParameterError("SEIR needs a finite kappa > 0");
    (void)eta();
}

namespace {

/// Complete binary sum tree over per-node event rates. Internal nodes are
/// recomputed from their children on every update, so totals never drift.
class RateTree {
public:
    explicit RateTree(std::size_t n) : leaves_(std::bit_ceil(std::max<std::size_t>(n, 1))), tree_(2 * leaves_, 0.0) {}

    void set(std::size_t i, double rate)
    {
        std::size_t pos = leaves_ + i;
        if (tree_[pos] == rate)
            return;
        tree_[pos] = rate;
        for (pos /= 2; pos >= 1; pos /= 2)
            tree_[pos] = tree_[2 * pos] + tree_[2 * pos + 1];
    }

    double get(std::size_t i) const { return tree_[leaves_ + i]; }
    double total() const { return tree_[1]; }

    /// `u` uniform in [0, total()).
    std::size_t sample(double u) const
    {
        std::size_t pos = 1;
        while (pos < leaves_) {
            const double left = tree_[2 * pos];
            const double right = tree_[2 * pos + 1];
            if ((u < left && left > 0.0) || right <= 0.0) {
                pos = 2 * pos;
            } else {
                u -= left;
                pos = 2 * pos + 1;
            }
        }
        return pos - leaves_;
    }

private:
    std::size_t leaves_;
    std::vector<double> tree_;
};

class Engine {
public:
    Engine(const ContactNetwork& net, const EpidemicParams& params, const InterventionPlan& plan,
           std::uint64_t seed, const RunOptions& options)
        : net_(net), params_(params), plan_(plan), rng_(make_rng(seed)), eta_(params.eta()),
          state_(net.node_count()), tree_(net.node_count()), susceptible_neighbors_(net.node_count()),
          secondary_(net.node_count(), 0)
    {
        state_.record_events = options.record_events;
        for (NodeId v = 0; v < net.node_count(); ++v)
            susceptible_neighbors_[v] = static_cast<std::uint32_t>(net.degree(v));
    }

    Trajectory run(const std::vector<NodeId>& initial_infected)
    {
        seed_infections(initial_infected);
        double t = 0.0;
        int day = 0;
        state_.day = 0;
        while (state_.count(Compartment::E) + state_.count(Compartment::I) > 0) {
            const double total = tree_.total();
            if (!(total > 0.0))
                break;
            const double dt = std::exponential_distribution<double>(total)(rng_);
            const double boundary = static_cast<double>(day + 1);
            if (t + dt >= boundary) {
                t = boundary;
                close_day(day, true);
                state_.day = ++day;
                continue;
            }
            t += dt;
            fire(t);
        }
        close_day(day, false);
        return finish();
    }

private:
    double infection_rate(NodeId v) const
    {
        return net_.has_infection_rates() ? net_.infection_rates()[v] : params_.beta;
    }

    double node_rate(NodeId v) const
    {
        switch (state_.compartment[v]) {
        case Compartment::I: {
            const double spread = state_.active[v] ? infection_rate(v) * susceptible_neighbors_[v] : 0.0;
            return spread + params_.gamma + eta_;
        }
        case Compartment::E:
            return params_.kappa;
        default:
            return 0.0;
        }
    }

    void refresh(NodeId v) { tree_.set(v, node_rate(v)); }

    void log(double t, NodeId v, Transition tr, NodeId source = kNoNode)
    {
        if (state_.record_events)
            state_.event_log.push_back({t, v, tr, source});
    }

    void seed_infections(const std::vector<NodeId>& chosen)
    {
        const std::size_t n = net_.node_count();
        if (!chosen.empty()) {
            for (NodeId v : chosen) {
                if (v >= n)
                    throw ParameterError("initial infected node out of range");
                if (state_.compartment[v] != Compartment::S)
                    throw ParameterError("initial infected node listed twice");
                infect(v, kNoNode, 0.0, Compartment::I);
            }
            return;
        }
        if (params_.I0 > n)
            throw ParameterError("I0 exceeds the node count");
        std::vector<NodeId> nodes(n);
        std::iota(nodes.begin(), nodes.end(), NodeId{0});
        for (std::size_t i = 0; i < params_.I0; ++i) {
            const auto j = std::uniform_int_distribution<std::size_t>(i, n - 1)(rng_);
            std::swap(nodes[i], nodes[j]);
            infect(nodes[i], kNoNode, 0.0, Compartment::I);
        }
    }

    void infect(NodeId target, NodeId source, double t, Compartment into)
    {
        state_.set_compartment(target, into);
        state_.infector[target] = source;
        state_.infection_time[target] = t;
        state_.infection_order.push_back(target);
        if (source != kNoNode)
            ++secondary_[source];
        ++new_infections_;
        last_infection_time_ = t;
        log(t, target, Transition::infection, source);
        for (NodeId nb : net_.neighbors(target)) {
            --susceptible_neighbors_[nb];
            if (state_.compartment[nb] == Compartment::I)
                refresh(nb);
        }
        refresh(target);
    }

    NodeId pick_susceptible_neighbor(NodeId v)
    {
        auto nth = std::uniform_int_distribution<std::uint32_t>(0, susceptible_neighbors_[v] - 1)(rng_);
        for (NodeId nb : net_.neighbors(v)) {
            if (state_.compartment[nb] != Compartment::S)
                continue;
            if (nth-- == 0)
                return nb;
        }
        throw std::logic_error("susceptible neighbour count out of sync");
    }

    void fire(double t)
    {
        const NodeId v = static_cast<NodeId>(tree_.sample(uniform01(rng_) * tree_.total()));
        const double rate = tree_.get(v);
        double u = uniform01(rng_) * rate;

        if (state_.compartment[v] == Compartment::E) {
            state_.set_compartment(v, Compartment::I);
            log(t, v, Transition::activation);
            refresh(v);
            return;
        }

        const double spread = state_.active[v] ? infection_rate(v) * susceptible_neighbors_[v] : 0.0;
        if (u < spread && susceptible_neighbors_[v] > 0) {
            const NodeId target = pick_susceptible_neighbor(v);
            infect(target, v, t, params_.model == Model::SEIR ? Compartment::E : Compartment::I);
            return;
        }
        u -= spread;
        if (u < params_.gamma || eta_ <= 0.0) {
            state_.set_compartment(v, Compartment::R);
            log(t, v, Transition::recovery);
            refresh(v);
            return;
        }

        state_.set_compartment(v, Compartment::H);
        log(t, v, Transition::hospitalization);
        refresh(v);
        // Hospitalised cases are confirmed without a test and traced.
        const bool was_active = state_.active[v] != 0;
        if (confirm_case(state_, net_, plan_, rng_, v, true, nullptr))
            ++hospital_confirmations_;
        else
            state_.quarantine(v);
        if (was_active)
            log(t, v, Transition::quarantine);
    }

    void close_day(int day, bool run_interventions)
    {
        DailyRecord rec;
        rec.day = day;
        rec.new_infections = new_infections_;
        rec.hospital_confirmations = hospital_confirmations_;
        new_infections_ = 0;
        hospital_confirmations_ = 0;
        rec.ctd = state_.confirmed_unrecovered;
        if (run_interventions) {
            const TestOutcome outcome = daily_step(state_, net_, plan_, rng_);
            for (NodeId v : outcome.quarantined_nodes) {
                log(static_cast<double>(day + 1), v, Transition::quarantine);
                refresh(v);
            }
            rec.tests_used = outcome.tests_used;
            rec.test_positives = outcome.positives;
            rec.rt_tests = outcome.rt_tests;
            rec.rt_positives = outcome.positives_by_rt;
            rec.ctd = outcome.ctd_before;
        }
        rec.counts = state_.counts;
        rec.quarantined_cumulative = state_.quarantined_total;
        daily_.push_back(rec);
    }

    Trajectory finish()
    {
        Trajectory traj;
        traj.node_count = net_.node_count();
        traj.daily = std::move(daily_);
        traj.final_infected_total = net_.node_count() - state_.count(Compartment::S);
        traj.infections.reserve(state_.infection_order.size());
        bool any_transmission = false;
        for (NodeId v : state_.infection_order) {
            traj.infections.push_back({v, state_.infection_time[v], state_.infector[v], secondary_[v]});
            any_transmission |= state_.infector[v] != kNoNode;
        }
        traj.days_to_end = any_transmission ? static_cast<int>(std::floor(last_infection_time_)) : 0;
        traj.final_compartments = std::move(state_.compartment);
        traj.events = std::move(state_.event_log);
        return traj;
    }

    const ContactNetwork& net_;
    const EpidemicParams& params_;
    const InterventionPlan& plan_;
    Rng rng_;
    double eta_;
    SimulationState state_;
    RateTree tree_;
    std::vector<std::uint32_t> susceptible_neighbors_;
    std::vector<std::size_t> secondary_;
    std::vector<DailyRecord> daily_;
    std::size_t new_infections_ = 0;
    std::size_t hospital_confirmations_ = 0;
    double last_infection_time_ = 0.0;
};

} // namespace

Trajectory run_epidemic(const ContactNetwork& net, const EpidemicParams& params,
                        const InterventionPlan& plan, std::uint64_t seed, const RunOptions& options)
{
    params.validate();
    plan.validate();
    if (net.kind() == NetworkKind::gamma_infectiousness && !net.has_infection_rates())
        throw ParameterError("gamma_infectiousness network without per-node rates");
    Engine engine(net, params, plan, seed, options);
    return engine.run(options.initial_infected);
}

std::vector<std::size_t> secondary_infection_counts(const Trajectory& traj, std::size_t first_m)
{
    if (first_m == 0)
        throw ParameterError("first_m must be >= 1");
    const std::size_t m = std::min(first_m, traj.infections.size());
    std::vector<std::size_t> counts(m);
    for (std::size_t i = 0; i < m; ++i)
        counts[i] = traj.infections[i].secondary;
    return counts;
}

} // namespace tracesim
