#include "tracesim/metrics.hpp"

#include "tracesim/error.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace tracesim {

double positive_rate(std::size_t positives, std::size_t tests, std::size_t ctd, std::size_t N)
{
    if (N == 0)
        throw ParameterError("positive_rate needs N > 0");
    if (positives > tests)
        throw ParameterError("positives exceed tests");
    if (ctd > N)
        throw ParameterError("ctd exceeds N");
    const double ratio = tests > 0 ? static_cast<double>(positives) / static_cast<double>(tests) : 0.0;
    return (ratio * static_cast<double>(N - ctd) + static_cast<double>(ctd)) / static_cast<double>(N);
}

// --- dispersion ------------------------------------------------------------

bool DispersionEstimate::poisson_like() const
{
    return !(k_hat < dispersion_cap);
}

double DispersionEstimate::capped() const
{
    return std::min(k_hat, dispersion_cap);
}

DispersionEstimate estimate_dispersion(std::span<const std::size_t> counts)
{
    if (counts.size() < 2)
        throw ParameterError("dispersion estimate needs at least 2 counts");

    std::map<std::size_t, std::size_t> histogram;
    double sum = 0.0;
    for (auto c : counts) {
        ++histogram[c];
        sum += static_cast<double>(c);
    }
    const double n = static_cast<double>(counts.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (auto [value, freq] : histogram) {
        const double d = static_cast<double>(value) - mean;
        ss += static_cast<double>(freq) * d * d;
    }
    const double variance = ss / n;

    DispersionEstimate est{std::numeric_limits<double>::infinity(), mean, counts.size()};
    if (mean <= 0.0 || variance <= mean)
        return est;

    // Negative profile log-likelihood in x = log k, constants dropped.
    const auto objective = [&](double x) {
        const double k = std::exp(x);
        double ll = n * (k * std::log(k / (k + mean)) - std::lgamma(k)) + sum * std::log(mean / (k + mean));
        for (auto [value, freq] : histogram)
            ll += static_cast<double>(freq) * std::lgamma(static_cast<double>(value) + k);
        return -ll;
    };

    const double lo = std::log(1e-4);
    const double hi = std::log(dispersion_cap);
    constexpr int grid = 80;
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double v = objective(lo + (hi - lo) * i / grid);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    const double a = lo + (hi - lo) * std::max(best - 1, 0) / grid;
    const double b = lo + (hi - lo) * std::min(best + 1, grid) / grid;
    const auto [x, value] = boost::math::tools::brent_find_minima(objective, a, b, 40);
    (void)value;
    if (x >= hi - 1e-6)
        return est;
    est.k_hat = std::exp(x);
    return est;
}

std::optional<double> daily_correlation(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size())
        throw ParameterError("correlation series differ in length");
    const std::size_t n = xs.size();
    if (n < 3)
        return std::nullopt;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// --- threat levels ---------------------------------------------------------

std::string_view to_string(ThreatBasis basis)
{
    switch (basis) {
    case ThreatBasis::actual: return "actual";
    case ThreatBasis::confirmed_counts: return "confirmed_counts";
    case ThreatBasis::positive_rate_all: return "positive_rate_all";
    case ThreatBasis::positive_rate_rt_only: return "positive_rate_rt_only";
    }
    return "unknown";
}

int ThreatSeries::max_level() const
{
    return daily_level.empty() ? 1 : *std::max_element(daily_level.begin(), daily_level.end());
}

int threat_level(double cases_per_100k)
{
    if (cases_per_100k < 25.0)
        return 1;
    if (cases_per_100k < 50.0)
        return 2;
    if (cases_per_100k < 150.0)
        return 3;
    if (cases_per_100k < 250.0)
        return 4;
    return 5;
}

ThreatSeries threat_levels(std::span<const double> new_infections_per_day, std::size_t N)
{
    if (N == 0)
        throw ParameterError("threat levels need N > 0");
    constexpr std::size_t window = 14;
    const double scale = 100000.0 / static_cast<double>(N);
    ThreatSeries series;
    series.daily_level.reserve(new_infections_per_day.size());
    // The window is summed afresh each day: inferred series carry fractions
    // and a running sum would drift across band boundaries.
    for (std::size_t d = 0; d < new_infections_per_day.size(); ++d) {
        double sum = 0.0;
        for (std::size_t j = d + 1 > window ? d + 1 - window : 0; j <= d; ++j)
            sum += new_infections_per_day[j];
        series.daily_level.push_back(threat_level(sum * scale));
    }
    return series;
}

namespace {

std::vector<double> differenced_prevalence(const std::vector<double>& rates, std::size_t N)
{
    std::vector<double> incidence(rates.size());
    double previous = 0.0;
    for (std::size_t d = 0; d < rates.size(); ++d) {
        const double prevalence = rates[d] * static_cast<double>(N);
        incidence[d] = std::max(0.0, prevalence - previous);
        previous = prevalence;
    }
    return incidence;
}

} // namespace

ThreatSeries inferred_threat_levels(const Trajectory& traj, ThreatBasis basis, std::size_t N)
{
    std::vector<double> daily(traj.daily.size());
    switch (basis) {
    case ThreatBasis::actual:
        for (std::size_t d = 0; d < daily.size(); ++d)
            daily[d] = static_cast<double>(traj.daily[d].new_infections);
        break;
    case ThreatBasis::confirmed_counts:
        for (std::size_t d = 0; d < daily.size(); ++d)
            daily[d] = static_cast<double>(traj.daily[d].positives_found());
        break;
    case ThreatBasis::positive_rate_all:
        daily = differenced_prevalence(positive_rate_series(traj), N);
        break;
    case ThreatBasis::positive_rate_rt_only: {
        const bool has_rt = std::any_of(traj.daily.begin(), traj.daily.end(),
                                        [](const DailyRecord& r) { return r.rt_tests > 0; });
        if (!has_rt)
            throw ParameterError("trajectory has no random-testing data for the rt-only basis");
        daily = differenced_prevalence(rt_positive_rate_series(traj), N);
        break;
    }
    }
    auto series = threat_levels(daily, N);
    series.basis = basis;
    return series;
}

// --- outcomes --------------------------------------------------------------

double community_infection(const ComponentIndex& components, std::span<const Compartment> final_states,
                           std::size_t top_n)
{
    if (top_n == 0)
        throw ParameterError("top_n must be >= 1");
    if (components.rank_of_node.size() != final_states.size())
        throw ParameterError("final states do not match the network");
    const std::size_t used = std::min(top_n, components.sizes.size());
    if (used == 0)
        return 0.0;
    std::size_t infected = 0;
    for (std::size_t v = 0; v < final_states.size(); ++v)
        if (components.rank_of_node[v] < used && final_states[v] != Compartment::S)
            ++infected;
    std::size_t members = 0;
    for (std::size_t r = 0; r < used; ++r)
        members += components.sizes[r];
    return static_cast<double>(infected) / static_cast<double>(members);
}

double community_infection(const ContactNetwork& net, std::span<const Compartment> final_states,
                           std::size_t top_n)
{
    return community_infection(connected_components(net), final_states, top_n);
}

int days_to_end(const Trajectory& traj)
{
    double last = 0.0;
    for (const auto& rec : traj.infections)
        if (rec.infector != kNoNode)
            last = std::max(last, rec.time);
    return static_cast<int>(std::floor(last));
}

std::vector<double> positive_rate_series(const Trajectory& traj)
{
    std::vector<double> out;
    out.reserve(traj.daily.size());
    for (const auto& r : traj.daily)
        out.push_back(positive_rate(r.test_positives, r.tests_used, r.ctd, traj.node_count));
    return out;
}

std::vector<double> rt_positive_rate_series(const Trajectory& traj)
{
    std::vector<double> out;
    out.reserve(traj.daily.size());
    for (const auto& r : traj.daily)
        out.push_back(positive_rate(r.rt_positives, r.rt_tests, r.ctd, traj.node_count));
    return out;
}

std::vector<double> infection_ratio_series(const Trajectory& traj)
{
    std::vector<double> out;
    out.reserve(traj.daily.size());
    const double n = static_cast<double>(traj.node_count);
    for (const auto& r : traj.daily)
        out.push_back(static_cast<double>(r.count(Compartment::E) + r.count(Compartment::I)) / n);
    return out;
}

} // namespace tracesim
