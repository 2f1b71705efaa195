#pragma once

#include "tracesim/epidemic.hpp"
#include "tracesim/netgen.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tracesim {

/// Surveillance proxy for prevalence:
/// ((positives / tests) * (N - ctd) + ctd) / N, with the ratio taken as 0
/// when no test was run.
double positive_rate(std::size_t positives, std::size_t tests, std::size_t ctd, std::size_t N);

/// Estimates above this are reported as Poisson-like.
inline constexpr double dispersion_cap = 1e6;

struct DispersionEstimate {
    /// +infinity when the sample is not overdispersed.
    double k_hat = 0.0;
    double mean_hat = 0.0;
    std::size_t sample_size = 0;

    bool poisson_like() const;
    /// k_hat clamped to dispersion_cap, for averaging.
    double capped() const;
};

/// Negative-binomial MLE of the dispersion with the mean profiled at the
/// sample mean; 1-D search over log k in [1e-4, 1e6].
DispersionEstimate estimate_dispersion(std::span<const std::size_t> counts);

/// Pearson correlation; nullopt for constant or too-short (< 3) series.
std::optional<double> daily_correlation(std::span<const double> positive_rates,
                                        std::span<const double> infection_ratios);

enum class ThreatBasis { actual, confirmed_counts, positive_rate_all, positive_rate_rt_only };

std::string_view to_string(ThreatBasis basis);

struct ThreatSeries {
    std::vector<int> daily_level;
    ThreatBasis basis = ThreatBasis::actual;

    int max_level() const;
};

/// Level 1..5 for a 14-day incidence per 100,000; bands are half-open:
/// [0,25) [25,50) [50,150) [150,250) [250,inf).
int threat_level(double cases_per_100k);

/// Trailing 14-day window of new infections, scaled to 100,000 people.
ThreatSeries threat_levels(std::span<const double> new_infections_per_day, std::size_t N);

/// Threat levels as an observer would infer them from testing data.
/// confirmed_counts: daily positives (tests + hospitalisations) as new cases.
/// positive_rate_all / _rt_only: prevalence = rate * N, new cases = the
/// day-on-day increase of that prevalence, floored at 0.
ThreatSeries inferred_threat_levels(const Trajectory& traj, ThreatBasis basis, std::size_t N);

/// Ever-infected share of the population living in the top_n largest
/// connected components (all components when there are fewer).
double community_infection(const ContactNetwork& net, std::span<const Compartment> final_states,
                           std::size_t top_n);
double community_infection(const ComponentIndex& components, std::span<const Compartment> final_states,
                           std::size_t top_n);

/// Day of the last transmission event; 0 if no transmission happened.
int days_to_end(const Trajectory& traj);

std::vector<double> positive_rate_series(const Trajectory& traj);
std::vector<double> rt_positive_rate_series(const Trajectory& traj);
/// Currently infected (E + I) fraction per day.
std::vector<double> infection_ratio_series(const Trajectory& traj);

} // namespace tracesim
