#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace memsched::stats {

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs); // unbiased

// total variation distance 0.5 * sum |p_i - q_i| over aligned buckets
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

// lag-1 sample autocorrelation
double lag1_autocorr(const std::vector<double>& xs);

// standard error of the overall mean estimated from batch means; robust to
// short-range dependence when batches are long
double batch_se(const std::vector<double>& xs, std::size_t n_batches = 100);

struct SlopeFit {
    double slope = 0.0;
    double se = 0.0;
};

// OLS slope of y against equally spaced x (spacing dx), classic iid-error SE
SlopeFit regress_slope(const std::vector<double>& y, double dx);

// chi-square statistic of a 2x2 contingency table (1 degree of freedom)
double chi2_2x2(std::uint64_t n00, std::uint64_t n01, std::uint64_t n10, std::uint64_t n11);

// Operational strong-stability assessment of a total-backlog series:
//  - plateau: mean over the last decile within 10% of the mean over the
//    middle decile [0.45T, 0.55T)
//  - trend: OLS slope over batch means of the second half; 99% CI
struct StabilityReport {
    double mid_mean = 0.0;
    double last_decile_mean = 0.0;
    double slope = 0.0;       // backlog packets per sample step
    double slope_se = 0.0;
    bool plateaued = false;
    bool slope_ci_has_zero = false;
    bool slope_positive = false; // slope significantly > 0 at 99%
    bool stable = false;         // plateaued && slope_ci_has_zero
};

StabilityReport assess_stability(const std::vector<double>& backlog_series);

} // namespace memsched::stats
