#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "memsched/channel.hpp"
#include "memsched/rng.hpp"

namespace memsched {

// Analytic objects used to validate the simulator and the closed forms;
// deliberately independent of the policy/simulator code paths.

struct DwellPmf {
    std::vector<double> pmf; // index j-1 holds P(L = j), j = 1..j_max
    double tail = 0.0;       // mass beyond j_max
    double mean = 0.0;       // E[L] = 1 + P01^(M)/P10
};

// dwell-time law of one round-robin visit among M channels:
//   P(L=1) = 1 - P01^(M),  P(L=j) = P01^(M) P11^(j-2) P10 for j >= 2
DwellPmf analytic_dwell_pmf(const ChannelParams& p, int m, int j_max);

// (q01(t), q11(t)) of the dominated non-stationary chain
using QSchedule = std::function<std::pair<double, double>(std::uint64_t)>;

struct CouplingResult {
    double pi_y = 0.0; // fraction of time Y(t) = 1
    double pi_x = 0.0; // stationary P(X = 1) of the dominating chain
    double se = 0.0;   // batch-means standard error of pi_y
};

// Simulate Y(t) under Q(t) with Q01(t) <= P01 and Q11(t) <= P11 (validated
// each slot); the dominating stationary chain satisfies pi_Y <= pi_X.
CouplingResult coupling_experiment(const ChannelParams& p, const QSchedule& q,
                                   std::uint64_t horizon, Rng& rng);

// conditional law of I_n given the history (I_1..I_{n-1})
using ConditionalLaw = std::function<double(const std::vector<std::uint8_t>&)>;

struct CoupledSequences {
    std::vector<std::uint8_t> base;      // I_n ~ conditional law
    std::vector<std::uint8_t> augmented; // I^_n >= I_n, i.i.d. Bernoulli(p_cap)
};

// Stochastic coupling of binary sequences: whenever I_n = 0 the augmented
// variable flips to 1 with probability (p_cap - p_n)/(1 - p_n), which makes
// the augmented sequence i.i.d. Bernoulli(p_cap) while dominating the base
// pointwise.  Requires conditional_p(history) <= p_cap on every path.
CoupledSequences coupled_binary_sampler(const ConditionalLaw& conditional_p, double p_cap,
                                        std::size_t n, Rng& rng);

// channel to serve in each slot
using SelectionSequence = std::function<int(std::uint64_t)>;

struct FictitiousResult {
    double sum_throughput = 0.0;
    double se = 0.0; // batch-means standard error of the sum rate
    std::vector<double> per_channel;
};

// Two-mode bounding chain per channel: serving in M1 succeeds w.p. P11,
// in M2 w.p. pi_ON; success moves to / keeps M1, failure drops to M2, and
// idle channels keep their mode.  Best fixed channel attains max_n c_{n,inf}.
FictitiousResult fictitious_channel_sim(const std::vector<ChannelParams>& channels,
                                        const SelectionSequence& select,
                                        std::uint64_t horizon, Rng& rng);

int best_fixed_channel(const std::vector<ChannelParams>& channels);

struct DominancePair {
    std::vector<double> real;
    std::vector<double> fict;
    std::vector<double> se; // per-channel combined standard error
};

// Drive the real (belief-tracked) and fictitious systems with the same
// channel-selection sequence and common random numbers; the fictitious
// per-channel throughput dominates up to statistical noise.
DominancePair real_vs_fictitious(const std::vector<ChannelParams>& channels,
                                 const SelectionSequence& select, std::uint64_t horizon,
                                 Rng& rng);

// Inductive construction of the per-round selection probabilities alpha from
// time fractions beta and round lengths chi; independent oracle for the
// closed-form conversion.  Zero beta entries yield zero alpha entries.
std::vector<double> recursive_beta_to_alpha(const std::vector<double>& beta,
                                            const std::vector<double>& chi);

} // namespace memsched
