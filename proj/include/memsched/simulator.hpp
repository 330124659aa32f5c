#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "memsched/channel.hpp"
#include "memsched/policy.hpp"

namespace memsched {

enum class SimMode : std::uint8_t { Saturated, Queued };
enum class ArrivalLaw : std::uint8_t { Bernoulli, TruncatedBinomial };

// i.i.d. bounded arrivals; Bernoulli(lambda) with a_max = 1 by default,
// Binomial(a_max, lambda/a_max) for rates above one packet/slot
struct ArrivalConfig {
    std::vector<double> lambda;
    int a_max = 1;
    ArrivalLaw law = ArrivalLaw::Bernoulli;
};

struct SimConfig {
    std::vector<ChannelParams> channels;
    PolicySpec policy = FixedRRPolicy{ActivationVector::from_mask(1, 1)};
    SimMode mode = SimMode::Saturated;
    std::uint64_t horizon = 1'000'000;
    std::uint64_t burn_in = 10'000; // slots excluded from throughput estimates
    std::uint64_t seed = 1;
    ArrivalConfig arrivals; // queued mode only

    std::uint64_t backlog_cap = 1'000'000'000; // per queue; exceeding it flags overflow
    std::uint64_t series_stride = 1'000;       // backlog sampling period
    bool assertions_on = true;          // throw on belief-floor / dwell violations
    bool debug_belief_tracking = false; // cross-check beliefs against closed form
    bool feedback_on_empty = true;      // empty-queue data slot still elicits ACK/NACK
    bool record_dwell_sequences = false;
    std::optional<BeliefVector> initial_belief; // default: stationary
};

// key: (activation mask of the round, channel)
using DwellKey = std::pair<std::uint64_t, int>;

struct SimMetrics {
    std::uint64_t total_slots = 0;
    std::uint64_t measured_slots = 0;            // total - burn-in
    std::vector<std::uint64_t> delivered;        // per channel, post burn-in
    std::vector<double> throughput;              // delivered[n] / measured_slots
    std::vector<std::uint64_t> final_backlog;

    std::vector<double> backlog_series; // sum backlog sampled every series_stride slots
    std::uint64_t series_stride = 1;

    std::vector<std::uint64_t> series_slots;              // sample instants
    std::vector<std::vector<std::uint64_t>> delivered_series; // cumulative per channel

    std::map<DwellKey, std::vector<std::uint64_t>> dwell_hist; // counts, index L-1
    std::map<DwellKey, std::vector<std::uint32_t>> dwell_seq;  // when recorded

    std::uint64_t rounds = 0;              // completed rounds (RR-family policies)
    double mean_round_length = 0.0;        // E[T] estimate
    std::vector<double> mean_round_reward; // E[R_n] estimates

    std::uint64_t floor_violations = 0;
    bool overflow = false;
};

// Saturated mode: every data transmission carries a packet; per-channel
// throughput converges to the round-robin closed forms.
SimMetrics run_saturated(const SimConfig& config, std::ostream* trace = nullptr);

// Queued mode: exogenous arrivals, queue recursion
// U(t+1) = max[U(t) - mu(t), 0] + a(t); QRR re-selects its activation vector
// at every round boundary from the current backlog.
SimMetrics run_queued(const SimConfig& config, std::ostream* trace = nullptr);

SimMetrics run(const SimConfig& config, std::ostream* trace = nullptr);

// every module precondition the config touches, checked up front; throws
// std::invalid_argument naming the violated invariant
void validate_sim_config(const SimConfig& config);

// independent seeded replications (seed stream = child(seed, rep)), merged by
// the caller; deterministic result order regardless of thread count
std::vector<SimMetrics> run_replicated(const SimConfig& config, unsigned replications,
                                       unsigned threads = 1);

// one-slot queue recursion
inline std::uint64_t queue_step(std::uint64_t u, std::uint64_t mu, std::uint64_t a) {
    return (u > mu ? u - mu : 0) + a;
}

struct DwellPmfEstimate {
    std::vector<double> pmf; // index L-1
    std::uint64_t visits = 0;
};

// empirical dwell pmf for one (activation mask, channel) pair
DwellPmfEstimate collect_dwell_histogram(const SimMetrics& metrics, std::uint64_t mask,
                                         int channel);

} // namespace memsched
