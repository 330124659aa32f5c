#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "memsched/activation.hpp"
#include "memsched/channel.hpp"
#include "memsched/rng.hpp"

namespace memsched {

enum class PacketKind : std::uint8_t { None, Data, Dummy };
enum class Feedback : std::uint8_t { Ack, Nack };

struct SlotAction {
    std::optional<int> served;
    PacketKind kind = PacketKind::None;
};

// Slots since each channel was last served; never-served channels carry the
// sentinel and sort oldest.
inline constexpr std::uint64_t kNeverServed = std::numeric_limits<std::uint64_t>::max();
using AgeVector = std::vector<std::uint64_t>;

// Active channels ordered least-recently-used first; ties (only possible
// among never-served channels) go to the lowest index.
std::vector<int> lru_order(const ActivationVector& phi, const AgeVector& ages);

// State machine for one round of RR(phi).  `draining` marks that the current
// channel has ACKed a data packet and is served until the first NACK;
// otherwise the next slot is the fresh-switch slot of serve_order[position].
struct RoundRobinState {
    ActivationVector phi;
    std::vector<int> serve_order;
    std::size_t position = 0;
    bool draining = false;
    PacketKind last_sent = PacketKind::None; // what went out in the previous slot
};

RoundRobinState make_round(ActivationVector phi, const AgeVector& ages);

struct RrStepResult {
    SlotAction action;          // kind == None iff round_ended
    bool round_ended = false;
    bool floor_violated = false; // fresh-switch belief fell below P01^(M(phi))
};

// Advance the round machine by one slot.  `feedback` is the ACK/NACK of the
// previous slot (nullopt on the machine's first slot).  When the last active
// channel is departed the result has round_ended = true and carries no
// action; the caller starts a new round and calls again within the same slot.
//
// On a fresh switch the action is Data with probability P01^(M(phi))/omega_n
// and Dummy otherwise; the draw is consumed even when the ratio is 1 so that
// traces stay aligned across parameter sweeps.  The belief floor
// omega_n >= P01^(M(phi)) is checked (to kProbTol) and reported, never
// assumed.
RrStepResult rr_step(RoundRobinState& state, const BeliefVector& omega,
                     std::optional<Feedback> feedback,
                     const std::vector<ChannelParams>& channels, Rng& rng);

// RandRR mixture: pick phi with probability alpha_phi each round, keyed by
// activation mask.  Weights must be nonnegative and sum to 1 within 1e-9
// (renormalized exactly).
class RandRRSpec {
public:
    RandRRSpec(std::map<std::uint64_t, double> weights, int n_channels);

    const std::map<std::uint64_t, double>& weights() const { return weights_; }
    int n_channels() const { return n_channels_; }

    ActivationVector sample(Rng& rng) const;

private:
    std::map<std::uint64_t, double> weights_; // ascending mask order
    int n_channels_;
};

RoundRobinState randrr_pick(const RandRRSpec& spec, const AgeVector& ages, Rng& rng);

// Queue-dependent round robin configuration.
struct QRRConfig {
    std::vector<double> lambda; // packets/slot per user, each in [0, 1)
    enum class RateSource { Known, EmpiricalEstimate } rate_source = RateSource::Known;
};

// Per-channel summand of the round-selection score f(U, RR(phi)) for a round
// serving M channels: U_n * P01_n^(M)/P10_n - (1 + P01_n^(M)/P10_n) * sum_j U_j lambda_j
double qrr_score(const std::vector<double>& backlog, const std::vector<double>& lambda,
                 int n, int M, const std::vector<ChannelParams>& channels);

struct QrrSelection {
    ActivationVector phi;
    double f_value;
};

// argmax_phi f(U, RR(phi)) via per-M top-M selection (polynomial time).
// Ties: higher f, then smaller M, then lexicographically smallest active set.
QrrSelection qrr_select(const std::vector<double>& backlog, const std::vector<double>& lambda,
                        const std::vector<ChannelParams>& channels);

// Reference path enumerating all 2^N - 1 activation vectors with the same
// tie-break; test oracle for qrr_select, N <= 24.
QrrSelection qrr_select_bruteforce(const std::vector<double>& backlog,
                                   const std::vector<double>& lambda,
                                   const std::vector<ChannelParams>& channels);

// Transmit-until-NACK heuristic: always send data, advance on NACK only.
// Default order is strictly circular; the LRU variant instead jumps to the
// least recently used other channel.
struct UntilNackState {
    int n_channels = 0;
    int position = 0;
    bool lru_variant = false;
};

SlotAction until_nack_step(UntilNackState& state, std::optional<Feedback> feedback,
                           const AgeVector& ages);

// What the simulator runs.
struct FixedRRPolicy { ActivationVector phi; };
struct RandRRPolicy { RandRRSpec spec; };
struct QRRPolicy { QRRConfig config; };
struct UntilNackPolicy { bool lru_variant = false; };

using PolicySpec = std::variant<FixedRRPolicy, RandRRPolicy, QRRPolicy, UntilNackPolicy>;

} // namespace memsched
