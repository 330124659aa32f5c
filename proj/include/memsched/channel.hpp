#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "memsched/rng.hpp"

namespace memsched {

inline constexpr double kProbTol = 1e-12; // tolerance for probability identities

enum class ChannelState : std::uint8_t { Off = 0, On = 1 };

// 2x2 row-stochastic matrix over {OFF, ON}; p[i][j] = P(next = j | cur = i)
struct OnOffMatrix {
    double p00, p01, p10, p11;
};

// Parameters of one positively correlated Markov ON/OFF channel.
//
// Validation enforces 0 < p01, 0 < p10 and p01 + p10 < 1: memoryless and
// constantly-ON/OFF channels are rejected.  `unchecked` bypasses validation
// for degenerate-parameter unit tests only.
class ChannelParams {
public:
    ChannelParams(double p01, double p10);

    static ChannelParams unchecked(double p01, double p10);

    double p01() const { return p01_; }
    double p10() const { return p10_; }
    double p00() const { return 1.0 - p01_; }
    double p11() const { return 1.0 - p10_; }
    double x() const { return x_; }          // p01 + p10
    double pi_on() const { return pi_on_; }  // stationary ON probability, p01/x

    // k-step transition matrix, closed form; k >= 1
    OnOffMatrix k_step(std::uint64_t k) const;
    double k_step_01(std::uint64_t k) const;
    double k_step_11(std::uint64_t k) const;

private:
    ChannelParams() = default;
    double p01_ = 0, p10_ = 0, x_ = 0, pi_on_ = 0;
};

// Information state: conditional ON-probability per channel.
using BeliefVector = std::vector<double>;

// Realized channel states for one slot.
using ChannelStateSample = std::vector<ChannelState>;

BeliefVector stationary_belief(const std::vector<ChannelParams>& channels);

// One-slot belief update from ACK/NACK feedback.  `served`/`observed` must be
// both present or both absent; idle channels follow the affine map
// w -> w*p11 + (1-w)*p01.
BeliefVector belief_update(const BeliefVector& omega,
                           std::optional<int> served,
                           std::optional<ChannelState> observed,
                           const std::vector<ChannelParams>& channels);

// Sample initial states from the stationary law.
ChannelStateSample sample_stationary(const std::vector<ChannelParams>& channels, Rng& rng);

// Advance every channel one slot, independently.
ChannelStateSample sample_step(const ChannelStateSample& states,
                               const std::vector<ChannelParams>& channels,
                               Rng& rng);

// Aggregated modes of the information state: M1 = last seen ON and not yet
// seen OFF (omega in (pi_on, p11]), M2 = the complement ([p01, pi_on]).
enum class Mode : std::uint8_t { M1, M2 };

Mode mode_of(double omega_n, const ChannelParams& params);

// Debug companion that tracks the (last observed state, slots since
// observation) representation of a belief and cross-checks the float value
// against the closed-form k-step probability.
class BeliefTracker {
public:
    explicit BeliefTracker(const std::vector<ChannelParams>& channels);

    void observe(int channel, ChannelState state);
    void step_idle(int channel);

    // closed-form value the tracked belief should equal (pi_on before any
    // observation)
    double expected(int channel) const;
    bool consistent(int channel, double omega_n, double tol = kProbTol) const;

private:
    struct Entry {
        std::optional<ChannelState> last;
        std::uint64_t age = 0; // slots since observation
    };
    const std::vector<ChannelParams>* channels_;
    std::vector<Entry> entries_;
};

} // namespace memsched
