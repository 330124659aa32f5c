#include "memsched/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace memsched {

ChannelParams::ChannelParams(double p01, double p10) {
    if (!(p01 > 0.0) || !(p10 > 0.0))
        throw std::invalid_argument("channel: p01 and p10 must be > 0 (ergodic chain required)");
    if (!(p01 + p10 < 1.0))
        throw std::invalid_argument("channel: p01 + p10 must be < 1 (positive correlation required)");
    p01_ = p01;
    p10_ = p10;
    x_ = p01 + p10;
    pi_on_ = p01 / x_;
}

ChannelParams ChannelParams::unchecked(double p01, double p10) {
    ChannelParams c;
    c.p01_ = p01;
    c.p10_ = p10;
    c.x_ = p01 + p10;
    c.pi_on_ = c.x_ > 0.0 ? p01 / c.x_ : 0.0;
    return c;
}

OnOffMatrix ChannelParams::k_step(std::uint64_t k) const {
    if (k == 0)
        throw std::invalid_argument("k_step: k must be >= 1");
    const double rk = std::pow(1.0 - x_, static_cast<double>(k));
    OnOffMatrix m;
    m.p00 = (p10_ + p01_ * rk) / x_;
    m.p01 = p01_ * (1.0 - rk) / x_;
    m.p10 = p10_ * (1.0 - rk) / x_;
    m.p11 = (p01_ + p10_ * rk) / x_;
    return m;
}

double ChannelParams::k_step_01(std::uint64_t k) const {
    if (k == 0)
        throw std::invalid_argument("k_step: k must be >= 1");
    return p01_ * (1.0 - std::pow(1.0 - x_, static_cast<double>(k))) / x_;
}

double ChannelParams::k_step_11(std::uint64_t k) const {
    if (k == 0)
        throw std::invalid_argument("k_step: k must be >= 1");
    return (p01_ + p10_ * std::pow(1.0 - x_, static_cast<double>(k))) / x_;
}

BeliefVector stationary_belief(const std::vector<ChannelParams>& channels) {
    BeliefVector omega;
    omega.reserve(channels.size());
    for (const auto& c : channels) omega.push_back(c.pi_on());
    return omega;
}

BeliefVector belief_update(const BeliefVector& omega,
                           std::optional<int> served,
                           std::optional<ChannelState> observed,
                           const std::vector<ChannelParams>& channels) {
    if (served.has_value() != observed.has_value())
        throw std::invalid_argument("belief_update: served and observed must be paired");
    if (omega.size() != channels.size())
        throw std::invalid_argument("belief_update: dimension mismatch");
    BeliefVector next(omega.size());
    for (std::size_t n = 0; n < omega.size(); ++n) {
        const auto& c = channels[n];
        if (served && static_cast<std::size_t>(*served) == n) {
            next[n] = (*observed == ChannelState::On) ? c.p11() : c.p01();
        } else {
            next[n] = omega[n] * c.p11() + (1.0 - omega[n]) * c.p01();
        }
    }
    return next;
}

ChannelStateSample sample_stationary(const std::vector<ChannelParams>& channels, Rng& rng) {
    ChannelStateSample s(channels.size());
    for (std::size_t n = 0; n < channels.size(); ++n)
        s[n] = rng.bernoulli(channels[n].pi_on()) ? ChannelState::On : ChannelState::Off;
    return s;
}

ChannelStateSample sample_step(const ChannelStateSample& states,
                               const std::vector<ChannelParams>& channels,
                               Rng& rng) {
    if (states.size() != channels.size())
        throw std::invalid_argument("sample_step: dimension mismatch");
    ChannelStateSample next(states.size());
    for (std::size_t n = 0; n < states.size(); ++n) {
        const double p_on =
            states[n] == ChannelState::On ? channels[n].p11() : channels[n].p01();
        next[n] = rng.bernoulli(p_on) ? ChannelState::On : ChannelState::Off;
    }
    return next;
}

Mode mode_of(double omega_n, const ChannelParams& params) {
    if (omega_n < params.p01() - kProbTol || omega_n > params.p11() + kProbTol)
        throw std::invalid_argument("mode_of: belief " + std::to_string(omega_n) +
                                    " outside reachable interval [p01, p11]");
    return omega_n > params.pi_on() ? Mode::M1 : Mode::M2;
}

BeliefTracker::BeliefTracker(const std::vector<ChannelParams>& channels)
    : channels_(&channels), entries_(channels.size()) {}

void BeliefTracker::observe(int channel, ChannelState state) {
    entries_[channel].last = state;
    entries_[channel].age = 1;
}

void BeliefTracker::step_idle(int channel) {
    if (entries_[channel].last) entries_[channel].age += 1;
}

double BeliefTracker::expected(int channel) const {
    const auto& e = entries_[channel];
    const auto& c = (*channels_)[channel];
    if (!e.last) return c.pi_on();
    return *e.last == ChannelState::On ? c.k_step_11(e.age) : c.k_step_01(e.age);
}

bool BeliefTracker::consistent(int channel, double omega_n, double tol) const {
    return std::abs(omega_n - expected(channel)) <= tol;
}

} // namespace memsched
