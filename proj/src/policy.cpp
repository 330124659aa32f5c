#include "memsched/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace memsched {

std::vector<int> lru_order(const ActivationVector& phi, const AgeVector& ages) {
    std::vector<int> order = phi.active_indices();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (ages[a] != ages[b]) return ages[a] > ages[b];
        return a < b;
    });
    return order;
}

RoundRobinState make_round(ActivationVector phi, const AgeVector& ages) {
    RoundRobinState st{std::move(phi), {}, 0, false, PacketKind::None};
    st.serve_order = lru_order(st.phi, ages);
    return st;
}

RrStepResult rr_step(RoundRobinState& state, const BeliefVector& omega,
                     std::optional<Feedback> feedback,
                     const std::vector<ChannelParams>& channels, Rng& rng) {
    RrStepResult res;

    // resolve the previous slot first
    if (state.last_sent == PacketKind::Data) {
        if (!feedback)
            throw std::logic_error("rr_step: data packet outstanding but no feedback given");
        if (*feedback == Feedback::Ack) {
            state.draining = true;
        } else {
            state.position += 1;
            state.draining = false;
        }
        state.last_sent = PacketKind::None;
    } else if (state.last_sent == PacketKind::Dummy) {
        state.position += 1;
        state.draining = false;
        state.last_sent = PacketKind::None;
    }

    if (state.position >= state.serve_order.size()) {
        res.round_ended = true;
        return res;
    }

    const int n = state.serve_order[state.position];
    if (state.draining) {
        state.last_sent = PacketKind::Data;
        res.action = {n, PacketKind::Data};
        return res;
    }

    // fresh switch: dummy randomization equalizes the effective belief
    const double floor = channels[n].k_step_01(static_cast<std::uint64_t>(state.phi.count()));
    if (omega[n] < floor - kProbTol) res.floor_violated = true;
    const double ratio = std::min(1.0, floor / omega[n]);
    const bool data = rng.uniform() < ratio;
    state.last_sent = data ? PacketKind::Data : PacketKind::Dummy;
    res.action = {n, state.last_sent};
    return res;
}

RandRRSpec::RandRRSpec(std::map<std::uint64_t, double> weights, int n_channels)
    : weights_(std::move(weights)), n_channels_(n_channels) {
    double sum = 0.0;
    for (const auto& [mask, w] : weights_) {
        if (w < 0.0)
            throw std::invalid_argument("randrr weights must be nonnegative");
        if (mask == 0 || (n_channels_ < 64 && mask >> n_channels_))
            throw std::invalid_argument("randrr weight on invalid activation mask");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("randrr weights must sum to 1 within 1e-9");
    for (auto& [mask, w] : weights_) w /= sum;
}

ActivationVector RandRRSpec::sample(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    std::uint64_t last = 0;
    for (const auto& [mask, w] : weights_) {
        if (w <= 0.0) continue;
        acc += w;
        last = mask;
        if (u < acc) return ActivationVector::from_mask(mask, n_channels_);
    }
    return ActivationVector::from_mask(last, n_channels_); // rounding leftover
}

RoundRobinState randrr_pick(const RandRRSpec& spec, const AgeVector& ages, Rng& rng) {
    return make_round(spec.sample(rng), ages);
}

namespace {

// score ratio table r[n] = P01_n^(M) / P10_n for fixed M
std::vector<double> score_ratios(int M, const std::vector<ChannelParams>& channels) {
    std::vector<double> r(channels.size());
    for (std::size_t n = 0; n < channels.size(); ++n)
        r[n] = channels[n].k_step_01(static_cast<std::uint64_t>(M)) / channels[n].p10();
    return r;
}

double backlog_rate_weight(const std::vector<double>& backlog, const std::vector<double>& lambda) {
    double s = 0.0;
    for (std::size_t n = 0; n < backlog.size(); ++n) s += backlog[n] * lambda[n];
    return s;
}

struct Candidate {
    double f = -std::numeric_limits<double>::infinity();
    int m = 0;
    std::vector<int> set; // ascending

    // higher f, then smaller M, then lexicographically smaller active set
    bool better_than(const Candidate& other) const {
        if (f != other.f) return f > other.f;
        if (m != other.m) return m < other.m;
        return set < other.set;
    }
};

} // namespace

double qrr_score(const std::vector<double>& backlog, const std::vector<double>& lambda,
                 int n, int M, const std::vector<ChannelParams>& channels) {
    const double r = channels[n].k_step_01(static_cast<std::uint64_t>(M)) / channels[n].p10();
    return backlog[n] * r - (1.0 + r) * backlog_rate_weight(backlog, lambda);
}

QrrSelection qrr_select(const std::vector<double>& backlog, const std::vector<double>& lambda,
                        const std::vector<ChannelParams>& channels) {
    const int n_ch = static_cast<int>(channels.size());
    const double s = backlog_rate_weight(backlog, lambda);

    Candidate best;
    std::vector<double> score(n_ch);
    std::vector<int> order(n_ch);
    for (int m = 1; m <= n_ch; ++m) {
        const auto r = score_ratios(m, channels);
        for (int n = 0; n < n_ch; ++n) score[n] = backlog[n] * r[n] - (1.0 + r[n]) * s;
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (score[a] != score[b]) return score[a] > score[b];
            return a < b;
        });
        Candidate cand;
        cand.m = m;
        cand.set.assign(order.begin(), order.begin() + m);
        std::sort(cand.set.begin(), cand.set.end());
        cand.f = 0.0;
        for (int n : cand.set) cand.f += score[n];
        if (cand.better_than(best)) best = std::move(cand);
    }

    std::vector<std::uint8_t> bits(n_ch, 0);
    for (int n : best.set) bits[n] = 1;
    return {ActivationVector(std::move(bits)), best.f};
}

QrrSelection qrr_select_bruteforce(const std::vector<double>& backlog,
                                   const std::vector<double>& lambda,
                                   const std::vector<ChannelParams>& channels) {
    const int n_ch = static_cast<int>(channels.size());
    if (n_ch > 24)
        throw std::invalid_argument("qrr_select_bruteforce: N too large to enumerate");
    const double s = backlog_rate_weight(backlog, lambda);

    std::vector<std::vector<double>> score(n_ch + 1); // [M][n]
    for (int m = 1; m <= n_ch; ++m) {
        const auto r = score_ratios(m, channels);
        score[m].resize(n_ch);
        for (int n = 0; n < n_ch; ++n) score[m][n] = backlog[n] * r[n] - (1.0 + r[n]) * s;
    }

    Candidate best;
    for (std::uint64_t mask = 1; mask < (1ULL << n_ch); ++mask) {
        const int m = std::popcount(mask);
        Candidate cand;
        cand.m = m;
        cand.f = 0.0;
        for (int n = 0; n < n_ch; ++n) {
            if (mask >> n & 1) {
                cand.f += score[m][n];
                cand.set.push_back(n);
            }
        }
        if (cand.better_than(best)) best = std::move(cand);
    }

    std::vector<std::uint8_t> bits(n_ch, 0);
    for (int n : best.set) bits[n] = 1;
    return {ActivationVector(std::move(bits)), best.f};
}

SlotAction until_nack_step(UntilNackState& state, std::optional<Feedback> feedback,
                           const AgeVector& ages) {
    if (feedback && *feedback == Feedback::Nack) {
        if (state.lru_variant) {
            int oldest = -1;
            for (int n = 0; n < state.n_channels; ++n) {
                if (n == state.position) continue;
                if (oldest < 0 || ages[n] > ages[oldest]) oldest = n;
            }
            if (oldest >= 0) state.position = oldest;
        } else {
            state.position = (state.position + 1) % state.n_channels;
        }
    }
    return {state.position, PacketKind::Data};
}

} // namespace memsched
