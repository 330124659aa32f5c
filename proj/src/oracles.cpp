#include "memsched/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "memsched/capacity.hpp"
#include "memsched/stats.hpp"

namespace memsched {

DwellPmf analytic_dwell_pmf(const ChannelParams& p, int m, int j_max) {
    if (m < 1) throw std::invalid_argument("analytic_dwell_pmf: M must be >= 1");
    if (j_max < 2) throw std::invalid_argument("analytic_dwell_pmf: j_max must be >= 2");
    const double p01m = p.k_step_01(static_cast<std::uint64_t>(m));
    DwellPmf d;
    d.pmf.resize(j_max, 0.0);
    d.pmf[0] = 1.0 - p01m;
    for (int j = 2; j <= j_max; ++j)
        d.pmf[j - 1] = p01m * std::pow(p.p11(), j - 2) * p.p10();
    d.tail = p01m * std::pow(p.p11(), j_max - 1);
    d.mean = 1.0 + p01m / p.p10();
    return d;
}

CouplingResult coupling_experiment(const ChannelParams& p, const QSchedule& q,
                                   std::uint64_t horizon, Rng& rng) {
    if (horizon == 0) throw std::invalid_argument("coupling_experiment: horizon must be > 0");
    CouplingResult res;
    res.pi_x = p.p01() / (p.p01() + p.p10());

    int y = 0;
    std::uint64_t ones = 0;
    const std::uint64_t n_batches = std::min<std::uint64_t>(100, horizon);
    const std::uint64_t batch_len = horizon / n_batches;
    std::vector<double> batch_means;
    std::uint64_t batch_ones = 0;

    for (std::uint64_t t = 0; t < horizon; ++t) {
        const auto [q01, q11] = q(t);
        if (q01 < 0.0 || q01 > 1.0 || q11 < 0.0 || q11 > 1.0)
            throw std::invalid_argument("coupling_experiment: Q(t) is not a probability matrix");
        if (q01 > p.p01() + kProbTol || q11 > p.p11() + kProbTol)
            throw std::invalid_argument("coupling_experiment: dominance violated at slot " +
                                        std::to_string(t));
        y = rng.bernoulli(y ? q11 : q01) ? 1 : 0;
        ones += y;
        batch_ones += y;
        if ((t + 1) % batch_len == 0 && batch_means.size() + 1 < n_batches + 1) {
            batch_means.push_back(static_cast<double>(batch_ones) /
                                  static_cast<double>(batch_len));
            batch_ones = 0;
        }
    }
    res.pi_y = static_cast<double>(ones) / static_cast<double>(horizon);
    if (batch_means.size() >= 2)
        res.se = std::sqrt(stats::variance(batch_means) /
                           static_cast<double>(batch_means.size()));
    return res;
}

CoupledSequences coupled_binary_sampler(const ConditionalLaw& conditional_p, double p_cap,
                                        std::size_t n, Rng& rng) {
    if (p_cap < 0.0 || p_cap > 1.0)
        throw std::invalid_argument("coupled_binary_sampler: p_cap must be a probability");
    CoupledSequences seq;
    seq.base.reserve(n);
    seq.augmented.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = conditional_p(seq.base);
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("coupled_binary_sampler: conditional probability invalid");
        if (p > p_cap + kProbTol)
            throw std::invalid_argument(
                "coupled_binary_sampler: conditional probability exceeds the cap");
        const bool base = rng.bernoulli(p);
        bool aug = base;
        if (!base) {
            // independent augmentation draw lifts the marginal to exactly p_cap
            const double lift = (p_cap - p) / (1.0 - p);
            aug = rng.bernoulli(lift);
        }
        seq.base.push_back(base ? 1 : 0);
        seq.augmented.push_back(aug ? 1 : 0);
    }
    return seq;
}

int best_fixed_channel(const std::vector<ChannelParams>& channels) {
    int best = 0;
    for (std::size_t n = 1; n < channels.size(); ++n)
        if (c_infinity(channels[n]) > c_infinity(channels[best])) best = static_cast<int>(n);
    return best;
}

FictitiousResult fictitious_channel_sim(const std::vector<ChannelParams>& channels,
                                        const SelectionSequence& select,
                                        std::uint64_t horizon, Rng& rng) {
    if (horizon == 0) throw std::invalid_argument("fictitious_channel_sim: horizon must be > 0");
    const int n_ch = static_cast<int>(channels.size());
    std::vector<Mode> mode(n_ch, Mode::M2); // matches the stationary initial belief
    std::vector<std::uint64_t> reward(n_ch, 0);

    const std::uint64_t n_batches = std::min<std::uint64_t>(100, horizon);
    const std::uint64_t batch_len = horizon / n_batches;
    std::vector<double> batch_means;
    std::uint64_t batch_reward = 0;

    for (std::uint64_t t = 0; t < horizon; ++t) {
        const int k = select(t);
        if (k < 0 || k >= n_ch)
            throw std::invalid_argument("fictitious_channel_sim: selection out of range");
        const double succ_p =
            mode[k] == Mode::M1 ? channels[k].p11() : channels[k].pi_on();
        const bool succ = rng.bernoulli(succ_p);
        mode[k] = succ ? Mode::M1 : Mode::M2;
        reward[k] += succ;
        batch_reward += succ;
        if ((t + 1) % batch_len == 0 && batch_means.size() + 1 < n_batches + 1) {
            batch_means.push_back(static_cast<double>(batch_reward) /
                                  static_cast<double>(batch_len));
            batch_reward = 0;
        }
    }

    FictitiousResult res;
    res.per_channel.resize(n_ch);
    std::uint64_t total = 0;
    for (int k = 0; k < n_ch; ++k) {
        total += reward[k];
        res.per_channel[k] = static_cast<double>(reward[k]) / static_cast<double>(horizon);
    }
    res.sum_throughput = static_cast<double>(total) / static_cast<double>(horizon);
    if (batch_means.size() >= 2)
        res.se = std::sqrt(stats::variance(batch_means) /
                           static_cast<double>(batch_means.size()));
    return res;
}

DominancePair real_vs_fictitious(const std::vector<ChannelParams>& channels,
                                 const SelectionSequence& select, std::uint64_t horizon,
                                 Rng& rng) {
    const int n_ch = static_cast<int>(channels.size());
    // the real system is simulated through its information state: conditional
    // on the feedback history the served channel is ON w.p. omega_n, so one
    // shared uniform per slot couples both systems
    BeliefVector omega = stationary_belief(channels);
    std::vector<Mode> mode(n_ch, Mode::M2);
    std::vector<std::uint64_t> real(n_ch, 0), fict(n_ch, 0);

    const std::uint64_t n_batches = std::min<std::uint64_t>(100, horizon);
    const std::uint64_t batch_len = horizon / n_batches;
    std::vector<std::vector<double>> diff_batches(n_ch);
    std::vector<std::int64_t> batch_diff(n_ch, 0);

    for (std::uint64_t t = 0; t < horizon; ++t) {
        const int k = select(t);
        const double u = rng.uniform();
        const bool real_on = u < omega[k];
        const bool fict_on = u < (mode[k] == Mode::M1 ? channels[k].p11() : channels[k].pi_on());
        real[k] += real_on;
        fict[k] += fict_on;
        batch_diff[k] += (fict_on ? 1 : 0) - (real_on ? 1 : 0);
        omega = belief_update(omega, k, real_on ? ChannelState::On : ChannelState::Off, channels);
        mode[k] = fict_on ? Mode::M1 : Mode::M2;
        if ((t + 1) % batch_len == 0 && diff_batches[0].size() + 1 < n_batches + 1) {
            for (int c = 0; c < n_ch; ++c) {
                diff_batches[c].push_back(static_cast<double>(batch_diff[c]) /
                                          static_cast<double>(batch_len));
                batch_diff[c] = 0;
            }
        }
    }

    DominancePair d;
    d.real.resize(n_ch);
    d.fict.resize(n_ch);
    d.se.resize(n_ch, 0.0);
    for (int c = 0; c < n_ch; ++c) {
        d.real[c] = static_cast<double>(real[c]) / static_cast<double>(horizon);
        d.fict[c] = static_cast<double>(fict[c]) / static_cast<double>(horizon);
        if (diff_batches[c].size() >= 2)
            d.se[c] = std::sqrt(stats::variance(diff_batches[c]) /
                                static_cast<double>(diff_batches[c].size()));
    }
    return d;
}

namespace {

std::vector<double> recursive_positive(const std::vector<double>& beta,
                                       const std::vector<double>& chi) {
    const std::size_t k = beta.size();
    if (k == 1) return {1.0};

    // subproblem over entries 2..K, renormalized
    const double rest = 1.0 - beta[0];
    std::vector<double> sub_beta(beta.begin() + 1, beta.end());
    for (auto& b : sub_beta) b /= rest;
    std::vector<double> sub_chi(chi.begin() + 1, chi.end());
    const auto gamma = recursive_positive(sub_beta, sub_chi);

    double s = 0.0;
    for (std::size_t j = 0; j < gamma.size(); ++j) s += gamma[j] * sub_chi[j];
    const double a0 = beta[0] * s / (chi[0] * rest + beta[0] * s);

    std::vector<double> alpha(k);
    alpha[0] = a0;
    for (std::size_t j = 1; j < k; ++j) alpha[j] = (1.0 - a0) * gamma[j - 1];
    return alpha;
}

} // namespace

std::vector<double> recursive_beta_to_alpha(const std::vector<double>& beta,
                                            const std::vector<double>& chi) {
    if (beta.size() != chi.size() || beta.empty())
        throw std::invalid_argument("recursive_beta_to_alpha: dimension mismatch");
    double sum = 0.0;
    for (double b : beta) {
        if (b < 0.0) throw std::invalid_argument("recursive_beta_to_alpha: beta must be >= 0");
        sum += b;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("recursive_beta_to_alpha: beta must sum to 1");

    // zero entries force zero selection probability; peel them off first
    std::vector<double> pos_beta, pos_chi;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        if (beta[i] > 0.0) {
            pos_beta.push_back(beta[i] / sum);
            pos_chi.push_back(chi[i]);
            where.push_back(i);
        }
    }
    const auto pos_alpha = recursive_positive(pos_beta, pos_chi);
    std::vector<double> alpha(beta.size(), 0.0);
    for (std::size_t j = 0; j < where.size(); ++j) alpha[where[j]] = pos_alpha[j];
    return alpha;
}

} // namespace memsched
