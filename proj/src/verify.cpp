#include "memsched/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "memsched/capacity.hpp"
#include "memsched/oracles.hpp"
#include "memsched/policy.hpp"
#include "memsched/rng.hpp"
#include "memsched/simulator.hpp"
#include "memsched/stats.hpp"

namespace memsched::verify {

bool all_passed(const std::vector<Verdict>& verdicts) {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const Verdict& v) { return v.pass; });
}

namespace {

const ChannelParams kSym{0.2, 0.2}; // the canonical symmetric pair

struct Suite {
    const std::vector<ChannelParams>& config_channels;
    Options opt;
    std::vector<Verdict> out;

    std::uint64_t horizon() const { return opt.quick ? 100'000 : 1'000'000; }
    double slack(double full, double quick) const { return opt.quick ? quick : full; }
    Rng rng(std::uint64_t id) const { return Rng::child(opt.seed, id); }

    void add(const std::string& id, const std::string& stat, double value, double bound,
             bool within_is_pass = true) {
        out.push_back({id, stat, value, bound, within_is_pass ? value <= bound : value > bound, ""});
    }

    void guarded(const std::string& id, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            out.push_back({id, "exception", 0.0, 0.0, false, e.what()});
        }
    }

    void run() {
        guarded("c_closed_form", [&] { closed_form(); });
        guarded("memory_gain", [&] { memory_gain(); });
        guarded("rr2_throughput", [&] { rr2_throughput(); });
        guarded("rr_eta_asymmetric", [&] { rr_eta_asymmetric(); });
        guarded("dwell_law", [&] { dwell_law(); });
        guarded("belief_floor", [&] { belief_floor(); });
        guarded("until_nack_sum", [&] { until_nack_sum(); });
        guarded("qrr_bruteforce", [&] { qrr_bruteforce(); });
        guarded("weight_conversion", [&] { weight_conversion(); });
        guarded("coupling_dominance", [&] { coupling_dominance(); });
        guarded("bandit_bound", [&] { bandit_bound(); });
        guarded("real_vs_fictitious", [&] { rvf(); });
        guarded("region_vertices", [&] { region_vertices(); });
        guarded("geometric_gap_chain", [&] { gap_chain(); });
        guarded("proximity_example", [&] { proximity(); });
        guarded("qrr_stability", [&] { qrr_stability(); });
        guarded("qrr_instability", [&] { qrr_instability(); });
    }

    // ---- individual checks ----

    void closed_form() {
        double c1 = c_of_m(kSym, 1);
        double c2 = c_of_m(kSym, 2);
        if (opt.inject_fault == "c_m") c2 += 0.01;
        add("c_closed_form", "max |c_M - reference|",
            std::max(std::abs(c1 - 0.5), std::abs(c2 - 0.615)), 5e-4);
    }

    void memory_gain() {
        const double gain = (c_of_m(kSym, 2) - c_of_m(kSym, 1)) / c_of_m(kSym, 1);
        add("memory_gain", "|(c2-c1)/c1 - 0.231|", std::abs(gain - 0.231), 1e-3);
    }

    SimConfig sym_config(std::uint64_t id) const {
        SimConfig cfg;
        cfg.channels = {kSym, kSym};
        cfg.policy = FixedRRPolicy{ActivationVector::from_string("11")};
        cfg.horizon = horizon();
        cfg.burn_in = horizon() / 100;
        cfg.seed = Rng::child(opt.seed, id).raw();
        return cfg;
    }

    void rr2_throughput() {
        const auto m = run_saturated(sym_config(10));
        const double target = c_of_m(kSym, 2) / 2.0;
        double worst = 0.0;
        for (double thr : m.throughput) worst = std::max(worst, std::abs(thr - target));
        add("rr2_throughput", "max |throughput - c2/2|", worst, slack(0.005, 0.02));
    }

    void rr_eta_asymmetric() {
        SimConfig cfg;
        cfg.channels = {ChannelParams(0.1, 0.3), ChannelParams(0.3, 0.1)};
        cfg.policy = FixedRRPolicy{ActivationVector::from_string("11")};
        cfg.horizon = horizon();
        cfg.burn_in = horizon() / 100;
        cfg.seed = rng(11).raw();
        const auto m = run_saturated(cfg);
        const auto eta = eta_vector(ActivationVector::from_string("11"), cfg.channels);
        double worst = 0.0;
        for (int n = 0; n < 2; ++n) worst = std::max(worst, std::abs(m.throughput[n] - eta[n]));
        add("rr_eta_asymmetric", "max |throughput - eta|", worst, slack(0.005, 0.02));
    }

    void dwell_law() {
        auto cfg = sym_config(12);
        cfg.record_dwell_sequences = true;
        cfg.horizon = opt.quick ? 120'000 : 600'000;
        cfg.burn_in = 0;
        const auto m = run_saturated(cfg);

        const std::uint64_t mask = 0b11;
        double worst_tv = 0.0, worst_rho = 0.0;
        for (int ch = 0; ch < 2; ++ch) {
            const auto est = collect_dwell_histogram(m, mask, ch);
            const int j_max = static_cast<int>(est.pmf.size());
            const auto analytic = analytic_dwell_pmf(kSym, 2, std::max(2, j_max));
            std::vector<double> p = est.pmf, q(analytic.pmf.begin(),
                                               analytic.pmf.begin() + std::max(2, j_max));
            p.resize(q.size(), 0.0);
            p.push_back(0.0);
            q.push_back(analytic.tail);
            worst_tv = std::max(worst_tv, stats::tv_distance(p, q));

            const auto& seq = m.dwell_seq.at({mask, ch});
            std::vector<double> xs(seq.begin(), seq.end());
            worst_rho = std::max(worst_rho, std::abs(stats::lag1_autocorr(xs)));
        }
        add("dwell_law", "max TV(empirical, analytic)", worst_tv, slack(0.01, 0.03));
        add("dwell_lag1", "max |lag-1 autocorrelation|", worst_rho, slack(0.01, 0.03));
    }

    void belief_floor() {
        const int n = 6;
        auto r = rng(13);
        std::map<std::uint64_t, double> weights;
        double total = 0.0;
        for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
            const double w = 0.05 + r.uniform();
            weights[mask] = w;
            total += w;
        }
        for (auto& [mask, w] : weights) w /= total;

        SimConfig cfg;
        cfg.channels.assign(n, kSym);
        cfg.policy = RandRRPolicy{RandRRSpec(std::move(weights), n)};
        cfg.horizon = horizon();
        cfg.burn_in = 0;
        cfg.seed = r.raw();
        cfg.assertions_on = false; // count instead of throwing
        const auto m = run_saturated(cfg);
        add("belief_floor", "floor violations", static_cast<double>(m.floor_violations), 0.0);
    }

    void until_nack_sum() {
        auto cfg = sym_config(14);
        cfg.policy = UntilNackPolicy{};
        const auto m = run_saturated(cfg);
        const double sum = m.throughput[0] + m.throughput[1];
        add("until_nack_sum", "|sum throughput - 0.65|", std::abs(sum - 0.65), slack(0.01, 0.03));
    }

    void qrr_bruteforce() {
        auto r = rng(15);
        const int trials = opt.quick ? 50 : 200;
        int mismatches = 0;
        for (int trial = 0; trial < trials; ++trial) {
            const int n = 2 + static_cast<int>(r.below(9)); // 2..10
            std::vector<ChannelParams> ch;
            std::vector<double> backlog(n), lambda(n);
            for (int k = 0; k < n; ++k) {
                const double p01 = 0.05 + 0.55 * r.uniform();
                const double p10 = 0.05 + (0.93 - p01 - 0.05) * r.uniform();
                ch.emplace_back(p01, p10);
                backlog[k] = static_cast<double>(r.below(51));
                lambda[k] = 0.3 * r.uniform();
            }
            const auto fast = qrr_select(backlog, lambda, ch);
            const auto brute = qrr_select_bruteforce(backlog, lambda, ch);
            if (fast.phi.mask() != brute.phi.mask() || fast.f_value != brute.f_value)
                ++mismatches;
        }
        add("qrr_bruteforce", "mismatches vs enumeration", mismatches, 0.0);
    }

    void weight_conversion() {
        auto r = rng(16);
        double worst_fp = 0.0, worst_match = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t k = 1 + r.below(64);
            std::vector<double> beta(k), chi(k);
            double total = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                beta[j] = (trial % 7 == 0 && r.uniform() < 0.2) ? 0.0 : 0.02 + r.uniform();
                chi[j] = 1.0 + 19.0 * r.uniform();
                total += beta[j];
            }
            if (total == 0.0) beta[0] = total = 1.0;
            for (auto& b : beta) b /= total;

            const auto alpha = closed_beta_to_alpha(beta, chi);
            // fixed point: beta_k == alpha_k chi_k / sum alpha chi
            double denom = 0.0;
            for (std::size_t j = 0; j < k; ++j) denom += alpha[j] * chi[j];
            for (std::size_t j = 0; j < k; ++j)
                worst_fp = std::max(worst_fp, std::abs(beta[j] - alpha[j] * chi[j] / denom));

            const auto recursive = recursive_beta_to_alpha(beta, chi);
            for (std::size_t j = 0; j < k; ++j)
                worst_match = std::max(worst_match, std::abs(alpha[j] - recursive[j]));
        }
        add("weight_fixed_point", "max fixed-point residual", worst_fp, 1e-12);
        add("weight_recursive_match", "max |closed - recursive|", worst_match, 1e-12);
    }

    void coupling_dominance() {
        auto r = rng(17);
        const int trials = opt.quick ? 20 : 100;
        int violations = 0;
        for (int trial = 0; trial < trials; ++trial) {
            const double p01 = 0.1 + 0.4 * r.uniform();
            const double p10 = 0.1 + std::min(0.85 - p01, 0.4) * r.uniform();
            const ChannelParams p(p01, p10);
            const double f1 = r.uniform(), f2 = r.uniform();
            const double g1 = r.uniform(), g2 = r.uniform();
            const std::uint64_t period = 1 + r.below(50);
            const auto q = [&, f1, f2, g1, g2, period](std::uint64_t t) {
                const bool a = (t / period) % 2 == 0;
                return std::pair{p.p01() * (a ? f1 : f2), p.p11() * (a ? g1 : g2)};
            };
            auto trial_rng = rng(1000 + trial);
            const auto res = coupling_experiment(p, q, horizon(), trial_rng);
            if (res.pi_y > res.pi_x + 3.0 * res.se) ++violations;
        }
        add("coupling_dominance", "trials with pi_Y > pi_X + 3 SE", violations, 0.0);
    }

    void bandit_bound() {
        auto r = rng(18);
        const int trials = opt.quick ? 20 : 100;
        int violations = 0;
        for (int trial = 0; trial < trials; ++trial) {
            const int n = 2 + static_cast<int>(r.below(4));
            std::vector<ChannelParams> ch;
            double cap = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p01 = 0.05 + 0.5 * r.uniform();
                const double p10 = 0.05 + (0.9 - p01 - 0.05) * r.uniform();
                ch.emplace_back(p01, p10);
                cap = std::max(cap, c_infinity(ch.back()));
            }
            const double stay = 0.3 + 0.6 * r.uniform();
            auto sel_rng = rng(2000 + trial);
            int cur = 0;
            const auto select = [&](std::uint64_t) {
                if (sel_rng.uniform() > stay) cur = static_cast<int>(sel_rng.below(n));
                return cur;
            };
            auto trial_rng = rng(3000 + trial);
            const auto res = fictitious_channel_sim(ch, select, horizon(), trial_rng);
            if (res.sum_throughput > cap + 3.0 * res.se) ++violations;
        }
        add("bandit_bound", "trials with sum > max c_inf + 3 SE", violations, 0.0);
    }

    void rvf() {
        auto r = rng(19);
        const int trials = opt.quick ? 5 : 20;
        int violations = 0;
        for (int trial = 0; trial < trials; ++trial) {
            const int n = 2 + static_cast<int>(r.below(3));
            std::vector<ChannelParams> ch;
            for (int k = 0; k < n; ++k) {
                const double p01 = 0.05 + 0.5 * r.uniform();
                const double p10 = 0.05 + (0.9 - p01 - 0.05) * r.uniform();
                ch.emplace_back(p01, p10);
            }
            auto sel_rng = rng(4000 + trial);
            const auto select = [&](std::uint64_t) { return static_cast<int>(sel_rng.below(n)); };
            auto trial_rng = rng(5000 + trial);
            const auto d = real_vs_fictitious(ch, select, horizon(), trial_rng);
            for (int k = 0; k < n; ++k)
                if (d.fict[k] < d.real[k] - 3.0 * d.se[k]) ++violations;
        }
        add("real_vs_fictitious", "channels with fict < real - 3 SE", violations, 0.0);
    }

    static std::vector<ChannelParams> grid_channels(int n) {
        static const std::vector<std::pair<double, double>> pool = {
            {0.2, 0.2}, {0.1, 0.3}, {0.3, 0.1}, {0.05, 0.4},
            {0.25, 0.15}, {0.15, 0.35}, {0.4, 0.05}, {0.12, 0.18}};
        std::vector<ChannelParams> ch;
        for (int k = 0; k < n; ++k) ch.emplace_back(pool[k % pool.size()].first,
                                                    pool[k % pool.size()].second);
        return ch;
    }

    void region_vertices() {
        int failures = 0;
        const int n_max = opt.quick ? 6 : 8;
        for (int n = 2; n <= n_max; ++n) {
            const auto ch = grid_channels(n);
            for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
                const auto eta = eta_vector(ActivationVector::from_mask(mask, n), ch);
                if (!outer_membership(eta, ch)) ++failures;
            }
        }
        if (config_channels.size() >= 2 && config_channels.size() <= 8) {
            const int n = static_cast<int>(config_channels.size());
            for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
                const auto eta = eta_vector(ActivationVector::from_mask(mask, n), config_channels);
                if (!outer_membership(eta, config_channels)) ++failures;
            }
        }
        add("region_vertices", "eta vertices outside the outer bound", failures, 0.0);
    }

    void gap_chain() {
        int failures = 0;
        for (const auto& p : grid_channels(8)) {
            const double ci = c_infinity(p);
            double prev = 0.0;
            for (int m = 1; m <= 64; ++m) {
                const double cm = c_of_m(p, m);
                if (ci - cm > geometric_gap(p, m) + 1e-12) ++failures;
                if (cm + 1e-12 < prev) ++failures;                  // monotone
                if (c_tilde(p, m) > cm + 1e-12 || cm > ci + 1e-12) ++failures;
                prev = cm;
            }
        }
        add("geometric_gap_chain", "chain violations over M = 1..64", failures, 0.0);
    }

    void proximity() {
        const double half = c_of_m(kSym, 2) / 2.0;
        const double gap =
            proximity_gap(DirectionVector({1.0, 1.0}), {half, half}, kSym);
        add("proximity_example", "|bound - 0.2571|", std::abs(gap - 0.2571), 1e-3);
    }

    SimConfig queued_config(std::uint64_t id, double rate) const {
        SimConfig cfg;
        cfg.channels = {kSym, kSym};
        cfg.mode = SimMode::Queued;
        cfg.policy = QRRPolicy{};
        cfg.arrivals.lambda = {rate, rate};
        cfg.horizon = opt.quick ? 200'000 : 1'000'000;
        cfg.burn_in = 10'000;
        cfg.series_stride = cfg.horizon / 1000;
        cfg.seed = Rng::child(opt.seed, id).raw();
        return cfg;
    }

    void qrr_stability() {
        const auto m = run_queued(queued_config(20, 0.9 * c_of_m(kSym, 2) / 2.0));
        const auto rep = stats::assess_stability(m.backlog_series);
        add("qrr_stability", "stable at 0.9 x boundary (1 = no)", rep.stable ? 0.0 : 1.0, 0.0);
    }

    void qrr_instability() {
        const auto m = run_queued(queued_config(21, 0.40));
        const auto rep = stats::assess_stability(m.backlog_series);
        add("qrr_instability", "positive drift outside the outer bound (1 = no)",
            rep.slope_positive ? 0.0 : 1.0, 0.0);
    }
};

} // namespace

std::vector<Verdict> run_suite(const std::vector<ChannelParams>& channels, const Options& opt) {
    Suite suite{channels, opt, {}};
    suite.run();
    return std::move(suite.out);
}

} // namespace memsched::verify
