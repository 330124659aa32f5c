#include "memsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

namespace memsched {

namespace {

std::string kind_name(PacketKind k) {
    switch (k) {
        case PacketKind::Data: return "data";
        case PacketKind::Dummy: return "dummy";
        default: return "none";
    }
}

class Engine {
public:
    Engine(const SimConfig& cfg, std::ostream* trace)
        : cfg_(cfg), trace_(trace), rng_(cfg.seed), n_(static_cast<int>(cfg.channels.size())) {
        validate();
    }

    SimMetrics run() {
        init();
        for (std::uint64_t t = 0; t < cfg_.horizon; ++t) {
            if (t % cfg_.series_stride == 0) {
                double sum = 0.0;
                for (auto u : queue_) sum += static_cast<double>(u);
                metrics_.series_slots.push_back(t);
                metrics_.backlog_series.push_back(sum);
                metrics_.delivered_series.push_back(delivered_all_);
            }

            const SlotAction action = next_action(t);
            const int srv = *action.served;
            const bool on = states_[srv] == ChannelState::On;

            // a data slot on an empty queue transmits a null payload unless
            // feedback_on_empty is off, in which case the slot stays silent
            bool transmitted = true;
            if (cfg_.mode == SimMode::Queued && action.kind == PacketKind::Data &&
                queue_[srv] == 0 && !cfg_.feedback_on_empty)
                transmitted = false;

            const std::uint64_t mu =
                (action.kind == PacketKind::Data && transmitted && on) ? 1 : 0;
            bool delivered;
            if (cfg_.mode == SimMode::Saturated) {
                delivered = action.kind == PacketKind::Data && on;
            } else {
                delivered = mu == 1 && queue_[srv] > 0;
                queue_[srv] = queue_step(queue_[srv], mu, 0);
            }

            if (delivered) {
                delivered_all_[srv] += 1;
                if (t >= cfg_.burn_in) metrics_.delivered[srv] += 1;
            }
            if (rr_family_) {
                cur_round_reward_[srv] += delivered ? 1 : 0;
                track_dwell(t, srv, action, transmitted, on, delivered);
            }

            if (cfg_.mode == SimMode::Queued) apply_arrivals(t);

            if (trace_) emit_trace(t, action, transmitted, on);

            // beliefs and the LRU clock
            if (transmitted) {
                omega_ = belief_update(omega_, srv, states_[srv], cfg_.channels);
                if (tracker_) {
                    tracker_->observe(srv, states_[srv]);
                    for (int k = 0; k < n_; ++k)
                        if (k != srv) tracker_->step_idle(k);
                }
            } else {
                omega_ = belief_update(omega_, std::nullopt, std::nullopt, cfg_.channels);
                if (tracker_)
                    for (int k = 0; k < n_; ++k) tracker_->step_idle(k);
            }
            if (tracker_) check_tracker(t);
            for (int k = 0; k < n_; ++k)
                if (ages_[k] != kNeverServed) ages_[k] += 1;
            if (transmitted) ages_[srv] = 0;

            // next mode feedback: a silent slot advances the round machine as
            // a NACK would, but the belief saw no observation
            feedback_ = transmitted ? std::optional<Feedback>(on ? Feedback::Ack : Feedback::Nack)
                                    : std::optional<Feedback>(Feedback::Nack);
            if (action.kind == PacketKind::None) feedback_.reset();

            states_ = sample_step(states_, cfg_.channels, rng_);

            if (metrics_.overflow) {
                metrics_.total_slots = t + 1;
                break;
            }
        }
        finalize();
        return std::move(metrics_);
    }

private:
    void validate() const { validate_sim_config(cfg_); }

    void init() {
        states_ = sample_stationary(cfg_.channels, rng_);
        omega_ = cfg_.initial_belief ? *cfg_.initial_belief : stationary_belief(cfg_.channels);
        ages_.assign(n_, kNeverServed);
        queue_.assign(n_, 0);
        delivered_all_.assign(n_, 0);
        arrival_count_.assign(n_, 0);
        cur_round_reward_.assign(n_, 0);
        round_reward_sum_.assign(n_, 0.0);
        metrics_.delivered.assign(n_, 0);
        metrics_.series_stride = cfg_.series_stride;
        if (cfg_.debug_belief_tracking) tracker_.emplace(cfg_.channels);

        rr_family_ = !std::holds_alternative<UntilNackPolicy>(cfg_.policy);
        if (const auto* un = std::get_if<UntilNackPolicy>(&cfg_.policy)) {
            until_.n_channels = n_;
            until_.position = 0;
            until_.lru_variant = un->lru_variant;
        }
        if (trace_) {
            *trace_ << "# memsched-csv v1\nslot,served,kind,state,feedback";
            for (int k = 1; k <= n_; ++k) *trace_ << ",omega_" << k;
            *trace_ << "\n";
        }
    }

    ActivationVector pick_phi(std::uint64_t t) {
        if (const auto* fixed = std::get_if<FixedRRPolicy>(&cfg_.policy)) return fixed->phi;
        if (const auto* rand = std::get_if<RandRRPolicy>(&cfg_.policy))
            return rand->spec.sample(rng_);
        const auto& qrr = std::get<QRRPolicy>(cfg_.policy);
        std::vector<double> backlog(queue_.begin(), queue_.end());
        std::vector<double> lambda;
        if (qrr.config.rate_source == QRRConfig::RateSource::EmpiricalEstimate) {
            lambda.resize(n_);
            for (int k = 0; k < n_; ++k)
                lambda[k] = static_cast<double>(arrival_count_[k]) /
                            static_cast<double>(std::max<std::uint64_t>(t, 1));
        } else {
            lambda = qrr.config.lambda.empty() ? cfg_.arrivals.lambda : qrr.config.lambda;
        }
        return qrr_select(backlog, lambda, cfg_.channels).phi;
    }

    void start_round(std::uint64_t t) {
        if (round_) {
            metrics_.rounds += 1;
            completed_round_slots_ += t - round_start_;
            for (int k = 0; k < n_; ++k) {
                round_reward_sum_[k] += static_cast<double>(cur_round_reward_[k]);
                cur_round_reward_[k] = 0;
            }
        }
        round_start_ = t;
        round_ = make_round(pick_phi(t), ages_);
    }

    SlotAction next_action(std::uint64_t t) {
        if (!rr_family_) return until_nack_step(until_, feedback_, ages_);

        RrStepResult res;
        if (!round_) {
            start_round(t);
            res = rr_step(*round_, omega_, std::nullopt, cfg_.channels, rng_);
        } else {
            res = rr_step(*round_, omega_, feedback_, cfg_.channels, rng_);
            if (res.round_ended) {
                start_round(t);
                res = rr_step(*round_, omega_, std::nullopt, cfg_.channels, rng_);
            }
        }
        if (res.round_ended || res.action.kind == PacketKind::None)
            throw std::logic_error("sim: round machine produced no action");
        if (res.floor_violated) {
            metrics_.floor_violations += 1;
            if (cfg_.assertions_on)
                throw std::logic_error("sim: belief floor violated at slot " + std::to_string(t) +
                                       " on channel " + std::to_string(*res.action.served + 1));
        }
        return res.action;
    }

    void track_dwell(std::uint64_t t, int srv, const SlotAction& action, bool transmitted,
                     bool on, bool delivered) {
        if (visit_channel_ == -1) {
            visit_channel_ = srv;
            visit_mask_ = round_->phi.mask();
            visit_len_ = 0;
            visit_delivered_ = 0;
        } else if (visit_channel_ != srv) {
            throw std::logic_error("sim: channel switch without a closed visit at slot " +
                                   std::to_string(t));
        }
        visit_len_ += 1;
        visit_delivered_ += delivered ? 1 : 0;

        const bool visit_over = action.kind == PacketKind::Dummy ||
                                (action.kind == PacketKind::Data && (!transmitted || !on));
        if (!visit_over) return;

        auto& hist = metrics_.dwell_hist[{visit_mask_, visit_channel_}];
        if (hist.size() < visit_len_) hist.resize(visit_len_, 0);
        hist[visit_len_ - 1] += 1;
        if (cfg_.record_dwell_sequences)
            metrics_.dwell_seq[{visit_mask_, visit_channel_}].push_back(visit_len_);

        if (cfg_.mode == SimMode::Saturated && cfg_.assertions_on &&
            visit_delivered_ != visit_len_ - 1)
            throw std::logic_error("sim: packets per visit != dwell - 1 at slot " +
                                   std::to_string(t));
        visit_channel_ = -1;
    }

    void apply_arrivals(std::uint64_t) {
        const auto& a = cfg_.arrivals;
        for (int k = 0; k < n_; ++k) {
            std::uint64_t count = 0;
            if (a.law == ArrivalLaw::Bernoulli) {
                count = rng_.bernoulli(a.lambda[k]) ? 1 : 0;
            } else {
                const double p = a.lambda[k] / static_cast<double>(a.a_max);
                for (int j = 0; j < a.a_max; ++j)
                    if (rng_.bernoulli(p)) ++count;
            }
            queue_[k] += count;
            arrival_count_[k] += count;
            if (queue_[k] > cfg_.backlog_cap) metrics_.overflow = true;
        }
    }

    void check_tracker(std::uint64_t t) {
        for (int k = 0; k < n_; ++k) {
            if (!tracker_->consistent(k, omega_[k])) {
                metrics_.floor_violations += 1;
                if (cfg_.assertions_on)
                    throw std::logic_error("sim: belief left closed-form state set at slot " +
                                           std::to_string(t));
            }
        }
    }

    void emit_trace(std::uint64_t t, const SlotAction& action, bool transmitted, bool on) {
        *trace_ << t << ',' << (*action.served + 1) << ',' << kind_name(action.kind) << ',';
        for (int k = 0; k < n_; ++k) *trace_ << (states_[k] == ChannelState::On ? '1' : '0');
        *trace_ << ',' << (transmitted ? (on ? "ack" : "nack") : "-");
        char buf[32];
        for (int k = 0; k < n_; ++k) {
            std::snprintf(buf, sizeof buf, "%.12g", omega_[k]);
            *trace_ << ',' << buf;
        }
        *trace_ << '\n';
    }

    void finalize() {
        if (metrics_.total_slots == 0) metrics_.total_slots = cfg_.horizon;
        metrics_.measured_slots =
            metrics_.total_slots > cfg_.burn_in ? metrics_.total_slots - cfg_.burn_in : 0;
        metrics_.throughput.assign(n_, 0.0);
        if (metrics_.measured_slots > 0)
            for (int k = 0; k < n_; ++k)
                metrics_.throughput[k] = static_cast<double>(metrics_.delivered[k]) /
                                         static_cast<double>(metrics_.measured_slots);
        metrics_.final_backlog.assign(queue_.begin(), queue_.end());
        metrics_.mean_round_reward.assign(n_, 0.0);
        if (metrics_.rounds > 0) {
            metrics_.mean_round_length = static_cast<double>(completed_round_slots_) /
                                         static_cast<double>(metrics_.rounds);
            for (int k = 0; k < n_; ++k)
                metrics_.mean_round_reward[k] =
                    round_reward_sum_[k] / static_cast<double>(metrics_.rounds);
        }
    }

    const SimConfig& cfg_;
    std::ostream* trace_;
    Rng rng_;
    int n_;

    ChannelStateSample states_;
    BeliefVector omega_;
    AgeVector ages_;
    std::vector<std::uint64_t> queue_;
    std::vector<std::uint64_t> delivered_all_;
    std::vector<std::uint64_t> arrival_count_;
    std::optional<BeliefTracker> tracker_;
    std::optional<Feedback> feedback_;

    bool rr_family_ = true;
    std::optional<RoundRobinState> round_;
    UntilNackState until_;

    int visit_channel_ = -1;
    std::uint64_t visit_mask_ = 0;
    std::uint32_t visit_len_ = 0;
    std::uint64_t visit_delivered_ = 0;

    std::uint64_t round_start_ = 0;
    std::uint64_t completed_round_slots_ = 0;
    std::vector<double> round_reward_sum_;
    std::vector<std::uint64_t> cur_round_reward_;

    SimMetrics metrics_;
};

} // namespace

void validate_sim_config(const SimConfig& cfg) {
    const auto n = cfg.channels.size();
    if (n == 0) throw std::invalid_argument("sim: at least one channel required");
    if (cfg.horizon < 1) throw std::invalid_argument("sim: horizon must be >= 1");
    if (cfg.burn_in >= cfg.horizon)
        throw std::invalid_argument("sim: burn-in must be shorter than the horizon");
    if (cfg.series_stride < 1) throw std::invalid_argument("sim: series stride must be >= 1");

    if (const auto* fixed = std::get_if<FixedRRPolicy>(&cfg.policy)) {
        if (static_cast<std::size_t>(fixed->phi.size()) != n)
            throw std::invalid_argument("sim: activation vector length != channel count");
    } else if (const auto* rand = std::get_if<RandRRPolicy>(&cfg.policy)) {
        if (static_cast<std::size_t>(rand->spec.n_channels()) != n)
            throw std::invalid_argument("sim: randrr weights dimension != channel count");
    } else if (const auto* qrr = std::get_if<QRRPolicy>(&cfg.policy)) {
        if (cfg.mode != SimMode::Queued)
            throw std::invalid_argument("sim: qrr runs in queued mode only");
        if (!qrr->config.lambda.empty() && qrr->config.lambda.size() != n)
            throw std::invalid_argument("sim: qrr lambda dimension != channel count");
        for (double l : qrr->config.lambda)
            if (l < 0.0 || l >= 1.0)
                throw std::invalid_argument("sim: qrr lambda entries must be in [0, 1)");
    }

    if (cfg.mode == SimMode::Queued) {
        const auto& a = cfg.arrivals;
        if (a.lambda.size() != n)
            throw std::invalid_argument("sim: arrival rate dimension != channel count");
        if (a.a_max < 1) throw std::invalid_argument("sim: a_max must be >= 1");
        for (double l : a.lambda)
            if (l < 0.0 || l > static_cast<double>(a.a_max))
                throw std::invalid_argument("sim: arrival rate must be in [0, a_max]");
    }
    if (cfg.initial_belief) {
        if (cfg.initial_belief->size() != n)
            throw std::invalid_argument("sim: initial belief dimension != channel count");
        for (double w : *cfg.initial_belief)
            if (w < 0.0 || w > 1.0)
                throw std::invalid_argument("sim: initial belief entries must be in [0, 1]");
    }
}

SimMetrics run_saturated(const SimConfig& config, std::ostream* trace) {
    if (config.mode != SimMode::Saturated)
        throw std::invalid_argument("run_saturated: config mode must be saturated");
    return Engine(config, trace).run();
}

SimMetrics run_queued(const SimConfig& config, std::ostream* trace) {
    if (config.mode != SimMode::Queued)
        throw std::invalid_argument("run_queued: config mode must be queued");
    return Engine(config, trace).run();
}

SimMetrics run(const SimConfig& config, std::ostream* trace) {
    return Engine(config, trace).run();
}

std::vector<SimMetrics> run_replicated(const SimConfig& config, unsigned replications,
                                       unsigned threads) {
    std::vector<SimMetrics> results(replications);
    if (replications == 0) return results;
    threads = std::max(1u, std::min(threads, replications));

    const auto worker = [&](unsigned first, unsigned step) {
        for (unsigned rep = first; rep < replications; rep += step) {
            SimConfig local = config;
            if (rep > 0) local.seed = Rng::child(config.seed, rep).raw();
            results[rep] = Engine(local, nullptr).run();
        }
    };
    if (threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker, i, threads);
        for (auto& th : pool) th.join();
    }
    return results;
}

DwellPmfEstimate collect_dwell_histogram(const SimMetrics& metrics, std::uint64_t mask,
                                         int channel) {
    DwellPmfEstimate est;
    const auto it = metrics.dwell_hist.find({mask, channel});
    if (it == metrics.dwell_hist.end()) return est;
    for (auto c : it->second) est.visits += c;
    est.pmf.resize(it->second.size(), 0.0);
    if (est.visits > 0)
        for (std::size_t j = 0; j < it->second.size(); ++j)
            est.pmf[j] = static_cast<double>(it->second[j]) / static_cast<double>(est.visits);
    return est;
}

} // namespace memsched
