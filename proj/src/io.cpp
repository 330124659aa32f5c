#include "memsched/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "memsched/stats.hpp"

#include "json.hpp"

namespace memsched::io {

using nlohmann::json;

WeightFile parse_weights(const std::string& text) {
    const json j = json::parse(text);
    WeightFile w;
    const json* map = &j;
    if (j.contains("kind")) {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "alpha")
            w.kind = WeightKind::PerRoundSelection;
        else if (kind == "beta")
            w.kind = WeightKind::TimeFraction;
        else
            throw std::invalid_argument("weights: kind must be alpha or beta");
        map = &j.at("weights");
    }
    for (const auto& [key, value] : map->items()) {
        if (!value.is_number())
            throw std::invalid_argument("weights: '" + key + "' is not a number");
        w.weights[key] = value.get<double>();
    }
    if (w.weights.empty()) throw std::invalid_argument("weights: empty map");
    return w;
}

WeightFile load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("weights: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_weights(buf.str());
}

std::string weights_json(const WeightFile& w) {
    json j;
    j["kind"] = w.kind == WeightKind::PerRoundSelection ? "alpha" : "beta";
    j["weights"] = json::object();
    for (const auto& [key, value] : w.weights) j["weights"][key] = value;
    return j.dump(2) + "\n";
}

std::map<std::uint64_t, double> to_mask_weights(const std::map<std::string, double>& bitstrings,
                                                int n_channels) {
    std::map<std::uint64_t, double> out;
    for (const auto& [bits, w] : bitstrings) {
        const auto phi = ActivationVector::from_string(bits);
        if (phi.size() != n_channels)
            throw std::invalid_argument("weights: '" + bits + "' length != channel count");
        out[phi.mask()] += w;
    }
    return out;
}

std::map<std::string, double> to_bitstring_weights(const std::map<std::uint64_t, double>& masks,
                                                   int n_channels) {
    std::map<std::string, double> out;
    for (const auto& [mask, w] : masks)
        out[ActivationVector::from_mask(mask, n_channels).to_string()] = w;
    return out;
}

namespace {

json policy_json(const PolicySpec& policy) {
    json j;
    if (const auto* fixed = std::get_if<FixedRRPolicy>(&policy)) {
        j["kind"] = "rr";
        j["phi"] = fixed->phi.to_string();
    } else if (const auto* rand = std::get_if<RandRRPolicy>(&policy)) {
        j["kind"] = "randrr";
        j["weights"] = json::object();
        for (const auto& [mask, w] : rand->spec.weights())
            j["weights"][ActivationVector::from_mask(mask, rand->spec.n_channels()).to_string()] =
                w;
    } else if (const auto* qrr = std::get_if<QRRPolicy>(&policy)) {
        j["kind"] = "qrr";
        j["lambda"] = qrr->config.lambda;
        j["rate_source"] = qrr->config.rate_source == QRRConfig::RateSource::Known
                               ? "known"
                               : "empirical";
    } else if (const auto* un = std::get_if<UntilNackPolicy>(&policy)) {
        j["kind"] = "until-nack";
        j["lru_variant"] = un->lru_variant;
    }
    return j;
}

json metrics_json(const SimMetrics& m, bool queued) {
    json j;
    j["total_slots"] = m.total_slots;
    j["measured_slots"] = m.measured_slots;
    j["delivered"] = m.delivered;
    j["throughput"] = m.throughput;
    double sum = 0.0;
    for (double t : m.throughput) sum += t;
    j["sum_throughput"] = sum;
    j["rounds"] = m.rounds;
    j["mean_round_length"] = m.mean_round_length;
    j["mean_round_reward"] = m.mean_round_reward;
    j["floor_violations"] = m.floor_violations;
    j["overflow"] = m.overflow;
    if (queued) {
        j["final_backlog"] = m.final_backlog;
        const auto rep = stats::assess_stability(m.backlog_series);
        j["stability"] = {{"mid_mean", rep.mid_mean},
                          {"last_decile_mean", rep.last_decile_mean},
                          {"slope", rep.slope},
                          {"slope_se", rep.slope_se},
                          {"plateaued", rep.plateaued},
                          {"slope_ci_has_zero", rep.slope_ci_has_zero},
                          {"slope_positive", rep.slope_positive},
                          {"stable", rep.stable}};
    }
    return j;
}

} // namespace

std::string summary_json(const config::ExperimentConfig& cfg,
                         const std::vector<SimMetrics>& replications) {
    json j;
    j["config"] = {{"mode", cfg.sim.mode == SimMode::Saturated ? "saturated" : "queued"},
                   {"horizon", cfg.sim.horizon},
                   {"burn_in", cfg.sim.burn_in},
                   {"seed", cfg.sim.seed},
                   {"replications", cfg.replications},
                   {"policy", policy_json(cfg.sim.policy)}};
    j["config"]["channels"] = json::array();
    for (const auto& ch : cfg.sim.channels)
        j["config"]["channels"].push_back({{"p01", ch.p01()}, {"p10", ch.p10()}});
    if (cfg.sim.mode == SimMode::Queued) {
        j["config"]["arrivals"] = {
            {"law", cfg.sim.arrivals.law == ArrivalLaw::Bernoulli ? "bernoulli"
                                                                  : "truncated-binomial"},
            {"lambda", cfg.sim.arrivals.lambda},
            {"a_max", cfg.sim.arrivals.a_max}};
    }

    const bool queued = cfg.sim.mode == SimMode::Queued;
    j["replications"] = json::array();
    std::vector<double> mean_thr(cfg.sim.channels.size(), 0.0);
    for (const auto& m : replications) {
        j["replications"].push_back(metrics_json(m, queued));
        for (std::size_t n = 0; n < mean_thr.size(); ++n) mean_thr[n] += m.throughput[n];
    }
    if (!replications.empty())
        for (auto& t : mean_thr) t /= static_cast<double>(replications.size());
    double sum = 0.0;
    for (double t : mean_thr) sum += t;
    j["merged"] = {{"mean_throughput", mean_thr}, {"mean_sum_throughput", sum}};
    return j.dump(2) + "\n";
}

void write_series_csv(std::ostream& os, const SimMetrics& m) {
    os << "# memsched-csv v1\n";
    os << "slot,sum_backlog";
    const std::size_t n = m.delivered.size();
    for (std::size_t k = 1; k <= n; ++k) os << ",cum_delivered_" << k;
    os << "\n";
    char buf[32];
    for (std::size_t i = 0; i < m.series_slots.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.12g", m.backlog_series[i]);
        os << m.series_slots[i] << ',' << buf;
        for (std::size_t k = 0; k < n; ++k) os << ',' << m.delivered_series[i][k];
        os << "\n";
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     std::optional<double> blind_sum_cap, std::optional<double> memory_gain) {
    os << "# memsched-csv v1\n";
    if (memory_gain) os << "# memory_gain = " << *memory_gain << "\n";
    if (rows.empty()) return;
    const std::size_t n = rows.front().direction.size();
    for (std::size_t k = 1; k <= n; ++k) os << (k == 1 ? "" : ",") << "v_" << k;
    for (std::size_t k = 1; k <= n; ++k) os << ",inner_" << k;
    for (std::size_t k = 1; k <= n; ++k) os << ",outer_" << k;
    os << ",sum_gap";
    if (blind_sum_cap)
        for (std::size_t k = 1; k <= n; ++k) os << ",blind_" << k;
    os << "\n";

    char buf[32];
    const auto put = [&](double x, bool lead_comma) {
        std::snprintf(buf, sizeof buf, "%.12g", x);
        if (lead_comma) os << ',';
        os << buf;
    };
    for (const auto& row : rows) {
        double norm1 = 0.0;
        for (double x : row.direction) norm1 += x;
        for (std::size_t k = 0; k < n; ++k) put(row.direction[k], k > 0);
        for (std::size_t k = 0; k < n; ++k) put(row.inner_point[k], true);
        for (std::size_t k = 0; k < n; ++k) put(row.outer_point[k], true);
        put(row.sum_gap, true);
        if (blind_sum_cap)
            for (std::size_t k = 0; k < n; ++k)
                put(*blind_sum_cap * row.direction[k] / norm1, true);
        os << "\n";
    }
}

std::string verdicts_json(const std::vector<verify::Verdict>& verdicts) {
    json j;
    j["all_passed"] = verify::all_passed(verdicts);
    j["checks"] = json::array();
    for (const auto& v : verdicts) {
        json c = {{"id", v.id},
                  {"statistic", v.statistic},
                  {"value", v.value},
                  {"bound", v.bound},
                  {"pass", v.pass}};
        if (!v.note.empty()) c["note"] = v.note;
        j["checks"].push_back(c);
    }
    return j.dump(2) + "\n";
}

} // namespace memsched::io
