#include "memsched/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "memsched/io.hpp"

namespace memsched::config {

bool Value::as_bool() const {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw std::invalid_argument("config: expected a boolean");
}

std::int64_t Value::as_int() const {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    throw std::invalid_argument("config: expected an integer");
}

double Value::as_double() const {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw std::invalid_argument("config: expected a number");
}

const std::string& Value::as_string() const {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw std::invalid_argument("config: expected a string");
}

const std::vector<Value>& Value::as_array() const {
    if (const auto* a = std::get_if<std::vector<Value>>(&v)) return *a;
    throw std::invalid_argument("config: expected an array");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

Value parse_scalar(const std::string& text, int line_no) {
    const std::string s = trim(text);
    if (s.empty())
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unterminated string");
        return {s.substr(1, s.size() - 2)};
    }
    if (s == "true") return {true};
    if (s == "false") return {false};
    try {
        std::size_t used = 0;
        if (s.find_first_of(".eE") == std::string::npos) {
            const std::int64_t i = std::stoll(s, &used);
            if (used == s.size()) return {i};
        } else {
            const double d = std::stod(s, &used);
            if (used == s.size()) return {d};
        }
    } catch (const std::exception&) {
        // fall through
    }
    throw std::invalid_argument("config line " + std::to_string(line_no) + ": bad value '" + s +
                                "'");
}

Value parse_value(const std::string& text, int line_no) {
    const std::string s = trim(text);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']')
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unterminated array");
        std::vector<Value> items;
        std::string body = s.substr(1, s.size() - 2);
        std::string cur;
        bool quoted = false;
        for (char c : body) {
            if (c == '"') quoted = !quoted;
            if (c == ',' && !quoted) {
                items.push_back(parse_scalar(cur, line_no));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!trim(cur).empty()) items.push_back(parse_scalar(cur, line_no));
        return {std::move(items)};
    }
    return parse_scalar(s, line_no);
}

} // namespace

Table parse(const std::string& text) {
    Table root;
    Table* current = &root;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.size() > 3 && line.substr(0, 2) == "[[" && line.substr(line.size() - 2) == "]]") {
            const std::string name = trim(line.substr(2, line.size() - 4));
            root.table_arrays[name].emplace_back();
            current = &root.table_arrays[name].back();
            continue;
        }
        if (line.front() == '[' && line.back() == ']') {
            const std::string name = trim(line.substr(1, line.size() - 2));
            current = &root.tables[name];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        current->values[key] = parse_value(line.substr(eq + 1), line_no);
    }
    return root;
}

namespace {

std::vector<double> double_array(const Value& v) {
    std::vector<double> out;
    for (const auto& item : v.as_array()) out.push_back(item.as_double());
    return out;
}

PolicySpec build_policy(const Table& policy, int n_channels) {
    std::string kind = "rr";
    if (auto it = policy.values.find("kind"); it != policy.values.end())
        kind = it->second.as_string();

    if (kind == "rr") {
        std::string phi(static_cast<std::size_t>(n_channels), '1');
        if (auto it = policy.values.find("phi"); it != policy.values.end())
            phi = it->second.as_string();
        return FixedRRPolicy{ActivationVector::from_string(phi)};
    }
    if (kind == "randrr") {
        std::map<std::uint64_t, double> weights;
        if (auto it = policy.values.find("weights_file"); it != policy.values.end()) {
            const auto file = io::load_weights(it->second.as_string());
            if (file.kind != WeightKind::PerRoundSelection)
                throw std::invalid_argument(
                    "policy: randrr weights file must hold per-round selection probabilities");
            weights = io::to_mask_weights(file.weights, n_channels);
        } else {
            const auto phis_it = policy.values.find("phis");
            const auto w_it = policy.values.find("weights");
            if (phis_it == policy.values.end() || w_it == policy.values.end())
                throw std::invalid_argument(
                    "policy: randrr needs phis + weights arrays or a weights_file");
            const auto& phis = phis_it->second.as_array();
            const auto& ws = w_it->second.as_array();
            if (phis.size() != ws.size())
                throw std::invalid_argument("policy: phis and weights must have equal length");
            for (std::size_t i = 0; i < phis.size(); ++i) {
                const auto phi = ActivationVector::from_string(phis[i].as_string());
                if (phi.size() != n_channels)
                    throw std::invalid_argument("policy: activation length != channel count");
                weights[phi.mask()] += ws[i].as_double();
            }
        }
        return RandRRPolicy{RandRRSpec(std::move(weights), n_channels)};
    }
    if (kind == "qrr") {
        QRRConfig qc;
        if (auto it = policy.values.find("lambda"); it != policy.values.end())
            qc.lambda = double_array(it->second);
        if (auto it = policy.values.find("rate_source"); it != policy.values.end()) {
            const auto& s = it->second.as_string();
            if (s == "known")
                qc.rate_source = QRRConfig::RateSource::Known;
            else if (s == "empirical")
                qc.rate_source = QRRConfig::RateSource::EmpiricalEstimate;
            else
                throw std::invalid_argument("policy: rate_source must be known or empirical");
        }
        return QRRPolicy{std::move(qc)};
    }
    if (kind == "until-nack") {
        UntilNackPolicy p;
        if (auto it = policy.values.find("lru_variant"); it != policy.values.end())
            p.lru_variant = it->second.as_bool();
        return p;
    }
    throw std::invalid_argument("policy: unknown kind '" + kind +
                                "' (rr | randrr | qrr | until-nack)");
}

} // namespace

ExperimentConfig experiment_from_text(const std::string& text) {
    const Table root = parse(text);
    ExperimentConfig cfg;

    const auto channels_it = root.table_arrays.find("channel");
    if (channels_it == root.table_arrays.end() || channels_it->second.empty())
        throw std::invalid_argument("config: at least one [[channel]] block required");
    int idx = 0;
    for (const auto& ch : channels_it->second) {
        ++idx;
        const auto p01 = ch.values.find("p01");
        const auto p10 = ch.values.find("p10");
        if (p01 == ch.values.end() || p10 == ch.values.end())
            throw std::invalid_argument("channel " + std::to_string(idx) +
                                        ": p01 and p10 required");
        try {
            cfg.sim.channels.emplace_back(p01->second.as_double(), p10->second.as_double());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("channel " + std::to_string(idx) + ": " + e.what());
        }
    }
    const int n = static_cast<int>(cfg.sim.channels.size());

    const auto top = [&](const char* key) -> const Value* {
        const auto it = root.values.find(key);
        return it == root.values.end() ? nullptr : &it->second;
    };
    if (const auto* v = top("mode")) {
        const auto& s = v->as_string();
        if (s == "saturated")
            cfg.sim.mode = SimMode::Saturated;
        else if (s == "queued")
            cfg.sim.mode = SimMode::Queued;
        else
            throw std::invalid_argument("config: mode must be saturated or queued");
    }
    if (const auto* v = top("horizon")) cfg.sim.horizon = static_cast<std::uint64_t>(v->as_int());
    if (const auto* v = top("burn_in")) cfg.sim.burn_in = static_cast<std::uint64_t>(v->as_int());
    if (const auto* v = top("seed")) cfg.sim.seed = static_cast<std::uint64_t>(v->as_int());
    if (const auto* v = top("series_stride"))
        cfg.sim.series_stride = static_cast<std::uint64_t>(v->as_int());
    if (const auto* v = top("backlog_cap"))
        cfg.sim.backlog_cap = static_cast<std::uint64_t>(v->as_int());
    if (const auto* v = top("assertions")) cfg.sim.assertions_on = v->as_bool();
    if (const auto* v = top("feedback_on_empty")) cfg.sim.feedback_on_empty = v->as_bool();
    if (const auto* v = top("debug_belief_tracking")) cfg.sim.debug_belief_tracking = v->as_bool();
    if (const auto* v = top("record_dwell_sequences"))
        cfg.sim.record_dwell_sequences = v->as_bool();
    if (const auto* v = top("initial_belief")) cfg.sim.initial_belief = double_array(*v);
    if (const auto* v = top("replications")) {
        if (v->as_int() < 1) throw std::invalid_argument("config: replications must be >= 1");
        cfg.replications = static_cast<unsigned>(v->as_int());
    }
    if (const auto* v = top("threads")) {
        if (v->as_int() < 1) throw std::invalid_argument("config: threads must be >= 1");
        cfg.threads = static_cast<unsigned>(v->as_int());
    }

    if (auto it = root.tables.find("policy"); it != root.tables.end())
        cfg.sim.policy = build_policy(it->second, n);
    else
        cfg.sim.policy = FixedRRPolicy{ActivationVector::from_mask((1ULL << n) - 1, n)};

    if (auto it = root.tables.find("arrivals"); it != root.tables.end()) {
        const auto& t = it->second;
        if (auto l = t.values.find("lambda"); l != t.values.end())
            cfg.sim.arrivals.lambda = double_array(l->second);
        if (auto a = t.values.find("a_max"); a != t.values.end())
            cfg.sim.arrivals.a_max = static_cast<int>(a->second.as_int());
        if (auto l = t.values.find("law"); l != t.values.end()) {
            const auto& s = l->second.as_string();
            if (s == "bernoulli")
                cfg.sim.arrivals.law = ArrivalLaw::Bernoulli;
            else if (s == "truncated-binomial")
                cfg.sim.arrivals.law = ArrivalLaw::TruncatedBinomial;
            else
                throw std::invalid_argument(
                    "config: arrivals.law must be bernoulli or truncated-binomial");
        }
    }

    if (auto it = root.tables.find("region"); it != root.tables.end()) {
        if (auto d = it->second.values.find("directions"); d != it->second.values.end()) {
            if (d->second.as_int() < 1)
                throw std::invalid_argument("config: region directions must be >= 1");
            cfg.region_directions = static_cast<int>(d->second.as_int());
        }
    }

    validate_sim_config(cfg.sim);
    return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return experiment_from_text(buf.str());
}

std::string default_config_text() {
    return R"(# memsched experiment configuration (all defaults shown)

mode = "saturated"        # saturated | queued
horizon = 1000000         # slots
burn_in = 10000           # slots excluded from throughput estimates
seed = 1
replications = 1
threads = 1
series_stride = 1000      # sampling period of the time series
backlog_cap = 1000000000  # per-queue overflow guard (queued mode)
assertions = true         # stop on internal invariant violations
feedback_on_empty = true  # empty-queue data slots still elicit ACK/NACK

[[channel]]               # one block per user; p01 + p10 < 1, both > 0
p01 = 0.2
p10 = 0.2

[[channel]]
p01 = 0.2
p10 = 0.2

[policy]
kind = "rr"               # rr | randrr | qrr | until-nack
phi = "11"                # rr: served subset, channel 1 first
# randrr:  phis = ["10", "01", "11"]   weights = [0.25, 0.25, 0.5]
#          or weights_file = "alpha.json"
# qrr:     lambda = [0.25, 0.25]       rate_source = "known" | "empirical"
#          (lambda defaults to the arrival rates)
# until-nack: lru_variant = false

[arrivals]                # queued mode
law = "bernoulli"         # bernoulli | truncated-binomial
lambda = [0.25, 0.25]
a_max = 1

[region]
directions = 360          # sweep resolution of the region command
)";
}

} // namespace memsched::config
