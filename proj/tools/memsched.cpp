#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "memsched/capacity.hpp"
#include "memsched/config.hpp"
#include "memsched/io.hpp"
#include "memsched/simulator.hpp"
#include "memsched/verify.hpp"

namespace fs = std::filesystem;
using namespace memsched;

namespace {

constexpr int kExitFailure = 1;    // runtime failure / failed verification
constexpr int kExitBadConfig = 2;  // validation error

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::optional<unsigned> replications;
    std::optional<unsigned> threads;
};

config::ExperimentConfig load_config(const CommonFlags& flags, bool required) {
    config::ExperimentConfig cfg;
    if (!flags.config_path.empty())
        cfg = config::load_experiment(flags.config_path);
    else if (required)
        throw std::invalid_argument("a --config file is required");
    else
        cfg = config::experiment_from_text(config::default_config_text());
    if (flags.seed) cfg.sim.seed = *flags.seed;
    if (flags.horizon) {
        cfg.sim.horizon = *flags.horizon;
        cfg.sim.burn_in = std::min(cfg.sim.burn_in, cfg.sim.horizon / 10);
    }
    if (flags.replications) cfg.replications = *flags.replications;
    if (flags.threads) cfg.threads = *flags.threads;
    validate_sim_config(cfg.sim);
    return cfg;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

int cmd_simulate(const CommonFlags& flags, bool trace) {
    const auto cfg = load_config(flags, true);
    fs::create_directories(flags.out_dir);

    std::vector<SimMetrics> reps;
    if (trace) {
        // replication 0 carries the trace; the pool handles the rest
        auto trace_file = open_out(fs::path(flags.out_dir) / "trace.csv");
        reps = run_replicated(cfg.sim, cfg.replications, cfg.threads);
        reps[0] = run(cfg.sim, &trace_file);
    } else {
        reps = run_replicated(cfg.sim, cfg.replications, cfg.threads);
    }

    {
        auto out = open_out(fs::path(flags.out_dir) / "summary.json");
        out << io::summary_json(cfg, reps);
    }
    {
        auto out = open_out(fs::path(flags.out_dir) / "series.csv");
        io::write_series_csv(out, reps.front());
    }

    bool violated = false;
    for (const auto& m : reps)
        if (m.floor_violations > 0) violated = true;
    if (violated) {
        std::cerr << "simulate: belief-floor violations recorded\n";
        return kExitFailure;
    }
    std::cout << "wrote " << (fs::path(flags.out_dir) / "summary.json").string() << " and series.csv\n";
    return 0;
}

int cmd_region(const CommonFlags& flags, const std::string& directions_file, int directions_override) {
    auto cfg = load_config(flags, true);
    const auto& channels = cfg.sim.channels;
    const int n = static_cast<int>(channels.size());
    fs::create_directories(flags.out_dir);
    if (directions_override > 0) cfg.region_directions = directions_override;

    std::vector<DirectionVector> directions;
    if (!directions_file.empty()) {
        std::ifstream in(directions_file);
        if (!in) throw std::invalid_argument("cannot open directions file '" + directions_file + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::vector<double> v;
            std::string cell;
            std::istringstream row(line);
            while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
            directions.emplace_back(std::move(v));
        }
    } else if (n == 1) {
        directions.emplace_back(std::vector<double>{1.0});
    } else if (n == 2) {
        const int count = std::max(2, cfg.region_directions);
        for (int i = 0; i < count; ++i) {
            const double angle = (M_PI / 2.0) * static_cast<double>(i) /
                                 static_cast<double>(count - 1);
            directions.emplace_back(std::vector<double>{std::cos(angle), std::sin(angle)});
        }
    } else {
        // deterministic fan over the simplex for higher dimensions
        Rng rng(cfg.sim.seed);
        for (int i = 0; i < cfg.region_directions; ++i) {
            std::vector<double> v(n);
            double sum = 0.0;
            for (int k = 0; k < n; ++k) {
                v[k] = -std::log(1.0 - rng.uniform());
                sum += v[k];
            }
            for (auto& x : v) x /= sum;
            directions.emplace_back(std::move(v));
        }
    }

    const RegionModel region(channels);
    const auto rows = boundary_sweep(region, directions);

    bool symmetric = true;
    for (const auto& ch : channels)
        if (std::abs(ch.p01() - channels[0].p01()) > 1e-15 ||
            std::abs(ch.p10() - channels[0].p10()) > 1e-15)
            symmetric = false;

    std::optional<double> blind, gain;
    if (symmetric) {
        blind = channels[0].pi_on(); // treating the channels as memoryless caps the sum rate here
        if (n >= 2) {
            gain = (c_of_m(channels[0], n) - c_of_m(channels[0], 1)) / c_of_m(channels[0], 1);
            std::cout << "memory gain (c_" << n << " - c_1)/c_1 = " << *gain * 100.0 << "%\n";
        }
    } else {
        std::cerr << "region: asymmetric channels, blind reference line omitted\n";
    }

    auto out = open_out(fs::path(flags.out_dir) / "sweep.csv");
    io::write_sweep_csv(out, rows, blind, gain);
    std::cout << "wrote " << (fs::path(flags.out_dir) / "sweep.csv").string() << " ("
              << rows.size() << " directions)\n";
    return 0;
}

int cmd_convert_weights(const CommonFlags& flags, const std::string& in_file,
                        const std::string& out_file) {
    const auto cfg = load_config(flags, true);
    const int n = static_cast<int>(cfg.sim.channels.size());

    const auto file = io::load_weights(in_file);
    const MixtureWeights input(file.kind, io::to_mask_weights(file.weights, n));
    const bool to_beta = file.kind == WeightKind::PerRoundSelection;
    const auto converted = to_beta ? alpha_to_beta(input, cfg.sim.channels)
                                   : beta_to_alpha(input, cfg.sim.channels);

    // embedded round-trip check
    const auto back = to_beta ? beta_to_alpha(converted, cfg.sim.channels)
                              : alpha_to_beta(converted, cfg.sim.channels);
    double worst = 0.0;
    for (const auto& [mask, w] : input.weights())
        worst = std::max(worst, std::abs(w - back.weights().at(mask)));
    if (worst > 1e-12)
        throw std::runtime_error("convert-weights: round-trip residual " + std::to_string(worst));

    io::WeightFile out;
    out.kind = converted.kind();
    out.weights = io::to_bitstring_weights(converted.weights(), n);
    const std::string text = io::weights_json(out);
    if (out_file.empty() || out_file == "-") {
        std::cout << text;
    } else {
        auto os = open_out(out_file);
        os << text;
        std::cout << "wrote " << out_file << " (round-trip residual " << worst << ")\n";
    }
    return 0;
}

int cmd_verify(const CommonFlags& flags, bool quick, const std::string& inject_fault) {
    const auto cfg = load_config(flags, false);
    fs::create_directories(flags.out_dir);

    verify::Options opt;
    opt.quick = quick;
    opt.seed = flags.seed.value_or(7001);
    opt.inject_fault = inject_fault;
    const auto verdicts = verify::run_suite(cfg.sim.channels, opt);

    for (const auto& v : verdicts)
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.id << ": " << v.statistic << " = "
                  << v.value << " (bound " << v.bound << ")"
                  << (v.note.empty() ? "" : " — " + v.note) << "\n";

    auto out = open_out(fs::path(flags.out_dir) / "verdicts.json");
    out << io::verdicts_json(verdicts);

    if (!verify::all_passed(verdicts)) {
        std::cerr << "verify: FAILED\n";
        return kExitFailure;
    }
    std::cout << "verify: all checks passed\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"memsched: downlink scheduling over unprobed Markov ON/OFF channels"};
    app.require_subcommand(1);

    CommonFlags flags;
    bool trace = false, quick = false;
    std::string directions_file, in_file, out_file, inject_fault;
    int directions_override = 0;

    const auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config,-c", flags.config_path, "experiment config file");
        if (needs_config) opt->required();
        cmd->add_option("--out,-o", flags.out_dir, "output directory");
        cmd->add_option("--seed", flags.seed, "override the config seed");
        cmd->add_option("--horizon", flags.horizon, "override the config horizon");
        cmd->add_option("--replications", flags.replications, "override replication count");
        cmd->add_option("--threads", flags.threads, "worker pool size");
    };

    auto* simulate = app.add_subcommand("simulate", "run the slot simulator");
    add_common(simulate, true);
    simulate->add_flag("--trace", trace, "emit per-slot trace.csv");

    auto* region = app.add_subcommand("region", "sweep the inner/outer rate-region boundaries");
    add_common(region, true);
    region->add_option("--directions-file", directions_file, "CSV of direction vectors");
    region->add_option("--directions", directions_override, "number of sweep directions");

    auto* convert = app.add_subcommand("convert-weights",
                                       "convert mixture weights between alpha and beta");
    add_common(convert, true);
    convert->add_option("--in", in_file, "input weights JSON")->required();
    convert->add_option("--out-file", out_file, "output JSON ('-' for stdout)");

    auto* verify_cmd = app.add_subcommand("verify", "run the verification battery");
    add_common(verify_cmd, false);
    verify_cmd->add_flag("--quick", quick, "reduced horizons, looser slack");
    verify_cmd->add_option("--inject-fault", inject_fault, "corrupt a value (harness self-test)")
        ->group("");

    auto* config_cmd = app.add_subcommand("config", "configuration helpers");
    auto* show = config_cmd->add_subcommand("show-defaults", "print the default config");
    auto* validate = config_cmd->add_subcommand("validate", "check a config file");
    validate->add_option("--config,-c", flags.config_path, "experiment config file")->required();
    config_cmd->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(flags, trace);
        if (region->parsed()) return cmd_region(flags, directions_file, directions_override);
        if (convert->parsed()) return cmd_convert_weights(flags, in_file, out_file);
        if (verify_cmd->parsed()) return cmd_verify(flags, quick, inject_fault);
        if (config_cmd->parsed()) {
            if (show->parsed()) {
                std::cout << config::default_config_text();
                return 0;
            }
            if (validate->parsed()) {
                config::load_experiment(flags.config_path);
                std::cout << "config ok\n";
                return 0;
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return 0;
}
