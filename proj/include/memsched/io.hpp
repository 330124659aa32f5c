#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "memsched/capacity.hpp"
#include "memsched/config.hpp"
#include "memsched/simulator.hpp"
#include "memsched/verify.hpp"

namespace memsched::io {

// weight files: {"kind": "alpha"|"beta", "weights": {"1010": w, ...}};
// a bare {"bitstring": w} object is read as alpha weights
struct WeightFile {
    WeightKind kind = WeightKind::PerRoundSelection;
    std::map<std::string, double> weights;
};

WeightFile load_weights(const std::string& path);
WeightFile parse_weights(const std::string& json_text);
std::string weights_json(const WeightFile& w);

std::map<std::uint64_t, double> to_mask_weights(const std::map<std::string, double>& bitstrings,
                                                int n_channels);
std::map<std::string, double> to_bitstring_weights(const std::map<std::uint64_t, double>& masks,
                                                   int n_channels);

// simulate outputs
std::string summary_json(const config::ExperimentConfig& cfg,
                         const std::vector<SimMetrics>& replications);
void write_series_csv(std::ostream& os, const SimMetrics& m);

// region outputs
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     std::optional<double> blind_sum_cap, std::optional<double> memory_gain);

// verify outputs
std::string verdicts_json(const std::vector<verify::Verdict>& verdicts);

} // namespace memsched::io
