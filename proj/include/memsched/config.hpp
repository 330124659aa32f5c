#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "memsched/simulator.hpp"

namespace memsched::config {

// Minimal parser for the experiment config format: `key = value` pairs,
// `[table]` sections and repeated `[[table]]` array sections, with #-comments.
// Values: booleans, integers, floats, "strings", and flat [a, b, c] arrays.
struct Value {
    std::variant<bool, std::int64_t, double, std::string, std::vector<Value>> v;

    bool is_array() const { return std::holds_alternative<std::vector<Value>>(v); }
    bool as_bool() const;
    std::int64_t as_int() const;
    double as_double() const; // accepts integer literals
    const std::string& as_string() const;
    const std::vector<Value>& as_array() const;
};

struct Table {
    std::map<std::string, Value> values;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> table_arrays;
};

Table parse(const std::string& text); // throws std::invalid_argument with line info

// Fully validated experiment description; every module precondition is
// checked here before anything runs.
struct ExperimentConfig {
    SimConfig sim;
    unsigned replications = 1;
    unsigned threads = 1;
    int region_directions = 360;
};

ExperimentConfig experiment_from_text(const std::string& text);
ExperimentConfig load_experiment(const std::string& path);

// the default config, with every knob spelled out
std::string default_config_text();

} // namespace memsched::config
