#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memsched/channel.hpp"

namespace memsched::verify {

struct Verdict {
    std::string id;
    std::string statistic; // what was measured
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string note;
};

struct Options {
    bool quick = false;        // reduced horizons (1e5) and looser slack
    std::uint64_t seed = 7001;
    std::string inject_fault;  // e.g. "c_m": corrupt a value so its check fails
};

// Full check battery: closed forms against simulation, dwell law, belief
// floor, coupling and bandit bounds, weight conversions, region geometry and
// queue stability.  `channels` feeds the generic region checks; the
// reference-value checks run on the canonical symmetric pair.
std::vector<Verdict> run_suite(const std::vector<ChannelParams>& channels, const Options& opt);

bool all_passed(const std::vector<Verdict>& verdicts);

} // namespace memsched::verify
