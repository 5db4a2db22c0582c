#pragma once

#include <string>
#include <vector>

#include "bcn/network.hpp"
#include "bcn/online.hpp"

namespace bcn {

struct AnalysisReport {
    std::string name;
    unsigned ell = 0, m = 0, n = 0;
    GammaMode mode = GammaMode::reachable;

    bool controllable = false;
    bool type1 = false, type2 = false, type3 = false, type4 = false;
    bool online = false;
    bool identifiable = false;
    std::vector<std::pair<OutputIdx, Gamma>> class_gamma;
    std::optional<OutputIdx> online_witness;
    std::size_t gamma_domain = 0;
    std::size_t gamma_rounds = 0;

    // IV => III => I => II, III => online => I.
    bool hierarchy_consistent() const;
    std::vector<std::string> hierarchy_violations() const;

    std::string to_text() const;
    // Keys sorted.
    std::string to_json() const;
};

AnalysisReport analyze(const NetworkDef& net, GammaMode mode = GammaMode::reachable);

}  // namespace bcn
