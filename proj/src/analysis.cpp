#include "bcn/analysis.hpp"

#include <json.hpp>
#include <sstream>

#include "bcn/controllability.hpp"
#include "bcn/offline.hpp"

namespace bcn {

std::vector<std::string> AnalysisReport::hierarchy_violations() const {
    std::vector<std::string> out;
    auto implies = [&](bool a, bool b, const char* what) {
        if (a && !b) out.emplace_back(what);
    };
    implies(type4, type3, "type IV without type III");
    implies(type3, type1, "type III without type I");
    implies(type1, type2, "type I without type II");
    implies(type3, online, "type III without online observability");
    implies(online, type1, "online observability without type I");
    implies(identifiable, controllable && online, "identifiable without controllability and online observability");
    return out;
}

bool AnalysisReport::hierarchy_consistent() const { return hierarchy_violations().empty(); }

AnalysisReport analyze(const NetworkDef& net, GammaMode mode) {
    AnalysisReport r;
    r.name = net.name();
    r.ell = net.input_nodes();
    r.m = net.state_nodes();
    r.n = net.output_nodes();
    r.mode = mode;
    r.controllable = is_controllable(net);
    r.type2 = is_observable_type2(net);
    // Each type implies the next weaker one, so a failure settles the stronger ones.
    r.type1 = r.type2 && is_observable_type1(net);
    r.type4 = r.type1 && is_observable_type4(net);
    r.type3 = r.type4 || (r.type1 && is_observable_type3(net));

    const GammaTable table = gamma_table(net, mode);
    const OnlineVerdict v = online_verdict(net, table);
    r.online = v.observable;
    r.online_witness = v.witness_output;
    r.class_gamma = v.class_gamma;
    r.gamma_domain = table.domain().size();
    r.gamma_rounds = table.iterations();
    r.identifiable = r.controllable && r.online;
    return r;
}

std::string AnalysisReport::to_text() const {
    std::ostringstream out;
    auto yes = [](bool b) { return b ? "yes" : "no"; };
    out << "network        " << (name.empty() ? "(unnamed)" : name) << " (inputs " << ell << ", states " << m
        << ", outputs " << n << ")\n";
    out << "controllable   " << yes(controllable) << "\n";
    out << "type I         " << yes(type1) << "\n";
    out << "type II        " << yes(type2) << "\n";
    out << "type III       " << yes(type3) << "\n";
    out << "type IV        " << yes(type4) << "\n";
    out << "online         " << yes(online);
    if (online_witness) out << " (class of o" << online_witness->value << " cannot be determined)";
    out << "\n";
    out << "identifiable   " << yes(identifiable) << "\n";
    out << "gamma          ";
    for (std::size_t k = 0; k < class_gamma.size(); ++k)
        out << (k ? " " : "") << "o" << class_gamma[k].first.value << "=" << class_gamma[k].second.to_string();
    out << "\n";
    out << "gamma domain   " << gamma_domain << " sets, " << gamma_rounds << " rounds ("
        << (mode == GammaMode::full ? "full" : "reachable") << ")\n";
    const auto bad = hierarchy_violations();
    if (bad.empty()) {
        out << "hierarchy      consistent\n";
    } else {
        for (const auto& b : bad) out << "hierarchy      VIOLATED: " << b << "\n";
    }
    return out.str();
}

std::string AnalysisReport::to_json() const {
    nlohmann::json gamma = nlohmann::json::object();
    for (auto& [o, g] : class_gamma)
        gamma[std::to_string(o.value)] = g.finite() ? nlohmann::json(g.value()) : nlohmann::json("inf");
    nlohmann::json j = {
        {"name", name},
        {"inputs", ell},
        {"states", m},
        {"outputs", n},
        {"mode", mode == GammaMode::full ? "full" : "reachable"},
        {"controllable", controllable},
        {"type1", type1},
        {"type2", type2},
        {"type3", type3},
        {"type4", type4},
        {"online", online},
        {"identifiable", identifiable},
        {"gamma", gamma},
        {"gamma_domain", gamma_domain},
        {"gamma_rounds", gamma_rounds},
        {"hierarchy_consistent", hierarchy_consistent()},
    };
    j["online_witness"] = online_witness ? nlohmann::json(online_witness->value) : nlohmann::json(nullptr);
    return j.dump(2) + "\n";
}

}  // namespace bcn
