#include "bcn/online.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <sstream>

namespace bcn {

StateSet zeta(const NetworkDef& net, const StateSet& S, MaybeInput mi, MaybeOutput mo) {
    if (S.empty()) throw UsageError("zeta: empty state set");
    if (S.universe() != net.num_states()) throw UsageError("zeta: state set does not match the network");
    if (mi && !net.valid_input(*mi)) throw UsageError("zeta: input out of range");
    if (mo && !net.valid_output(*mo)) throw UsageError("zeta: output out of range");
    StateSet out(net.num_states());
    S.for_each([&](StateIdx s) {
        const StateIdx t = xi(net, mi, s);
        if (!mo || net.observe(t) == *mo) out.insert(t);
    });
    return out;
}

StateSet g_sets(const NetworkDef& net, const InputSeq& iseq, const OutputSeq& oseq) {
    if (oseq.size() != iseq.size() + 1) throw UsageError("g_sets: expected one more output than inputs");
    StateSet S = zeta(net, StateSet::full(net.num_states()), std::nullopt, oseq[0]);
    for (std::size_t k = 0; k < iseq.size() && !S.empty(); ++k) S = zeta(net, S, iseq[k], oseq[k + 1]);
    return S;
}

std::vector<std::pair<OutputIdx, StateSet>> initial_classes(const NetworkDef& net) {
    std::map<Index, StateSet> by_output;
    for (Index s = 0; s < net.num_states(); ++s) {
        auto [it, _] = by_output.try_emplace(net.observe(StateIdx{s}).value, net.num_states());
        it->second.insert(StateIdx{s});
    }
    std::vector<std::pair<OutputIdx, StateSet>> out;
    for (auto& [o, S] : by_output) out.emplace_back(OutputIdx{o}, std::move(S));
    return out;
}

std::optional<std::vector<std::pair<OutputIdx, StateSet>>> admissible_split(const NetworkDef& net,
                                                                            const StateSet& S, InputIdx i) {
    StateSet image(net.num_states());
    std::vector<std::pair<OutputIdx, StateSet>> parts;
    bool merged = false;
    S.for_each([&](StateIdx s) {
        if (merged) return;
        const StateIdx t = net.step(i, s);
        if (image.contains(t)) {
            merged = true;
            return;
        }
        image.insert(t);
        const OutputIdx o = net.observe(t);
        auto it = std::find_if(parts.begin(), parts.end(), [o](const auto& p) { return p.first == o; });
        if (it == parts.end()) {
            parts.emplace_back(o, StateSet(net.num_states()));
            it = parts.end() - 1;
        }
        it->second.insert(t);
    });
    if (merged) return std::nullopt;
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return parts;
}

const Gamma* GammaTable::find(const StateSet& S) const {
    auto it = index_.find(S);
    return it == index_.end() ? nullptr : &values_[it->second];
}

Gamma GammaTable::at(const StateSet& S) const {
    if (const Gamma* g = find(S)) return *g;
    throw UsageError("set " + S.to_string() + " is not in the Gamma domain");
}

namespace {

// Successor ids per input; nullopt for an input that merges two members or is
// not considered.
using Successors = std::vector<std::optional<std::vector<std::size_t>>>;

struct Workspace {
    std::vector<StateSet> sets;
    std::unordered_map<StateSet, std::size_t, StateSetHash> ids;
    std::vector<Successors> succ;
    std::vector<Gamma> value;

    std::size_t intern(const StateSet& S) {
        auto [it, fresh] = ids.try_emplace(S, sets.size());
        if (fresh) {
            sets.push_back(S);
            succ.emplace_back();
            value.push_back(S.size() == 1 ? Gamma(0) : Gamma::infinite());
        }
        return it->second;
    }

    void expand(const NetworkDef& net, std::size_t id, const std::vector<InputIdx>& inputs) {
        Successors out(net.num_inputs());
        for (InputIdx i : inputs) {
            auto parts = admissible_split(net, sets[id], i);
            if (!parts) continue;
            std::vector<std::size_t> targets;
            for (auto& [o, T] : *parts) targets.push_back(intern(T));
            out[i.value] = std::move(targets);
        }
        succ[id] = std::move(out);
    }

    Gamma evaluate(std::size_t id) const {
        Gamma best = Gamma::infinite();
        for (const auto& targets : succ[id]) {
            if (!targets) continue;
            Gamma worst(0);
            for (std::size_t t : *targets) worst = std::max(worst, value[t]);
            if (worst.finite()) best = std::min(best, Gamma(worst.value() + 1));
        }
        return best;
    }

    // Gauss-Seidel sweeps over `order` from infinity down to the least fixed
    // point. Returns the number of sweeps, the last one changing nothing.
    std::size_t settle(const std::vector<std::size_t>& order) {
        std::size_t rounds = 0;
        for (bool changed = !order.empty(); changed;) {
            changed = false;
            ++rounds;
            for (std::size_t id : order) {
                const Gamma g = evaluate(id);
                if (g < value[id]) {
                    value[id] = g;
                    changed = true;
                }
            }
        }
        return rounds;
    }
};

std::vector<InputIdx> all_inputs(const NetworkDef& net) {
    std::vector<InputIdx> r;
    for (Index i = 0; i < net.num_inputs(); ++i) r.emplace_back(i);
    return r;
}

// Every z-subset of `members`, as state sets.
void for_each_subset(const std::vector<StateIdx>& members, std::size_t z, Index universe, auto&& f) {
    const std::size_t k = members.size();
    if (z > k) return;
    std::vector<std::size_t> pick(z);
    for (std::size_t j = 0; j < z; ++j) pick[j] = j;
    while (true) {
        StateSet S(universe);
        for (std::size_t j : pick) S.insert(members[j]);
        f(std::move(S));
        std::size_t j = z;
        while (j > 0 && pick[j - 1] == k - z + j - 1) --j;
        if (j == 0) return;
        ++pick[j - 1];
        for (std::size_t q = j; q < z; ++q) pick[q] = pick[q - 1] + 1;
    }
}

std::vector<std::vector<StateIdx>> class_members(const NetworkDef& net) {
    std::vector<std::vector<StateIdx>> out;
    for (auto& [o, S] : initial_classes(net)) {
        if (S.size() > kMaxFullClassSize)
            throw UsageError("output class of size " + std::to_string(S.size()) +
                             " is too large for the full-domain engine (limit " +
                             std::to_string(kMaxFullClassSize) + ")");
        out.push_back(S.members());
    }
    return out;
}

std::vector<std::size_t> sorted_ids(const Workspace& ws, std::vector<std::size_t> ids) {
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return canonical_less(ws.sets[a], ws.sets[b]); });
    return ids;
}

}  // namespace

class GammaTableBuilder {
public:
    static GammaTable finish(Workspace& ws, GammaMode mode, std::size_t rounds, bool keep_all = true) {
        GammaTable t;
        t.mode_ = mode;
        t.iterations_ = rounds;
        std::vector<std::size_t> order(ws.sets.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        order = sorted_ids(ws, std::move(order));
        for (std::size_t id : order) {
            if (!keep_all && !ws.value[id].finite()) continue;
            t.index_.emplace(ws.sets[id], t.domain_.size());
            t.domain_.push_back(ws.sets[id]);
            t.values_.push_back(ws.value[id]);
        }
        return t;
    }
};

namespace {

GammaTable full_table(const NetworkDef& net) {
    const auto classes = class_members(net);
    const auto inputs = all_inputs(net);
    Workspace ws;
    std::size_t largest = 0;
    for (const auto& c : classes) {
        largest = std::max(largest, c.size());
        for (StateIdx s : c) ws.intern(StateSet(net.num_states(), {s.value}));
    }
    std::size_t rounds = 0;
    for (std::size_t z = 2; z <= largest; ++z) {
        std::vector<std::size_t> layer;
        for (const auto& c : classes)
            for_each_subset(c, z, net.num_states(), [&](StateSet S) { layer.push_back(ws.intern(S)); });
        for (std::size_t id : layer) ws.expand(net, id, inputs);
        rounds += ws.settle(sorted_ids(ws, layer));
    }
    return GammaTableBuilder::finish(ws, GammaMode::full, rounds);
}

GammaTable reachable_table(const NetworkDef& net) {
    const auto inputs = all_inputs(net);
    Workspace ws;
    for (auto& [o, S] : initial_classes(net)) ws.intern(S);
    for (std::size_t head = 0; head < ws.sets.size(); ++head) ws.expand(net, head, inputs);
    std::vector<std::size_t> order;
    for (std::size_t id = 0; id < ws.sets.size(); ++id)
        if (ws.sets[id].size() > 1) order.push_back(id);
    const std::size_t rounds = ws.settle(sorted_ids(ws, std::move(order)));
    return GammaTableBuilder::finish(ws, GammaMode::reachable, rounds);
}

}  // namespace

GammaTable gamma_table(const NetworkDef& net, GammaMode mode) {
    return mode == GammaMode::full ? full_table(net) : reachable_table(net);
}

Gamma gamma_after(const NetworkDef& net, const StateSet& S, InputIdx i, const GammaTable& table) {
    auto parts = admissible_split(net, S, i);
    if (!parts) return Gamma::infinite();
    Gamma worst(0);
    for (auto& [o, T] : *parts) {
        const Gamma* g = table.find(T);
        if (!g) return Gamma::infinite();
        worst = std::max(worst, *g);
    }
    return worst;
}

std::vector<InputIdx> psi(const NetworkDef& net, const StateSet& S, const GammaTable& table) {
    if (!table.contains(S)) throw UsageError("psi: set " + S.to_string() + " is not in the Gamma domain");
    std::vector<InputIdx> out;
    for (Index i = 0; i < net.num_inputs(); ++i)
        if (gamma_after(net, S, InputIdx{i}, table).finite()) out.emplace_back(i);
    return out;
}

OnlineVerdict online_verdict(const NetworkDef& net, const GammaTable& table) {
    OnlineVerdict v;
    v.observable = true;
    for (auto& [o, S] : initial_classes(net)) {
        const Gamma g = table.at(S);
        v.class_gamma.emplace_back(o, g);
        if (!g.finite() && v.observable) {
            v.observable = false;
            v.witness_output = o;
            v.witness_class = S;
        }
    }
    return v;
}

OnlineVerdict is_online_observable(const NetworkDef& net, GammaMode mode) {
    return online_verdict(net, gamma_table(net, mode));
}

std::optional<std::size_t> InputLabelledGraph::index_of(const StateSet& S) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), S, canonical_less);
    if (it == vertices.end() || !(*it == S)) return std::nullopt;
    return static_cast<std::size_t>(it - vertices.begin());
}

const GraphEdge* InputLabelledGraph::edge(std::size_t from, std::size_t to) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{from, to},
                               [](const GraphEdge& e, const std::pair<std::size_t, std::size_t>& k) {
                                   return std::pair{e.from, e.to} < k;
                               });
    if (it == edges.end() || it->from != from || it->to != to) return nullptr;
    return &*it;
}

namespace {

// Vertices must be in canonical order. psi_of gives the labels of a vertex.
InputLabelledGraph assemble(const NetworkDef& net, std::vector<StateSet> vertices, std::vector<Gamma> gamma,
                            auto&& psi_of, bool faithful) {
    InputLabelledGraph g;
    g.vertices = std::move(vertices);
    g.gamma = std::move(gamma);
    g.faithful = faithful;
    std::map<std::pair<std::size_t, std::size_t>, GraphEdge> edges;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        for (InputIdx i : psi_of(v)) {
            const auto parts = admissible_split(net, g.vertices[v], i);
            for (auto& [o, T] : *parts) {
                const std::size_t w = *g.index_of(T);
                auto [it, fresh] = edges.try_emplace({v, w}, GraphEdge{v, w, {}, {}});
                if (it->second.inputs.empty() || it->second.inputs.back() != i) it->second.inputs.push_back(i);
                auto& outs = it->second.outputs;
                if (std::find(outs.begin(), outs.end(), o) == outs.end()) outs.push_back(o);
            }
        }
    }
    for (auto& [k, e] : edges) {
        std::sort(e.outputs.begin(), e.outputs.end());
        g.edges.push_back(std::move(e));
    }
    return g;
}

StateSet class_of(const NetworkDef& net, const StateSet& S, OutputIdx* o) {
    *o = net.observe(S.first());
    return zeta(net, StateSet::full(net.num_states()), std::nullopt, *o);
}

GraphResult faithful_graph(const NetworkDef& net) {
    const auto classes = class_members(net);
    const auto inputs = all_inputs(net);
    Workspace ws;
    std::vector<std::vector<InputIdx>> labels;
    std::size_t largest = 0;
    for (const auto& c : classes) {
        largest = std::max(largest, c.size());
        for (StateIdx s : c) ws.intern(StateSet(net.num_states(), {s.value}));
    }
    labels.assign(ws.sets.size(), inputs);

    for (std::size_t z = 2; z <= largest; ++z) {
        std::vector<std::size_t> layer;
        for (const auto& c : classes)
            for_each_subset(c, z, net.num_states(), [&](StateSet S) { layer.push_back(ws.intern(S)); });
        layer = sorted_ids(ws, std::move(layer));
        labels.resize(ws.sets.size());
        for (std::size_t id : layer) {
            std::vector<InputIdx> candidates = inputs;
            if (z > 2) {
                ws.sets[id].for_each([&](StateIdx s) {
                    StateSet smaller = ws.sets[id];
                    smaller.erase(s);
                    const auto& sub = labels[ws.ids.at(smaller)];
                    std::erase_if(candidates, [&](InputIdx i) {
                        return !std::binary_search(sub.begin(), sub.end(), i);
                    });
                });
            }
            ws.expand(net, id, candidates);
        }
        ws.settle(layer);
        for (std::size_t id : layer) {
            std::vector<InputIdx>& psi_here = labels[id];
            psi_here.clear();
            for (Index i = 0; i < net.num_inputs(); ++i) {
                const auto& targets = ws.succ[id][i];
                if (!targets) continue;
                if (std::all_of(targets->begin(), targets->end(), [&](std::size_t t) { return ws.value[t].finite(); }))
                    psi_here.emplace_back(i);
            }
            if (psi_here.empty()) {
                OutputIdx o;
                StateSet cls = class_of(net, ws.sets[id], &o);
                return GraphFailure{o, std::move(cls), ws.sets[id]};
            }
        }
    }

    std::vector<std::size_t> order(ws.sets.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    order = sorted_ids(ws, std::move(order));
    std::vector<StateSet> vertices;
    std::vector<Gamma> gamma;
    for (std::size_t id : order) {
        vertices.push_back(ws.sets[id]);
        gamma.push_back(ws.value[id]);
    }
    return assemble(net, std::move(vertices), std::move(gamma), [&](std::size_t v) { return labels[order[v]]; },
                    true);
}

GraphResult reachable_graph(const NetworkDef& net) {
    const GammaTable table = gamma_table(net, GammaMode::reachable);
    const OnlineVerdict verdict = online_verdict(net, table);
    if (!verdict.observable)
        return GraphFailure{*verdict.witness_output, *verdict.witness_class, *verdict.witness_class};
    std::vector<StateSet> vertices;
    std::vector<Gamma> gamma;
    for (const StateSet& S : table.domain()) {
        const Gamma g = table.at(S);
        if (!g.finite()) continue;
        vertices.push_back(S);
        gamma.push_back(g);
    }
    return assemble(net, vertices, std::move(gamma), [&](std::size_t v) { return psi(net, vertices[v], table); },
                    false);
}

}  // namespace

GraphResult build_input_labelled_graph(const NetworkDef& net, bool faithful) {
    return faithful ? faithful_graph(net) : reachable_graph(net);
}

std::string export_graph(const InputLabelledGraph& g, GraphFormat format) {
    if (format == GraphFormat::json) {
        nlohmann::json vertices = nlohmann::json::array();
        for (std::size_t v = 0; v < g.vertices.size(); ++v) {
            nlohmann::json states = nlohmann::json::array();
            g.vertices[v].for_each([&](StateIdx s) { states.push_back(s.value); });
            nlohmann::json gamma = g.gamma[v].finite() ? nlohmann::json(g.gamma[v].value()) : nlohmann::json("inf");
            vertices.push_back({{"id", v}, {"states", states}, {"gamma", gamma}});
        }
        nlohmann::json edges = nlohmann::json::array();
        for (const GraphEdge& e : g.edges) {
            nlohmann::json ins = nlohmann::json::array(), outs = nlohmann::json::array();
            for (InputIdx i : e.inputs) ins.push_back(i.value);
            for (OutputIdx o : e.outputs) outs.push_back(o.value);
            edges.push_back({{"from", e.from}, {"to", e.to}, {"inputs", ins}, {"outputs", outs}});
        }
        nlohmann::json doc = {{"vertices", vertices}, {"edges", edges}};
        return doc.dump(2) + "\n";
    }

    std::ostringstream out;
    out << "digraph input_labelled {\n";
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
        out << "  v" << v << " [label=\"" << g.vertices[v].to_string() << "\\nG=" << g.gamma[v].to_string()
            << "\"];\n";
    for (const GraphEdge& e : g.edges) {
        out << "  v" << e.from << " -> v" << e.to << " [label=\"";
        for (std::size_t k = 0; k < e.inputs.size(); ++k) out << (k ? "," : "") << to_string(e.inputs[k]);
        out << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace bcn
