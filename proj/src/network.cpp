#include "bcn/network.hpp"

#include <algorithm>

namespace bcn {

void check_dimensions(unsigned ell, unsigned m, unsigned n) {
    if (ell == 0 || m == 0 || n == 0)
        throw ModelError("input, state and output node counts must each be at least 1");
    if (ell + m > kMaxInputStateNodes)
        throw ModelError("cap exceeded: inputs + states = " + std::to_string(ell + m) + " > " +
                         std::to_string(kMaxInputStateNodes));
    if (n > kMaxOutputNodes)
        throw ModelError("cap exceeded: outputs = " + std::to_string(n) + " > " + std::to_string(kMaxOutputNodes));
}

NetworkDef::NetworkDef(unsigned ell, unsigned m, unsigned n, std::vector<Index> sigma, std::vector<Index> rho,
                       std::string name)
    : ell_(ell), m_(m), n_(n), sigma_(std::move(sigma)), rho_(std::move(rho)), name_(std::move(name)) {
    check_dimensions(ell, m, n);
    const std::size_t states = num_states();
    if (sigma_.size() != std::size_t{num_inputs()} * states)
        throw ModelError("sigma has " + std::to_string(sigma_.size()) + " entries, expected " +
                         std::to_string(std::size_t{num_inputs()} * states));
    if (rho_.size() != states)
        throw ModelError("rho has " + std::to_string(rho_.size()) + " entries, expected " + std::to_string(states));
    for (Index v : sigma_)
        if (v >= states) throw ModelError("state index out of range: " + std::to_string(v));
    for (Index v : rho_)
        if (v >= num_outputs()) throw ModelError("output index out of range: " + std::to_string(v));
}

StateIdx step(const NetworkDef& net, InputIdx i, StateIdx s) {
    if (!net.valid_input(i) || !net.valid_state(s)) throw UsageError("step: index out of range");
    return net.step(i, s);
}

OutputIdx observe(const NetworkDef& net, StateIdx s) {
    if (!net.valid_state(s)) throw UsageError("observe: state index out of range");
    return net.observe(s);
}

StateSeq run_states(const NetworkDef& net, StateIdx s, std::span<const InputIdx> iseq) {
    if (iseq.empty()) throw UsageError("run_states: input sequence must be nonempty");
    StateSeq out;
    out.reserve(iseq.size() + 1);
    out.push_back(s);
    for (InputIdx i : iseq) {
        s = step(net, i, s);
        out.push_back(s);
    }
    return out;
}

OutputSeq run_outputs(const NetworkDef& net, StateIdx s, std::span<const InputIdx> iseq) {
    OutputSeq out;
    for (StateIdx x : run_states(net, s, iseq)) out.push_back(net.observe(x));
    return out;
}

StateIdx xi(const NetworkDef& net, MaybeInput i, StateIdx s) { return i ? step(net, *i, s) : s; }

std::string to_string(Node node) {
    const char prefix = node.kind == NodeKind::input ? 'i' : node.kind == NodeKind::state ? 's' : 'o';
    return prefix + std::to_string(node.number);
}

bool InfluenceGraph::has_edge(Node from, Node to) const {
    return std::binary_search(edges.begin(), edges.end(), InfluenceEdge{from, to});
}

InfluenceGraph infer_influence_graph(const NetworkDef& net) {
    const unsigned ell = net.input_nodes(), m = net.state_nodes(), n = net.output_nodes();
    InfluenceGraph g;

    // Dependencies of state node k on inputs and states: flip one context bit
    // and look for a change in bit k of the successor.
    for (unsigned k = 1; k <= m; ++k) {
        const Index kbit = node_mask(k, m);
        for (unsigned j = 1; j <= ell; ++j) {
            const Index jbit = node_mask(j, ell);
            bool found = false;
            for (Index i = 0; i < net.num_inputs() && !found; ++i)
                for (Index s = 0; s < net.num_states() && !found; ++s)
                    found = ((net.step(InputIdx{i}, StateIdx{s}).value ^
                              net.step(InputIdx{i ^ jbit}, StateIdx{s}).value) & kbit) != 0;
            if (found) g.edges.push_back({{NodeKind::input, j}, {NodeKind::state, k}});
        }
        for (unsigned j = 1; j <= m; ++j) {
            const Index jbit = node_mask(j, m);
            bool found = false;
            for (Index i = 0; i < net.num_inputs() && !found; ++i)
                for (Index s = 0; s < net.num_states() && !found; ++s)
                    found = ((net.step(InputIdx{i}, StateIdx{s}).value ^
                              net.step(InputIdx{i}, StateIdx{s ^ jbit}).value) & kbit) != 0;
            if (found) g.edges.push_back({{NodeKind::state, j}, {NodeKind::state, k}});
        }
    }
    for (unsigned k = 1; k <= n; ++k) {
        const Index kbit = node_mask(k, n);
        for (unsigned j = 1; j <= m; ++j) {
            const Index jbit = node_mask(j, m);
            bool found = false;
            for (Index s = 0; s < net.num_states() && !found; ++s)
                found = ((net.observe(StateIdx{s}).value ^ net.observe(StateIdx{s ^ jbit}).value) & kbit) != 0;
            if (found) g.edges.push_back({{NodeKind::state, j}, {NodeKind::output, k}});
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

}  // namespace bcn
