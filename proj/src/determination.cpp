#include "bcn/determination.hpp"

#include <algorithm>
#include <functional>

namespace bcn {

DeterminationModel::DeterminationModel(NetworkDef net, GammaMode mode) {
    GammaTable table = gamma_table(net, mode);
    const OnlineVerdict v = online_verdict(net, table);
    if (!v.observable)
        throw UsageError("network is not online observable (output class o" +
                         std::to_string(v.witness_output->value) + " = " + v.witness_class->to_string() +
                         " cannot be determined)");
    data_ = std::make_shared<const Data>(Data{std::move(net), std::move(table)});
}

InputIdx DeterminationModel::choose(const StateSet& S, InputPolicy policy, std::mt19937_64* rng) const {
    if (S.size() < 2) throw UsageError("candidate set is already a singleton");
    const Gamma here = gamma().at(S);
    if (!here.finite()) throw UsageError("candidate set " + S.to_string() + " cannot be determined");

    std::vector<std::pair<InputIdx, Gamma>> options;
    for (Index i = 0; i < net().num_inputs(); ++i) {
        const Gamma after = gamma_after(net(), S, InputIdx{i}, gamma());
        if (after.finite()) options.emplace_back(InputIdx{i}, after);
    }
    switch (policy) {
        case InputPolicy::min_gamma:
            return std::min_element(options.begin(), options.end(),
                                    [](const auto& a, const auto& b) { return a.second < b.second; })
                ->first;
        case InputPolicy::first_admissible:
            for (auto& [i, after] : options)
                if (after < here) return i;
            break;
        case InputPolicy::random:
            if (!rng) throw UsageError("random policy needs a generator");
            return options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(*rng)].first;
    }
    throw UsageError("no input makes progress on " + S.to_string());
}

DeterminationSession::DeterminationSession(DeterminationModel model, OutputIdx o0, InputPolicy policy,
                                           std::uint64_t seed)
    : model_(std::move(model)), policy_(policy), rng_(seed) {
    const NetworkDef& net = model_.net();
    if (!net.valid_output(o0)) throw UsageError("output " + std::to_string(o0.value) + " out of range");
    initial_class_ = zeta(net, StateSet::full(net.num_states()), std::nullopt, o0);
    if (initial_class_.empty())
        throw InconsistentObservation("no state of the model produces output o" + std::to_string(o0.value));
    S_ = initial_class_;
    history_o_.push_back(o0);
}

InputIdx DeterminationSession::next_input() {
    if (determined()) throw UsageError("initial state already determined");
    pending_ = model_.choose(S_, policy_, &rng_);
    return *pending_;
}

void DeterminationSession::advance(InputIdx i, OutputIdx o) {
    if (!pending_ || *pending_ != i) throw UsageError("advance: input was not the one prescribed by next_input");
    if (!model_.net().valid_output(o)) throw UsageError("output " + std::to_string(o.value) + " out of range");
    StateSet next = zeta(model_.net(), S_, i, o);
    if (next.empty())
        throw InconsistentObservation("observation inconsistent with model: o" + std::to_string(o.value) +
                                      " after " + to_string(i) + " from " + S_.to_string());
    S_ = std::move(next);
    history_i_.push_back(i);
    history_o_.push_back(o);
    pending_.reset();
}

StateIdx DeterminationSession::recover_initial_state() const {
    if (!determined()) throw UsageError("initial state not determined yet");
    const NetworkDef& net = model_.net();
    std::optional<StateIdx> found;
    initial_class_.for_each([&](StateIdx s) {
        if (found) return;
        if (history_i_.empty() || run_outputs(net, s, history_i_) == history_o_) found = s;
    });
    if (!found) throw InconsistentObservation("no initial state reproduces the observed outputs");
    return *found;
}

StateIdx DeterminationSession::current_state() const {
    if (!determined()) throw UsageError("current state not determined yet");
    return S_.first();
}

DeterminationResult run_determination(DeterminationSession& session, BlackBox& bb) {
    std::size_t steps = 0;
    while (!session.determined()) {
        const InputIdx i = session.next_input();
        session.advance(i, bb.apply(i));
        ++steps;
    }
    return {session.recover_initial_state(), steps};
}

DeterminationResult run_determination(const DeterminationModel& model, BlackBox& bb, InputPolicy policy,
                                      std::uint64_t seed) {
    DeterminationSession session(model, bb.output(), policy, seed);
    return run_determination(session, bb);
}

std::size_t DeterminingTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin() + 1, nodes.end(), [](const TreeNode& n) { return n.children.empty(); }));
}

std::size_t NoneStateDeterminingTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin() + 1, nodes.end(), [](const NsdtNode& n) { return n.children.empty(); }));
}

DeterminingTree build_determining_tree(const DeterminationModel& model, InputPolicy policy) {
    if (policy == InputPolicy::random) throw UsageError("determining trees use a deterministic policy");
    const NetworkDef& net = model.net();
    DeterminingTree tree;
    tree.nodes.push_back({StateSet::full(net.num_states()), std::nullopt, std::nullopt, {}});

    std::function<std::size_t(StateSet, OutputIdx)> grow = [&](StateSet S, OutputIdx o) {
        const std::size_t id = tree.nodes.size();
        tree.nodes.push_back({S, std::nullopt, o, {}});
        if (S.size() == 1) return id;
        const InputIdx i = model.choose(S, policy);
        tree.nodes[id].input = i;
        const auto parts = admissible_split(net, S, i);
        for (auto& [o2, T] : *parts) {
            const std::size_t child = grow(T, o2);
            tree.nodes[id].children.push_back(child);
        }
        return id;
    };
    for (auto& [o, S] : initial_classes(net)) {
        const std::size_t child = grow(S, o);
        tree.nodes[0].children.push_back(child);
    }
    return tree;
}

DeterminingTree build_determining_tree(const NetworkDef& net, InputPolicy policy) {
    return build_determining_tree(DeterminationModel(net), policy);
}

NoneStateDeterminingTree strip_states(const DeterminingTree& tree) {
    NoneStateDeterminingTree out;
    out.nodes.reserve(tree.nodes.size());
    for (const TreeNode& n : tree.nodes) out.nodes.push_back({n.input, n.output, n.children});
    return out;
}

NsdtCheck validate_nsdt(const NoneStateDeterminingTree& tree, unsigned m) {
    auto fail = [](std::string why) { return NsdtCheck{false, std::move(why)}; };
    if (tree.nodes.empty()) return fail("empty tree");
    const NsdtNode& root = tree.nodes[0];
    if (root.input || root.output) return fail("root must be (eps, eps)");
    if (root.children.empty()) return fail("root has no children");

    std::vector<char> seen(tree.nodes.size(), 0);
    seen[0] = 1;
    std::vector<std::size_t> stack{0};
    std::size_t leaves = 0;
    while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        const NsdtNode& n = tree.nodes[id];
        std::vector<OutputIdx> outs;
        for (std::size_t c : n.children) {
            if (c >= tree.nodes.size() || seen[c]) return fail("node " + std::to_string(c) + " is not a tree child");
            seen[c] = 1;
            if (!tree.nodes[c].output) return fail("node " + std::to_string(c) + " has no output");
            outs.push_back(*tree.nodes[c].output);
            stack.push_back(c);
        }
        std::sort(outs.begin(), outs.end());
        if (std::adjacent_find(outs.begin(), outs.end()) != outs.end())
            return fail("siblings below node " + std::to_string(id) + " share an output");
        if (id == 0) continue;
        if (n.children.empty()) {
            if (n.input) return fail("leaf " + std::to_string(id) + " carries an input");
            ++leaves;
        } else if (!n.input) {
            return fail("internal node " + std::to_string(id) + " has no input");
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return fail("unreachable nodes");
    const std::size_t expected = std::size_t{1} << m;
    if (leaves != expected)
        return fail("tree has " + std::to_string(leaves) + " leaves, expected " + std::to_string(expected));
    return {};
}

std::vector<LeafWord> leaf_words(const NoneStateDeterminingTree& tree) {
    std::vector<LeafWord> out;
    LeafWord path;
    std::function<void(std::size_t)> walk = [&](std::size_t id) {
        const NsdtNode& n = tree.nodes[id];
        path.outputs.push_back(*n.output);
        if (n.children.empty()) {
            out.push_back(path);
        } else {
            path.inputs.push_back(*n.input);
            for (std::size_t c : n.children) walk(c);
            path.inputs.pop_back();
        }
        path.outputs.pop_back();
    };
    for (std::size_t c : tree.nodes.at(0).children) walk(c);
    std::sort(out.begin(), out.end(), [](const LeafWord& a, const LeafWord& b) {
        if (a.outputs != b.outputs) return a.outputs < b.outputs;
        return a.inputs < b.inputs;
    });
    return out;
}

}  // namespace bcn
