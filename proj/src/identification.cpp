#include "bcn/identification.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "bcn/controllability.hpp"

namespace bcn {

// ---- log format ----

IOLog IOLog::parse(std::string_view text) {
    IOLog log;
    std::size_t line_no = 0;
    bool header = false;
    bool expect_output = true;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.remove_suffix(1);
        std::size_t indent = 0;
        while (indent < line.size() && (line[indent] == ' ' || line[indent] == '\t')) ++indent;
        line.remove_prefix(indent);
        if (line.empty()) continue;
        if (!header) {
            if (line != "IO v1") throw ParseError(line_no, indent + 1, "expected header 'IO v1'");
            header = true;
            continue;
        }
        const char kind = line[0];
        if ((kind != 'O' && kind != 'I') || line.size() < 3 || line[1] != ' ')
            throw ParseError(line_no, indent + 1, "expected 'O <k>' or 'I <k>'");
        std::string_view num = line.substr(2);
        while (!num.empty() && num.front() == ' ') num.remove_prefix(1);
        Index v = 0;
        auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
        if (ec != std::errc() || p != num.data() + num.size())
            throw ParseError(line_no, indent + 3, "expected a decimal index");
        if ((kind == 'O') != expect_output)
            throw ParseError(line_no, indent + 1, expect_output ? "expected an 'O' line" : "expected an 'I' line");
        if (kind == 'O')
            log.outputs.emplace_back(v);
        else
            log.inputs.emplace_back(v);
        expect_output = !expect_output;
    }
    if (!header) throw ParseError(line_no, 1, "missing header 'IO v1'");
    if (!log.outputs.empty() && expect_output) throw ParseError(line_no, 1, "log must end with an 'O' line");
    return log;
}

std::string IOLog::serialize() const {
    std::ostringstream out;
    out << "IO v1\n";
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        out << "O " << outputs[k].value << "\n";
        if (k < inputs.size()) out << "I " << inputs[k].value << "\n";
    }
    return out.str();
}

IOLog IOLog::truncated(std::size_t steps) const {
    IOLog out;
    if (outputs.empty()) return out;
    steps = std::min(steps, inputs.size());
    out.inputs.assign(inputs.begin(), inputs.begin() + static_cast<std::ptrdiff_t>(steps));
    out.outputs.assign(outputs.begin(), outputs.begin() + static_cast<std::ptrdiff_t>(steps + 1));
    return out;
}

namespace {

// Leaf words in label order, with the tree node of each leaf.
struct Labels {
    std::vector<LeafWord> words;
    std::vector<std::optional<Index>> of_node;
};

Labels label_leaves(const NoneStateDeterminingTree& tree) {
    std::vector<std::pair<LeafWord, std::size_t>> found;
    LeafWord path;
    std::function<void(std::size_t)> walk = [&](std::size_t id) {
        const NsdtNode& n = tree.nodes[id];
        path.outputs.push_back(*n.output);
        if (n.children.empty()) {
            found.emplace_back(path, id);
        } else {
            path.inputs.push_back(*n.input);
            for (std::size_t c : n.children) walk(c);
            path.inputs.pop_back();
        }
        path.outputs.pop_back();
    };
    for (std::size_t c : tree.nodes.at(0).children) walk(c);
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first.outputs != b.first.outputs) return a.first.outputs < b.first.outputs;
        return a.first.inputs < b.first.inputs;
    });
    Labels out;
    out.of_node.assign(tree.nodes.size(), std::nullopt);
    for (auto& [w, id] : found) {
        out.of_node[id] = static_cast<Index>(out.words.size());
        out.words.push_back(std::move(w));
    }
    return out;
}

std::optional<std::size_t> child_with_output(const std::vector<NsdtNode>& nodes, std::size_t id, OutputIdx o) {
    for (std::size_t c : nodes[id].children)
        if (nodes[c].output == o) return c;
    return std::nullopt;
}

// Everything a log reveals about the labelled network.
struct Knowledge {
    std::vector<std::optional<Index>> label;   // per position 0..T
    std::vector<std::optional<Index>> window;  // leaf whose word starts at p
    std::vector<std::optional<Index>> cell;    // [label * inputs + input]
    std::vector<std::optional<Index>> end;     // label after a leaf's word
    std::vector<char> seen;                    // label known at some position
    Index num_inputs = 0;

    bool complete() const {
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }) &&
               std::all_of(cell.begin(), cell.end(), [](const auto& c) { return c.has_value(); });
    }
};

Knowledge derive(const IOLog& log, Dimensions dims, const NoneStateDeterminingTree& tree, const Labels& labels) {
    const Index states = Index{1} << dims.m;
    const Index inputs = Index{1} << dims.ell;
    Knowledge k;
    k.num_inputs = inputs;
    k.cell.assign(std::size_t{states} * inputs, std::nullopt);
    k.end.assign(states, std::nullopt);
    k.seen.assign(states, 0);
    if (log.outputs.empty()) return k;
    if (log.outputs.size() != log.inputs.size() + 1)
        throw UsageError("log needs exactly one more output than inputs");
    for (InputIdx i : log.inputs)
        if (i.value >= inputs) throw UsageError("log input " + std::to_string(i.value) + " out of range");

    const std::size_t T = log.inputs.size();
    k.label.assign(T + 1, std::nullopt);
    k.window.assign(T + 1, std::nullopt);

    for (std::size_t p = 0; p <= T; ++p) {
        auto node = child_with_output(tree.nodes, 0, log.outputs[p]);
        if (!node)
            throw IdentificationConflict("output o" + std::to_string(log.outputs[p].value) + " at position " +
                                         std::to_string(p) + " starts no leaf word");
        for (std::size_t d = 0;; ++d) {
            const NsdtNode& n = tree.nodes[*node];
            if (n.children.empty()) {
                k.window[p] = labels.of_node[*node];
                break;
            }
            if (p + d >= T || log.inputs[p + d] != *n.input) break;
            const OutputIdx o = log.outputs[p + d + 1];
            node = child_with_output(tree.nodes, *node, o);
            if (!node)
                throw IdentificationConflict("output o" + std::to_string(o.value) + " at position " +
                                             std::to_string(p + d + 1) + " is not allowed by the determining tree");
        }
    }

    auto conflict = [](const std::string& what, Index a, Index b) {
        return IdentificationConflict(what + ": labels " + std::to_string(a) + " and " + std::to_string(b));
    };
    bool changed = false;
    auto set_label = [&](std::size_t p, Index L) {
        if (k.label[p]) {
            if (*k.label[p] != L) throw conflict("position " + std::to_string(p) + " gets two labels", *k.label[p], L);
            return;
        }
        if (labels.words[L].outputs[0] != log.outputs[p])
            throw IdentificationConflict("label " + std::to_string(L) + " at position " + std::to_string(p) +
                                         " disagrees with the observed output");
        k.label[p] = L;
        k.seen[L] = 1;
        changed = true;
    };
    auto set_slot = [&](std::optional<Index>& slot, Index v, const std::string& what) {
        if (slot) {
            if (*slot != v) throw conflict(what, *slot, v);
            return;
        }
        slot = v;
        changed = true;
    };

    for (std::size_t p = 0; p <= T; ++p)
        if (k.window[p]) set_label(p, *k.window[p]);
    do {
        changed = false;
        for (std::size_t p = 0; p <= T; ++p) {
            if (k.window[p]) {
                const Index L = *k.window[p];
                const std::size_t q = p + labels.words[L].inputs.size();
                if (k.label[q]) set_slot(k.end[L], *k.label[q], "word of label " + std::to_string(L) + " ends in two labels");
                if (k.end[L]) set_label(q, *k.end[L]);
            }
            if (p < T && k.label[p]) {
                auto& c = k.cell[std::size_t{*k.label[p]} * inputs + log.inputs[p].value];
                if (k.label[p + 1])
                    set_slot(c, *k.label[p + 1],
                             "cell (" + to_string(log.inputs[p]) + ", " + std::to_string(*k.label[p]) + ") has two values");
                else if (c)
                    set_label(p + 1, *c);
            }
        }
    } while (changed);
    return k;
}

Labels checked_labels(const NoneStateDeterminingTree& nsdt, Dimensions dims) {
    check_dimensions(dims.ell, dims.m, dims.n);
    const NsdtCheck check = validate_nsdt(nsdt, dims.m);
    if (!check.ok) throw UsageError("invalid none-state determining tree: " + check.reason);
    return label_leaves(nsdt);
}

Construction assemble(const Knowledge& k, Dimensions dims, const Labels& labels) {
    const Index states = Index{1} << dims.m;
    const Index inputs = Index{1} << dims.ell;
    if (!k.complete()) {
        Insufficient gap;
        for (Index L = 0; L < states; ++L) {
            if (!k.seen[L]) gap.missing_outputs.emplace_back(L);
            for (Index i = 0; i < inputs; ++i)
                if (!k.cell[std::size_t{L} * inputs + i]) gap.missing_cells.push_back({InputIdx{i}, StateIdx{L}});
        }
        return gap;
    }
    std::vector<Index> sigma(std::size_t{states} * inputs);
    for (Index i = 0; i < inputs; ++i)
        for (Index L = 0; L < states; ++L) sigma[std::size_t{i} * states + L] = *k.cell[std::size_t{L} * inputs + i];
    std::vector<Index> rho(states);
    for (Index L = 0; L < states; ++L) rho[L] = labels.words[L].outputs[0].value;
    return IdentifiedModel{NetworkDef(dims.ell, dims.m, dims.n, std::move(sigma), std::move(rho), "identified"),
                           labels.words};
}

}  // namespace

Construction construct_from_data(const IOLog& log, Dimensions dims, const NoneStateDeterminingTree& nsdt) {
    const Labels labels = checked_labels(nsdt, dims);
    return assemble(derive(log, dims, nsdt, labels), dims, labels);
}

ActiveResult active_identify(BlackBox& bb, const NetworkDef& model, InputPolicy policy) {
    if (!is_controllable(model)) throw UsageError("strategy model is not controllable");
    const DeterminationModel dm(model);
    const DeterminingTree tree = build_determining_tree(dm, policy);
    const NoneStateDeterminingTree nsdt = strip_states(tree);
    const Dimensions dims{model.input_nodes(), model.state_nodes(), model.output_nodes()};
    const Labels labels = checked_labels(nsdt, dims);
    const std::size_t resets_before = bb.resets_sent();

    IOLog log;
    std::size_t probes = 0;
    std::size_t windows = 0;
    log.outputs.push_back(bb.output());
    std::optional<StateIdx> tracked;  // state of `model` once a window has pinned it

    auto send = [&](InputIdx i) {
        const OutputIdx o = bb.apply(i);
        log.inputs.push_back(i);
        log.outputs.push_back(o);
        if (tracked) {
            tracked = model.step(i, *tracked);
            if (model.observe(*tracked) != o)
                throw IdentificationConflict("black box answered o" + std::to_string(o.value) + " to " + to_string(i) +
                                             " where the model predicts o" +
                                             std::to_string(model.observe(*tracked).value));
        }
        return o;
    };
    auto child_for = [&](std::size_t id, OutputIdx o) {
        for (std::size_t c : tree.nodes[id].children)
            if (tree.nodes[c].output == o) return c;
        throw IdentificationConflict("black box output o" + std::to_string(o.value) +
                                     " is not allowed by the determining tree");
    };
    auto run_window = [&] {
        std::size_t id = child_for(0, log.outputs.back());
        while (tree.nodes[id].input) id = child_for(id, send(*tree.nodes[id].input));
        tracked = tree.nodes[id].set.first();
        ++windows;
    };

    const Index inputs = model.num_inputs();
    while (true) {
        const Knowledge k = derive(log, dims, nsdt, labels);
        if (k.complete()) break;
        const std::optional<Index> here = k.label[log.inputs.size()];
        if (!here) {
            run_window();
            continue;
        }

        // Nearest label with an unknown cell, moving along known cells and
        // along leaf words whose end label is known.
        struct Step {
            Index from;
            std::optional<InputIdx> via;  // nullopt: the leaf word of `from`
        };
        std::vector<std::optional<Step>> back(model.num_states());
        std::vector<char> visited(model.num_states(), 0);
        std::deque<Index> queue{*here};
        visited[*here] = 1;
        std::optional<std::pair<Index, InputIdx>> target;
        while (!queue.empty() && !target) {
            const Index X = queue.front();
            queue.pop_front();
            for (Index i = 0; i < inputs; ++i)
                if (!k.cell[std::size_t{X} * inputs + i]) {
                    target = {X, InputIdx{i}};
                    break;
                }
            if (target) break;
            auto visit = [&](Index Y, std::optional<InputIdx> via) {
                if (visited[Y]) return;
                visited[Y] = 1;
                back[Y] = Step{X, via};
                queue.push_back(Y);
            };
            for (Index i = 0; i < inputs; ++i) visit(*k.cell[std::size_t{X} * inputs + i], InputIdx{i});
            if (k.end[X]) visit(*k.end[X], std::nullopt);
        }
        if (!target) throw Error("identification stalled: no unknown cell is reachable through known transitions");

        std::vector<Step> path;
        for (Index Y = target->first; Y != *here; Y = back[Y]->from) path.push_back(*back[Y]);
        std::reverse(path.begin(), path.end());
        for (const Step& s : path) {
            if (s.via)
                send(*s.via);
            else
                for (InputIdx i : labels.words[s.from].inputs) send(i);
        }
        send(target->second);
        ++probes;
        run_window();
    }

    if (bb.resets_sent() != resets_before) throw Error("black box was reset during identification");
    auto built = construct_from_data(log, dims, nsdt);
    return ActiveResult{std::get<IdentifiedModel>(std::move(built)), std::move(log), probes, windows};
}

std::optional<std::vector<StateIdx>> check_equivalence(const NetworkDef& a, const NetworkDef& b) {
    if (a.input_nodes() != b.input_nodes() || a.state_nodes() != b.state_nodes() ||
        a.output_nodes() != b.output_nodes())
        throw UsageError("check_equivalence: networks have different dimensions");
    const Index N = a.num_states();
    constexpr Index kFree = ~Index{0};
    std::vector<Index> f(N, kFree);
    std::vector<char> used(N, 0);
    std::vector<Index> trail;

    // Assigns s -> t and everything it forces; false on contradiction.
    auto assign = [&](Index s, Index t) {
        std::vector<std::pair<Index, Index>> todo{{s, t}};
        while (!todo.empty()) {
            auto [x, y] = todo.back();
            todo.pop_back();
            if (f[x] != kFree) {
                if (f[x] != y) return false;
                continue;
            }
            if (used[y] || a.observe(StateIdx{x}) != b.observe(StateIdx{y})) return false;
            f[x] = y;
            used[y] = 1;
            trail.push_back(x);
            for (Index i = 0; i < a.num_inputs(); ++i)
                todo.emplace_back(a.step(InputIdx{i}, StateIdx{x}).value, b.step(InputIdx{i}, StateIdx{y}).value);
        }
        return true;
    };
    auto undo_to = [&](std::size_t mark) {
        while (trail.size() > mark) {
            used[f[trail.back()]] = 0;
            f[trail.back()] = kFree;
            trail.pop_back();
        }
    };
    std::function<bool()> solve = [&]() {
        Index s = 0;
        while (s < N && f[s] != kFree) ++s;
        if (s == N) return true;
        for (Index t = 0; t < N; ++t) {
            if (used[t] || a.observe(StateIdx{s}) != b.observe(StateIdx{t})) continue;
            const std::size_t mark = trail.size();
            if (assign(s, t) && solve()) return true;
            undo_to(mark);
        }
        return false;
    };
    if (!solve()) return std::nullopt;
    std::vector<StateIdx> out;
    for (Index x : f) out.emplace_back(x);
    return out;
}

bool is_identifiable(const NetworkDef& net) { return is_controllable(net) && is_online_observable(net).observable; }

std::string labeling_json(const IdentifiedModel& model) {
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t k = 0; k < model.labeling.size(); ++k) {
        nlohmann::json ins = nlohmann::json::array(), outs = nlohmann::json::array();
        for (InputIdx i : model.labeling[k].inputs) ins.push_back(i.value);
        for (OutputIdx o : model.labeling[k].outputs) outs.push_back(o.value);
        labels.push_back({{"state", k}, {"inputs", ins}, {"outputs", outs}});
    }
    return nlohmann::json{{"labels", labels}}.dump(2) + "\n";
}

}  // namespace bcn
