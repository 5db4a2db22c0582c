#include "bcn/controllability.hpp"

#include <algorithm>
#include <deque>

namespace bcn {

bool ReachMatrix::all_distinct_pairs_reachable() const {
    for (Index s = 0; s < size(); ++s)
        for (Index t = 0; t < size(); ++t)
            if (s != t && !rows_[s].contains(StateIdx{t})) return false;
    return true;
}

ReachMatrix reach_matrix(const NetworkDef& net) {
    const Index n = net.num_states();
    std::vector<StateSet> rows;
    rows.reserve(n);
    std::vector<Index> queue;
    for (Index s = 0; s < n; ++s) {
        StateSet seen(n);
        queue.clear();
        // Seed with one-step successors so that s itself only counts when it
        // lies on a cycle.
        for (Index i = 0; i < net.num_inputs(); ++i) {
            const StateIdx t = net.step(InputIdx{i}, StateIdx{s});
            if (!seen.contains(t)) {
                seen.insert(t);
                queue.push_back(t.value);
            }
        }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (Index i = 0; i < net.num_inputs(); ++i) {
                const StateIdx t = net.step(InputIdx{i}, StateIdx{queue[head]});
                if (!seen.contains(t)) {
                    seen.insert(t);
                    queue.push_back(t.value);
                }
            }
        }
        rows.push_back(std::move(seen));
    }
    return ReachMatrix(std::move(rows));
}

bool is_controllable(const NetworkDef& net) {
    const Index n = net.num_states();
    std::vector<std::vector<Index>> preds(n);
    for (Index i = 0; i < net.num_inputs(); ++i)
        for (Index s = 0; s < n; ++s) preds[net.step(InputIdx{i}, StateIdx{s}).value].push_back(s);

    auto covers_all = [n](auto&& neighbours) {
        std::vector<char> seen(n, 0);
        std::vector<Index> stack{0};
        seen[0] = 1;
        Index count = 1;
        while (!stack.empty()) {
            const Index s = stack.back();
            stack.pop_back();
            neighbours(s, [&](Index t) {
                if (!seen[t]) {
                    seen[t] = 1;
                    ++count;
                    stack.push_back(t);
                }
            });
        }
        return count == n;
    };

    const bool forward = covers_all([&](Index s, auto&& visit) {
        for (Index i = 0; i < net.num_inputs(); ++i) visit(net.step(InputIdx{i}, StateIdx{s}).value);
    });
    if (!forward) return false;
    return covers_all([&](Index s, auto&& visit) {
        for (Index p : preds[s]) visit(p);
    });
}

std::optional<InputSeq> find_drive_sequence(const NetworkDef& net, StateIdx from, StateIdx to) {
    if (!net.valid_state(from) || !net.valid_state(to)) throw UsageError("find_drive_sequence: state out of range");
    if (from == to) return InputSeq{};

    const Index n = net.num_states();
    constexpr Index kUnseen = ~Index{0};
    std::vector<Index> parent(n, kUnseen);
    std::vector<Index> via(n, 0);
    std::deque<Index> queue{from.value};
    parent[from.value] = from.value;
    while (!queue.empty()) {
        const Index s = queue.front();
        queue.pop_front();
        for (Index i = 0; i < net.num_inputs(); ++i) {
            const Index t = net.step(InputIdx{i}, StateIdx{s}).value;
            if (parent[t] != kUnseen) continue;
            parent[t] = s;
            via[t] = i;
            if (t == to.value) {
                InputSeq path;
                for (Index x = t; x != from.value; x = parent[x]) path.emplace_back(via[x]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            queue.push_back(t);
        }
    }
    return std::nullopt;
}

}  // namespace bcn
