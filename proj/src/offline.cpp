#include "bcn/offline.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

#include "bcn/state_set.hpp"

namespace bcn {
namespace {

// Unordered pairs a < b are numbered b(b-1)/2 + a.
std::size_t pair_index(Index a, Index b) {
    if (a > b) std::swap(a, b);
    return std::size_t{b} * (b - 1) / 2 + a;
}

std::size_t pair_count(Index n) { return std::size_t{n} * (n - 1) / 2; }

std::pair<Index, Index> pair_members(std::size_t idx) {
    // Largest b with b(b-1)/2 <= idx.
    Index b = 1;
    while (std::size_t{b + 1} * b / 2 <= idx) ++b;
    return {static_cast<Index>(idx - std::size_t{b} * (b - 1) / 2), b};
}

std::vector<std::vector<Index>> output_classes(const NetworkDef& net) {
    std::vector<std::vector<Index>> classes(net.num_outputs());
    for (Index s = 0; s < net.num_states(); ++s) classes[net.observe(StateIdx{s}).value].push_back(s);
    std::erase_if(classes, [](const auto& c) { return c.empty(); });
    return classes;
}

template <class Node>
std::optional<InputSeq> trace_back(const std::vector<Node>& nodes, std::size_t at) {
    InputSeq word;
    for (; nodes[at].parent != at; at = nodes[at].parent) word.push_back(nodes[at].via);
    std::reverse(word.begin(), word.end());
    return word;
}

struct TrackKey {
    Index current;
    StateSet others;
    friend bool operator==(const TrackKey&, const TrackKey&) = default;
};

struct TrackKeyHash {
    std::size_t operator()(const TrackKey& k) const noexcept { return k.others.hash() * 31 + k.current; }
};

struct BlocksHash {
    std::size_t operator()(const std::vector<StateSet>& blocks) const noexcept {
        std::size_t h = blocks.size();
        for (const auto& b : blocks) h = h * 1000003u ^ b.hash();
        return h;
    }
};

}  // namespace

bool pair_distinguishable(const NetworkDef& net, StateIdx a, StateIdx b) {
    if (!net.valid_state(a) || !net.valid_state(b)) throw UsageError("pair_distinguishable: state out of range");
    if (a == b) throw UsageError("pair_distinguishable: the two states must differ");
    if (net.observe(a) != net.observe(b)) return true;

    std::vector<char> seen(pair_count(net.num_states()), 0);
    std::deque<std::pair<Index, Index>> queue{{a.value, b.value}};
    seen[pair_index(a.value, b.value)] = 1;
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        for (Index i = 0; i < net.num_inputs(); ++i) {
            const StateIdx x2 = net.step(InputIdx{i}, StateIdx{x});
            const StateIdx y2 = net.step(InputIdx{i}, StateIdx{y});
            if (x2 == y2) continue;
            if (net.observe(x2) != net.observe(y2)) return true;
            char& mark = seen[pair_index(x2.value, y2.value)];
            if (!mark) {
                mark = 1;
                queue.emplace_back(x2.value, y2.value);
            }
        }
    }
    return false;
}

bool is_observable_type2(const NetworkDef& net) {
    const Index n = net.num_states();
    const std::size_t pairs = pair_count(n);
    std::vector<char> split(pairs, 0);

    // Reverse edges of the pair graph restricted to output-equal sources, in
    // compressed row form keyed by target pair.
    std::vector<std::uint32_t> offset(pairs + 1, 0);
    auto for_each_edge = [&](auto&& f) {
        for (const auto& cls : output_classes(net))
            for (std::size_t u = 0; u < cls.size(); ++u)
                for (std::size_t v = u + 1; v < cls.size(); ++v)
                    for (Index i = 0; i < net.num_inputs(); ++i) {
                        const Index x = net.step(InputIdx{i}, StateIdx{cls[u]}).value;
                        const Index y = net.step(InputIdx{i}, StateIdx{cls[v]}).value;
                        if (x != y) f(pair_index(cls[u], cls[v]), pair_index(x, y));
                    }
    };
    for_each_edge([&](std::size_t, std::size_t to) { ++offset[to + 1]; });
    for (std::size_t k = 0; k < pairs; ++k) offset[k + 1] += offset[k];
    std::vector<std::uint32_t> sources(offset[pairs]);
    {
        std::vector<std::uint32_t> fill(offset.begin(), offset.end() - 1);
        for_each_edge([&](std::size_t from, std::size_t to) { sources[fill[to]++] = static_cast<std::uint32_t>(from); });
    }

    std::vector<std::size_t> work;
    for (std::size_t k = 0; k < pairs; ++k) {
        auto [a, b] = pair_members(k);
        if (net.observe(StateIdx{a}) != net.observe(StateIdx{b})) {
            split[k] = 1;
            work.push_back(k);
        }
    }
    while (!work.empty()) {
        const std::size_t q = work.back();
        work.pop_back();
        for (std::uint32_t e = offset[q]; e < offset[q + 1]; ++e) {
            const std::size_t p = sources[e];
            if (!split[p]) {
                split[p] = 1;
                work.push_back(p);
            }
        }
    }
    return std::all_of(split.begin(), split.end(), [](char c) { return c != 0; });
}

std::optional<InputSeq> distinguishing_preset_for_state(const NetworkDef& net, StateIdx s) {
    if (!net.valid_state(s)) throw UsageError("distinguishing_preset_for_state: state out of range");
    const Index n = net.num_states();
    const OutputIdx o = net.observe(s);
    StateSet others(n);
    for (Index t = 0; t < n; ++t)
        if (t != s.value && net.observe(StateIdx{t}) == o) others.insert(StateIdx{t});
    if (others.empty()) return InputSeq{};

    struct Entry {
        TrackKey key;
        std::size_t parent;
        InputIdx via;
    };
    std::vector<Entry> nodes{{{s.value, others}, 0, InputIdx{0}}};
    std::unordered_set<TrackKey, TrackKeyHash> seen{nodes[0].key};
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        for (Index i = 0; i < net.num_inputs(); ++i) {
            const InputIdx in{i};
            const StateIdx c2 = net.step(in, StateIdx{nodes[head].key.current});
            const OutputIdx o2 = net.observe(c2);
            StateSet t2(n);
            nodes[head].key.others.for_each([&](StateIdx t) {
                const StateIdx x = net.step(in, t);
                if (net.observe(x) == o2) t2.insert(x);
            });
            if (t2.contains(c2)) continue;  // merged with another trajectory for good
            TrackKey key{c2.value, std::move(t2)};
            if (seen.count(key)) continue;
            seen.insert(key);
            const bool done = key.others.empty();
            nodes.push_back({std::move(key), head, in});
            if (done) return trace_back(nodes, nodes.size() - 1);
        }
    }
    return std::nullopt;
}

bool is_observable_type1(const NetworkDef& net) {
    for (Index s = 0; s < net.num_states(); ++s)
        if (!distinguishing_preset_for_state(net, StateIdx{s})) return false;
    return true;
}

std::optional<InputSeq> preset_distinguishing_sequence(const NetworkDef& net) {
    const Index n = net.num_states();
    // A node keeps only the blocks that still hold two or more initial states.
    std::vector<StateSet> start;
    for (const auto& cls : output_classes(net)) {
        if (cls.size() < 2) continue;
        StateSet b(n);
        for (Index s : cls) b.insert(StateIdx{s});
        start.push_back(std::move(b));
    }
    if (start.empty()) return InputSeq{};
    std::sort(start.begin(), start.end(), canonical_less);

    struct Entry {
        std::vector<StateSet> blocks;
        std::size_t parent;
        InputIdx via;
    };
    std::vector<Entry> nodes{{start, 0, InputIdx{0}}};
    std::unordered_set<std::vector<StateSet>, BlocksHash> seen{start};
    std::vector<std::vector<StateIdx>> parts(net.num_outputs());
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        for (Index i = 0; i < net.num_inputs(); ++i) {
            const InputIdx in{i};
            std::vector<StateSet> next;
            bool merged = false;
            for (const StateSet& block : nodes[head].blocks) {
                StateSet image(n);
                std::vector<Index> touched;
                block.for_each([&](StateIdx s) {
                    const StateIdx t = net.step(in, s);
                    if (image.contains(t)) merged = true;
                    image.insert(t);
                });
                if (merged) break;
                image.for_each([&](StateIdx t) {
                    const Index o = net.observe(t).value;
                    if (parts[o].empty()) touched.push_back(o);
                    parts[o].push_back(t);
                });
                for (Index o : touched) {
                    if (parts[o].size() >= 2) {
                        StateSet b(n);
                        for (StateIdx t : parts[o]) b.insert(t);
                        next.push_back(std::move(b));
                    }
                    parts[o].clear();
                }
            }
            if (merged) continue;
            std::sort(next.begin(), next.end(), canonical_less);
            if (seen.count(next)) continue;
            seen.insert(next);
            const bool done = next.empty();
            nodes.push_back({std::move(next), head, in});
            if (done) return trace_back(nodes, nodes.size() - 1);
        }
    }
    return std::nullopt;
}

bool is_observable_type3(const NetworkDef& net) { return preset_distinguishing_sequence(net).has_value(); }

bool is_observable_type4(const NetworkDef& net) {
    // Pairs that agree on output so far; an edge per input to the successor
    // pair when it still agrees. The property holds iff no input merges such a
    // pair and the graph is acyclic, so every agreeing pair dies out within
    // (number of nodes) steps.
    const Index n = net.num_states();
    std::vector<std::uint32_t> indegree(pair_count(n), 0);
    std::vector<std::size_t> nodes;
    for (const auto& cls : output_classes(net))
        for (std::size_t u = 0; u < cls.size(); ++u)
            for (std::size_t v = u + 1; v < cls.size(); ++v) nodes.push_back(pair_index(cls[u], cls[v]));

    auto successors = [&](std::size_t p, auto&& f) -> bool {
        auto [a, b] = pair_members(p);
        for (Index i = 0; i < net.num_inputs(); ++i) {
            const StateIdx x = net.step(InputIdx{i}, StateIdx{a});
            const StateIdx y = net.step(InputIdx{i}, StateIdx{b});
            if (x == y) return false;
            if (net.observe(x) == net.observe(y)) f(pair_index(x.value, y.value));
        }
        return true;
    };
    for (std::size_t p : nodes)
        if (!successors(p, [&](std::size_t q) { ++indegree[q]; })) return false;

    std::vector<std::size_t> ready;
    for (std::size_t p : nodes)
        if (indegree[p] == 0) ready.push_back(p);
    std::size_t removed = 0;
    while (!ready.empty()) {
        const std::size_t p = ready.back();
        ready.pop_back();
        ++removed;
        successors(p, [&](std::size_t q) {
            if (--indegree[q] == 0) ready.push_back(q);
        });
    }
    return removed == nodes.size();
}

}  // namespace bcn
