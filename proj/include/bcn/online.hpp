#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bcn/network.hpp"
#include "bcn/state_set.hpp"

namespace bcn {

// Image of S under xi(mi, .), kept to the states observed as mo when mo is
// not empty. S must be nonempty.
StateSet zeta(const NetworkDef& net, const StateSet& S, MaybeInput mi, MaybeOutput mo);

// Candidate set after observing oseq under iseq; |oseq| = |iseq| + 1.
// An empty result means the observation cannot come from this model.
StateSet g_sets(const NetworkDef& net, const InputSeq& iseq, const OutputSeq& oseq);

// The nonempty zeta(all states, eps, o), ordered by o.
std::vector<std::pair<OutputIdx, StateSet>> initial_classes(const NetworkDef& net);

// The nonempty zeta(S, i, o) ordered by o, or nullopt when i maps two members
// of S to the same state.
std::optional<std::vector<std::pair<OutputIdx, StateSet>>> admissible_split(const NetworkDef& net,
                                                                            const StateSet& S, InputIdx i);

class Gamma {
public:
    static constexpr Gamma infinite() { return Gamma(); }
    constexpr explicit Gamma(Index v) : value_(v) {}

    constexpr bool finite() const { return value_ != kInf; }
    constexpr Index value() const { return value_; }

    friend constexpr auto operator<=>(Gamma, Gamma) = default;

    std::string to_string() const { return finite() ? std::to_string(value_) : "inf"; }

private:
    static constexpr Index kInf = ~Index{0};
    constexpr Gamma() : value_(kInf) {}
    Index value_;
};

enum class GammaMode { full, reachable };

// Gamma over a domain of output-uniform sets. `full` covers every nonempty
// output-uniform set; `reachable` covers the closure of the initial classes
// under injective inputs.
class GammaTable {
public:
    GammaMode mode() const { return mode_; }
    // Canonical order: cardinality, then bitmask.
    const std::vector<StateSet>& domain() const { return domain_; }
    // Bellman rounds until the fixed point was confirmed.
    std::size_t iterations() const { return iterations_; }

    bool contains(const StateSet& S) const { return index_.count(S) != 0; }
    const Gamma* find(const StateSet& S) const;
    Gamma at(const StateSet& S) const;

private:
    friend class GammaTableBuilder;

    GammaMode mode_ = GammaMode::reachable;
    std::vector<StateSet> domain_;
    std::vector<Gamma> values_;
    std::unordered_map<StateSet, std::size_t, StateSetHash> index_;
    std::size_t iterations_ = 0;
};

// Largest output class the full-domain engine will enumerate.
inline constexpr std::size_t kMaxFullClassSize = 22;

GammaTable gamma_table(const NetworkDef& net, GammaMode mode = GammaMode::reachable);

// Injective inputs whose successors all have finite Gamma, ascending.
std::vector<InputIdx> psi(const NetworkDef& net, const StateSet& S, const GammaTable& table);

// Worst-case remaining steps after applying i to S: max over successors.
// Infinite when i is not injective on S or a successor is unknown.
Gamma gamma_after(const NetworkDef& net, const StateSet& S, InputIdx i, const GammaTable& table);

struct OnlineVerdict {
    bool observable = false;
    std::optional<OutputIdx> witness_output;
    std::optional<StateSet> witness_class;
    std::vector<std::pair<OutputIdx, Gamma>> class_gamma;
};

OnlineVerdict online_verdict(const NetworkDef& net, const GammaTable& table);
OnlineVerdict is_online_observable(const NetworkDef& net, GammaMode mode = GammaMode::reachable);

struct GraphEdge {
    std::size_t from;
    std::size_t to;
    std::vector<InputIdx> inputs;
    std::vector<OutputIdx> outputs;
};

struct InputLabelledGraph {
    std::vector<StateSet> vertices;  // canonical order
    std::vector<Gamma> gamma;
    std::vector<GraphEdge> edges;    // sorted by (from, to)
    bool faithful = false;

    std::optional<std::size_t> index_of(const StateSet& S) const;
    const GraphEdge* edge(std::size_t from, std::size_t to) const;
};

// A vertex with no usable input: the initial class containing it cannot be
// determined online.
struct GraphFailure {
    OutputIdx output;
    StateSet witness_class;
    StateSet vertex;
};

using GraphResult = std::variant<InputLabelledGraph, GraphFailure>;

// faithful: layer-by-layer construction over every output-uniform set, the
// candidate inputs of a set being the intersection of psi over its subsets one
// smaller. Otherwise the same graph restricted to the reachable domain.
GraphResult build_input_labelled_graph(const NetworkDef& net, bool faithful = false);

enum class GraphFormat { dot, json };

std::string export_graph(const InputLabelledGraph& g, GraphFormat format);

}  // namespace bcn
