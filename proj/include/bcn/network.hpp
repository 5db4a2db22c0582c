#pragma once

#include <span>
#include <string>
#include <vector>

#include "bcn/types.hpp"

namespace bcn {

// Largest supported ell + m, and largest supported n. All tables are
// materialized explicitly, so 2^(ell+m) entries must fit in memory.
inline constexpr unsigned kMaxInputStateNodes = 24;
inline constexpr unsigned kMaxOutputNodes = 24;

// A Boolean control network given by its complete truth tables.
//
// sigma is indexed by (input, state) and stored input-major: the entry for
// input i and state s lives at i * 2^m + s. rho is indexed by state.
class NetworkDef {
public:
    NetworkDef(unsigned ell, unsigned m, unsigned n, std::vector<Index> sigma, std::vector<Index> rho,
               std::string name = {});

    unsigned input_nodes() const { return ell_; }
    unsigned state_nodes() const { return m_; }
    unsigned output_nodes() const { return n_; }

    Index num_inputs() const { return Index{1} << ell_; }
    Index num_states() const { return Index{1} << m_; }
    Index num_outputs() const { return Index{1} << n_; }

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    StateIdx step(InputIdx i, StateIdx s) const { return StateIdx{sigma_[i.value * num_states() + s.value]}; }
    OutputIdx observe(StateIdx s) const { return OutputIdx{rho_[s.value]}; }

    std::span<const Index> sigma_row(InputIdx i) const {
        return std::span<const Index>(sigma_).subspan(i.value * num_states(), num_states());
    }
    const std::vector<Index>& sigma_table() const { return sigma_; }
    const std::vector<Index>& rho_table() const { return rho_; }

    bool valid_input(InputIdx i) const { return i.value < num_inputs(); }
    bool valid_state(StateIdx s) const { return s.value < num_states(); }
    bool valid_output(OutputIdx o) const { return o.value < num_outputs(); }

    // Tables and dimensions only; the name is a label.
    friend bool operator==(const NetworkDef& a, const NetworkDef& b) {
        return a.ell_ == b.ell_ && a.m_ == b.m_ && a.n_ == b.n_ && a.sigma_ == b.sigma_ && a.rho_ == b.rho_;
    }

private:
    unsigned ell_;
    unsigned m_;
    unsigned n_;
    std::vector<Index> sigma_;
    std::vector<Index> rho_;
    std::string name_;
};

// Throws ModelError when a dimension is zero or the caps are exceeded.
void check_dimensions(unsigned ell, unsigned m, unsigned n);

StateIdx step(const NetworkDef& net, InputIdx i, StateIdx s);
OutputIdx observe(const NetworkDef& net, StateIdx s);

// The state sequence s(t0) ... s(t+1) driven by iseq from s. iseq must be nonempty.
StateSeq run_states(const NetworkDef& net, StateIdx s, std::span<const InputIdx> iseq);

// Pointwise observation of run_states.
OutputSeq run_outputs(const NetworkDef& net, StateIdx s, std::span<const InputIdx> iseq);

// step for a concrete input, identity for the empty input.
StateIdx xi(const NetworkDef& net, MaybeInput i, StateIdx s);

enum class NodeKind { input, state, output };

struct Node {
    NodeKind kind;
    unsigned number;  // 1-based node number

    friend auto operator<=>(const Node&, const Node&) = default;
};

std::string to_string(Node node);

struct InfluenceEdge {
    Node from;
    Node to;

    friend auto operator<=>(const InfluenceEdge&, const InfluenceEdge&) = default;
};

// Semantic dependency graph: (v, v') is an edge iff flipping v changes the
// value of v' in some context.
struct InfluenceGraph {
    std::vector<InfluenceEdge> edges;  // sorted

    bool has_edge(Node from, Node to) const;
};

InfluenceGraph infer_influence_graph(const NetworkDef& net);

// Bit of node `number` (1-based, MSB first) inside an index of the given width.
inline Index node_mask(unsigned number, unsigned width) { return Index{1} << (width - number); }

}  // namespace bcn
