#pragma once

#include <optional>
#include <vector>

#include "bcn/network.hpp"
#include "bcn/state_set.hpp"

namespace bcn {

// reachable(s, t): t is reached from s by some nonempty input sequence.
class ReachMatrix {
public:
    explicit ReachMatrix(std::vector<StateSet> rows) : rows_(std::move(rows)) {}

    bool reachable(StateIdx from, StateIdx to) const { return rows_[from.value].contains(to); }
    const StateSet& row(StateIdx from) const { return rows_[from.value]; }
    Index size() const { return static_cast<Index>(rows_.size()); }

    // No false entry off the diagonal.
    bool all_distinct_pairs_reachable() const;

private:
    std::vector<StateSet> rows_;
};

ReachMatrix reach_matrix(const NetworkDef& net);

// Every state reaches every other state. Decided by one forward and one
// backward search from state 0.
bool is_controllable(const NetworkDef& net);

// Shortest input sequence driving `from` to `to`; empty when from == to,
// nullopt when unreachable. Inputs are explored in ascending order and the
// first predecessor found is kept.
std::optional<InputSeq> find_drive_sequence(const NetworkDef& net, StateIdx from, StateIdx to);

}  // namespace bcn
