#pragma once

#include <optional>

#include "bcn/network.hpp"

namespace bcn {

// Some input word gives different output sequences from a and b.
// Forward search over the pair graph; a and b must differ.
bool pair_distinguishable(const NetworkDef& net, StateIdx a, StateIdx b);

// Type II: every pair of distinct initial states is distinguishable by some
// word. Decided by backward propagation from output-splitting pairs.
bool is_observable_type2(const NetworkDef& net);

// Shortest word whose output sequence from s differs from the output sequence
// of every other initial state. An empty word means rho alone separates s.
std::optional<InputSeq> distinguishing_preset_for_state(const NetworkDef& net, StateIdx s);

// Type I: every state has such a word.
bool is_observable_type1(const NetworkDef& net);

// Shortest single word separating all initial states pairwise (Type III
// witness); nullopt when none exists.
std::optional<InputSeq> preset_distinguishing_sequence(const NetworkDef& net);

bool is_observable_type3(const NetworkDef& net);

// Type IV: every sufficiently long word separates all initial states.
bool is_observable_type4(const NetworkDef& net);

}  // namespace bcn
