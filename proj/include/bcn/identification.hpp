#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bcn/blackbox.hpp"
#include "bcn/determination.hpp"

namespace bcn {

// One uninterrupted trace: outputs[0], inputs[0], outputs[1], ...
// Either both are empty or |outputs| = |inputs| + 1.
struct IOLog {
    InputSeq inputs;
    OutputSeq outputs;

    // "IO v1", then alternating "O k" / "I k" lines ending with "O k".
    static IOLog parse(std::string_view text);
    std::string serialize() const;

    // Prefix with the first `steps` inputs.
    IOLog truncated(std::size_t steps) const;
};

// The log contradicts the labelling derived from the tree: two values for the
// same cell, or an output the tree does not allow.
class IdentificationConflict : public Error {
public:
    using Error::Error;
};

struct Dimensions {
    unsigned ell;
    unsigned m;
    unsigned n;
};

struct IdentifiedModel {
    NetworkDef net;
    // labeling[k] is the leaf word of state k.
    std::vector<LeafWord> labeling;
};

struct Cell {
    InputIdx input;
    StateIdx label;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Insufficient {
    std::vector<StateIdx> missing_outputs;  // labels never seen
    std::vector<Cell> missing_cells;        // ordered by label, then input
};

using Construction = std::variant<IdentifiedModel, Insufficient>;

// Leaves of the tree are labelled 0..2^m-1 in leaf_words order. Positions of
// the log where a leaf word starts get that label; labels then spread along
// known cells and back to back windows until nothing changes.
Construction construct_from_data(const IOLog& log, Dimensions dims, const NoneStateDeterminingTree& nsdt);

struct ActiveResult {
    IdentifiedModel model;
    IOLog log;
    std::size_t probes = 0;   // inputs applied to learn a cell
    std::size_t windows = 0;  // runs of the determining tree
};

// Experiments on the black box without reset, planned with `model`, which must
// be controllable and online observable. Outputs that `model` cannot explain
// raise IdentificationConflict.
ActiveResult active_identify(BlackBox& bb, const NetworkDef& model, InputPolicy policy = InputPolicy::min_gamma);

// f with rho_b(f(s)) = rho_a(s) and sigma_b(i, f(s)) = f(sigma_a(i, s)) for
// all i, s; f[s] is the image of s.
std::optional<std::vector<StateIdx>> check_equivalence(const NetworkDef& a, const NetworkDef& b);

bool is_identifiable(const NetworkDef& net);

// {"labels": [{"state": k, "inputs": [...], "outputs": [...]}, ...]}
std::string labeling_json(const IdentifiedModel& model);

}  // namespace bcn
