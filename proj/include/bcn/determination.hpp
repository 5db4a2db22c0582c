#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bcn/blackbox.hpp"
#include "bcn/online.hpp"

namespace bcn {

// How an input is picked from psi(S).
//  min_gamma: smallest worst-case remaining Gamma, lowest index on ties.
//  first_admissible: lowest index whose successors all have smaller Gamma.
//  random: uniform over psi(S), seeded per session.
enum class InputPolicy { min_gamma, first_admissible, random };

// A network together with its Gamma table. Construction fails unless the
// network is online observable. Cheap to copy.
class DeterminationModel {
public:
    explicit DeterminationModel(NetworkDef net, GammaMode mode = GammaMode::reachable);

    const NetworkDef& net() const { return data_->net; }
    const GammaTable& gamma() const { return data_->gamma; }

    // Input chosen for a non-singleton candidate set.
    InputIdx choose(const StateSet& S, InputPolicy policy, std::mt19937_64* rng = nullptr) const;

private:
    struct Data {
        NetworkDef net;
        GammaTable gamma;
    };
    std::shared_ptr<const Data> data_;
};

class DeterminationSession {
public:
    // Throws InconsistentObservation when no state produces o0.
    DeterminationSession(DeterminationModel model, OutputIdx o0, InputPolicy policy = InputPolicy::min_gamma,
                         std::uint64_t seed = 0);

    const DeterminationModel& model() const { return model_; }
    const StateSet& candidates() const { return S_; }
    const InputSeq& inputs() const { return history_i_; }
    const OutputSeq& outputs() const { return history_o_; }
    bool determined() const { return S_.size() == 1; }

    // Picks the next input and remembers it as pending. Fails once determined.
    InputIdx next_input();
    // Applies the pending input i and the output seen after it. An empty
    // candidate set aborts with InconsistentObservation and leaves the
    // session unchanged.
    void advance(InputIdx i, OutputIdx o);

    // The state the network started in. Requires determined().
    StateIdx recover_initial_state() const;
    // The state the network is in now. Requires determined().
    StateIdx current_state() const;

private:
    DeterminationModel model_;
    InputPolicy policy_;
    std::mt19937_64 rng_;
    StateSet initial_class_;
    StateSet S_;
    InputSeq history_i_;
    OutputSeq history_o_;
    std::optional<InputIdx> pending_;
};

struct DeterminationResult {
    StateIdx initial;
    std::size_t steps = 0;
};

// Steps 2-3 against the black box until one candidate is left.
DeterminationResult run_determination(DeterminationSession& session, BlackBox& bb);

// Convenience: start from the black box's current output.
DeterminationResult run_determination(const DeterminationModel& model, BlackBox& bb,
                                      InputPolicy policy = InputPolicy::min_gamma, std::uint64_t seed = 0);

// Node (S, i, o). The root is (all states, eps, eps); the input of a node is
// the one applied at it, eps at leaves.
struct TreeNode {
    StateSet set;
    MaybeInput input;
    MaybeOutput output;
    std::vector<std::size_t> children;
};

struct DeterminingTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    std::size_t leaf_count() const;
};

struct NsdtNode {
    MaybeInput input;
    MaybeOutput output;
    std::vector<std::size_t> children;
};

struct NoneStateDeterminingTree {
    std::vector<NsdtNode> nodes;  // nodes[0] is the root

    std::size_t leaf_count() const;
};

// Only min_gamma and first_admissible are accepted.
DeterminingTree build_determining_tree(const DeterminationModel& model,
                                       InputPolicy policy = InputPolicy::min_gamma);
DeterminingTree build_determining_tree(const NetworkDef& net, InputPolicy policy = InputPolicy::min_gamma);

NoneStateDeterminingTree strip_states(const DeterminingTree& tree);

struct NsdtCheck {
    bool ok = true;
    std::string reason;
};

NsdtCheck validate_nsdt(const NoneStateDeterminingTree& tree, unsigned m);

// Root-to-leaf label path: inputs of the internal nodes, outputs of every
// node below the root. |outputs| = |inputs| + 1.
struct LeafWord {
    InputSeq inputs;
    OutputSeq outputs;

    friend auto operator<=>(const LeafWord&, const LeafWord&) = default;
};

// Sorted by output word, then input word.
std::vector<LeafWord> leaf_words(const NoneStateDeterminingTree& tree);

}  // namespace bcn
