#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcn/network.hpp"
#include "bcn/online.hpp"
#include "bcn/state_set.hpp"

// Slow reference implementations, written straight from the definitions.
// Their size limits are hard errors.
namespace bcn::oracle {

inline constexpr unsigned kMaxGammaStateNodes = 4;
inline constexpr unsigned kMaxWordInputNodes = 2;
inline constexpr unsigned kMaxWordStateNodes = 3;

// Smallest k such that S can be narrowed to one state within k steps by some
// adaptive strategy, searched by depth-bounded recursion. S must be nonempty
// and output-uniform; m <= 4.
Gamma gamma(const NetworkDef& net, const StateSet& S);

bool online(const NetworkDef& net);

// Default bound: 2^(2m). l <= 2, m <= 3.
std::size_t default_word_bound(const NetworkDef& net);

// Types I-III: some word of length at most the bound works. Type IV: every
// word of exactly the bound length separates all initial states.
bool observable_type1(const NetworkDef& net, std::optional<std::size_t> word_bound = std::nullopt);
bool observable_type2(const NetworkDef& net, std::optional<std::size_t> word_bound = std::nullopt);
bool observable_type3(const NetworkDef& net, std::optional<std::size_t> word_bound = std::nullopt);
bool observable_type4(const NetworkDef& net, std::optional<std::size_t> word_bound = std::nullopt);

// dist[s][t]: length of the shortest nonempty word from s to t, by
// enumerating every word of length up to 2^m. l <= 2, m <= 3.
std::vector<std::vector<std::optional<std::size_t>>> word_distances(const NetworkDef& net);

bool controllable(const NetworkDef& net);

// Uniform tables from a 64-bit Mersenne twister.
NetworkDef random_network(unsigned ell, unsigned m, unsigned n, std::uint64_t seed);

// First random network from this seed's stream that is online observable
// (and controllable when asked).
NetworkDef random_online_observable(unsigned ell, unsigned m, unsigned n, std::uint64_t seed,
                                    bool controllable = false);

// The network with state s renamed perm[s].
NetworkDef permute_states(const NetworkDef& net, const std::vector<StateIdx>& perm);

struct CheckReport {
    std::size_t nets = 0;
    std::size_t comparisons = 0;
    std::vector<std::string> mismatches;

    bool ok() const { return mismatches.empty(); }
};

// Every decider against its oracle on `seeds` random networks.
CheckReport cross_check(std::size_t seeds, unsigned ell, unsigned m, unsigned n, std::uint64_t first_seed = 0);

}  // namespace bcn::oracle
