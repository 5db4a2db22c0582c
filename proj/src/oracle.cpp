#include "bcn/oracle.hpp"

#include <map>
#include <random>
#include <set>

#include "bcn/controllability.hpp"
#include "bcn/offline.hpp"

namespace bcn::oracle {
namespace {

void require_gamma_bound(const NetworkDef& net) {
    if (net.state_nodes() > kMaxGammaStateNodes)
        throw UsageError("oracle gamma supports at most " + std::to_string(kMaxGammaStateNodes) + " state nodes");
}

void require_word_bound(const NetworkDef& net) {
    if (net.input_nodes() > kMaxWordInputNodes || net.state_nodes() > kMaxWordStateNodes)
        throw UsageError("word oracles support at most " + std::to_string(kMaxWordInputNodes) + " input and " +
                         std::to_string(kMaxWordStateNodes) + " state nodes");
}

class GammaSearch {
public:
    explicit GammaSearch(const NetworkDef& net) : net_(net) {}

    // Can S be narrowed to one state within k inputs?
    bool within(const StateSet& S, std::size_t k) {
        if (S.size() == 1) return true;
        if (k == 0) return false;
        auto key = std::make_pair(S.words(), k);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool ok = false;
        for (Index i = 0; i < net_.num_inputs() && !ok; ++i) {
            // The input must keep the candidates apart.
            StateSet image(net_.num_states());
            bool merged = false;
            S.for_each([&](StateIdx s) {
                const StateIdx t = net_.step(InputIdx{i}, s);
                if (image.contains(t)) merged = true;
                image.insert(t);
            });
            if (merged) continue;
            bool all = true;
            for (Index o = 0; o < net_.num_outputs() && all; ++o) {
                StateSet part(net_.num_states());
                image.for_each([&](StateIdx t) {
                    if (net_.observe(t).value == o) part.insert(t);
                });
                if (!part.empty()) all = within(part, k - 1);
            }
            ok = all;
        }
        memo_[key] = ok;
        return ok;
    }

private:
    const NetworkDef& net_;
    std::map<std::pair<std::vector<std::uint64_t>, std::size_t>, bool> memo_;
};

// A strategy never needs to revisit a set, so the answer is at most the
// number of distinct sets it can pass through.
std::size_t depth_limit(const NetworkDef& net, const StateSet& S) {
    std::set<std::vector<std::uint64_t>> seen{S.words()};
    std::vector<StateSet> todo{S};
    while (!todo.empty()) {
        StateSet cur = todo.back();
        todo.pop_back();
        for (Index i = 0; i < net.num_inputs(); ++i)
            for (Index o = 0; o < net.num_outputs(); ++o) {
                StateSet next(net.num_states());
                cur.for_each([&](StateIdx s) {
                    const StateIdx t = net.step(InputIdx{i}, s);
                    if (net.observe(t).value == o) next.insert(t);
                });
                if (!next.empty() && seen.insert(next.words()).second) todo.push_back(next);
            }
    }
    return seen.size();
}

// Everything the past inputs determine about the future: where each initial
// state is now, and which initial states share an output history. States that
// are already alone in their block are dropped.
struct Config {
    static constexpr Index kDone = ~Index{0};
    std::vector<Index> current;
    std::vector<Index> block;

    friend auto operator<=>(const Config&, const Config&) = default;

    bool all_done() const {
        for (Index b : block)
            if (b != kDone) return false;
        return true;
    }
};

Config canonical(std::vector<Index> current, const std::vector<std::pair<Index, Index>>& keys) {
    // keys[s] = (old block, output); states sharing a key share a new block.
    const std::size_t N = current.size();
    std::map<std::pair<Index, Index>, std::size_t> count;
    for (std::size_t s = 0; s < N; ++s)
        if (keys[s].first != Config::kDone) ++count[keys[s]];
    std::map<std::pair<Index, Index>, Index> rename;
    Config c;
    c.current.assign(N, Config::kDone);
    c.block.assign(N, Config::kDone);
    for (std::size_t s = 0; s < N; ++s) {
        if (keys[s].first == Config::kDone || count[keys[s]] == 1) continue;
        auto [it, _] = rename.try_emplace(keys[s], static_cast<Index>(rename.size()));
        c.block[s] = it->second;
        c.current[s] = current[s];
    }
    return c;
}

Config start_config(const NetworkDef& net) {
    std::vector<Index> current(net.num_states());
    std::vector<std::pair<Index, Index>> keys(net.num_states());
    for (Index s = 0; s < net.num_states(); ++s) {
        current[s] = s;
        keys[s] = {0, net.observe(StateIdx{s}).value};
    }
    return canonical(std::move(current), keys);
}

Config advance(const NetworkDef& net, const Config& c, InputIdx i) {
    std::vector<Index> current(c.current.size(), Config::kDone);
    std::vector<std::pair<Index, Index>> keys(c.current.size(), {Config::kDone, 0});
    for (std::size_t s = 0; s < c.current.size(); ++s) {
        if (c.block[s] == Config::kDone) continue;
        current[s] = net.step(i, StateIdx{c.current[s]}).value;
        keys[s] = {c.block[s], net.observe(StateIdx{current[s]}).value};
    }
    return canonical(std::move(current), keys);
}

// Every configuration reached by a word of length at most `bound`.
std::set<Config> explore(const NetworkDef& net, std::size_t bound) {
    std::set<Config> seen{start_config(net)};
    std::vector<Config> layer{start_config(net)};
    for (std::size_t d = 0; d < bound && !layer.empty(); ++d) {
        std::vector<Config> next;
        for (const Config& c : layer)
            for (Index i = 0; i < net.num_inputs(); ++i) {
                Config n = advance(net, c, InputIdx{i});
                if (seen.insert(n).second) next.push_back(std::move(n));
            }
        layer = std::move(next);
    }
    return seen;
}

std::size_t bound_or_default(const NetworkDef& net, std::optional<std::size_t> word_bound) {
    require_word_bound(net);
    return word_bound.value_or(default_word_bound(net));
}

}  // namespace

Gamma gamma(const NetworkDef& net, const StateSet& S) {
    require_gamma_bound(net);
    if (S.empty()) throw UsageError("oracle gamma: empty set");
    const OutputIdx o = net.observe(S.first());
    S.for_each([&](StateIdx s) {
        if (net.observe(s) != o) throw UsageError("oracle gamma: set is not output-uniform");
    });
    GammaSearch search(net);
    const std::size_t limit = depth_limit(net, S);
    for (std::size_t k = 0; k <= limit; ++k)
        if (search.within(S, k)) return Gamma(static_cast<Index>(k));
    return Gamma::infinite();
}

bool online(const NetworkDef& net) {
    for (auto& [o, S] : initial_classes(net))
        if (!gamma(net, S).finite()) return false;
    return true;
}

std::size_t default_word_bound(const NetworkDef& net) { return std::size_t{1} << (2 * net.state_nodes()); }

bool observable_type1(const NetworkDef& net, std::optional<std::size_t> word_bound) {
    const auto configs = explore(net, bound_or_default(net, word_bound));
    for (Index s = 0; s < net.num_states(); ++s) {
        bool alone = false;
        for (const Config& c : configs)
            if (c.block[s] == Config::kDone) {
                alone = true;
                break;
            }
        if (!alone) return false;
    }
    return true;
}

bool observable_type2(const NetworkDef& net, std::optional<std::size_t> word_bound) {
    const auto configs = explore(net, bound_or_default(net, word_bound));
    for (Index a = 0; a < net.num_states(); ++a)
        for (Index b = a + 1; b < net.num_states(); ++b) {
            bool apart = false;
            for (const Config& c : configs)
                if (c.block[a] == Config::kDone || c.block[a] != c.block[b]) {
                    apart = true;
                    break;
                }
            if (!apart) return false;
        }
    return true;
}

bool observable_type3(const NetworkDef& net, std::optional<std::size_t> word_bound) {
    for (const Config& c : explore(net, bound_or_default(net, word_bound)))
        if (c.all_done()) return true;
    return false;
}

bool observable_type4(const NetworkDef& net, std::optional<std::size_t> word_bound) {
    // Separation is never undone, so if every word of length B separates, so
    // does every longer word; B = 2^(2m) exceeds the number of same-output
    // pairs, the longest a pair can stay together without repeating.
    const std::size_t bound = bound_or_default(net, word_bound);
    auto all_done = [](const std::set<Config>& layer) {
        for (const Config& c : layer)
            if (!c.all_done()) return false;
        return true;
    };
    // Layers of configurations reached by words of exactly d inputs. Once a
    // layer repeats, the sequence is periodic and layer `bound` is known.
    std::vector<std::set<Config>> layers{{start_config(net)}};
    while (layers.size() <= bound) {
        if (all_done(layers.back())) return true;
        std::set<Config> next;
        for (const Config& c : layers.back())
            for (Index i = 0; i < net.num_inputs(); ++i) next.insert(advance(net, c, InputIdx{i}));
        for (std::size_t j = 0; j < layers.size(); ++j)
            if (layers[j] == next) {
                const std::size_t d = layers.size(), period = d - j;
                return all_done(layers[j + (bound - j) % period]);
            }
        layers.push_back(std::move(next));
    }
    return all_done(layers[bound]);
}

std::vector<std::vector<std::optional<std::size_t>>> word_distances(const NetworkDef& net) {
    require_word_bound(net);
    const Index N = net.num_states();
    const std::size_t max_len = N;
    std::vector<std::vector<std::optional<std::size_t>>> dist(N, std::vector<std::optional<std::size_t>>(N));
    std::vector<Index> word;
    for (Index s = 0; s < N; ++s) {
        // Depth-first over every word, carrying the state along the prefix.
        auto walk = [&](auto&& self, Index at, std::size_t len) -> void {
            if (len > 0 && (!dist[s][at] || *dist[s][at] > len)) dist[s][at] = len;
            if (len == max_len) return;
            for (Index i = 0; i < net.num_inputs(); ++i) self(self, net.step(InputIdx{i}, StateIdx{at}).value, len + 1);
        };
        walk(walk, s, 0);
    }
    return dist;
}

bool controllable(const NetworkDef& net) {
    const auto dist = word_distances(net);
    for (std::size_t s = 0; s < dist.size(); ++s)
        for (std::size_t t = 0; t < dist.size(); ++t)
            if (s != t && !dist[s][t]) return false;
    return true;
}

NetworkDef random_network(unsigned ell, unsigned m, unsigned n, std::uint64_t seed) {
    check_dimensions(ell, m, n);
    std::mt19937_64 rng(seed);
    const Index states = Index{1} << m;
    std::uniform_int_distribution<Index> state(0, states - 1);
    std::uniform_int_distribution<Index> output(0, (Index{1} << n) - 1);
    std::vector<Index> sigma(std::size_t{states} << ell);
    for (auto& x : sigma) x = state(rng);
    std::vector<Index> rho(states);
    for (auto& x : rho) x = output(rng);
    return NetworkDef(ell, m, n, std::move(sigma), std::move(rho), "random-" + std::to_string(seed));
}

NetworkDef random_online_observable(unsigned ell, unsigned m, unsigned n, std::uint64_t seed, bool want_controllable) {
    std::mt19937_64 seeds(seed);
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        NetworkDef net = random_network(ell, m, n, seeds());
        if (want_controllable && !is_controllable(net)) continue;
        if (!is_online_observable(net).observable) continue;
        net.set_name("random-" + std::to_string(seed) + "-" + std::to_string(attempt));
        return net;
    }
    throw UsageError("no suitable random network found for these dimensions");
}

NetworkDef permute_states(const NetworkDef& net, const std::vector<StateIdx>& perm) {
    const Index N = net.num_states();
    if (perm.size() != N) throw UsageError("permutation has the wrong size");
    std::vector<Index> sigma(net.sigma_table().size());
    std::vector<Index> rho(N);
    for (Index s = 0; s < N; ++s) {
        rho[perm[s].value] = net.observe(StateIdx{s}).value;
        for (Index i = 0; i < net.num_inputs(); ++i)
            sigma[std::size_t{i} * N + perm[s].value] = perm[net.step(InputIdx{i}, StateIdx{s}).value].value;
    }
    return NetworkDef(net.input_nodes(), net.state_nodes(), net.output_nodes(), std::move(sigma), std::move(rho),
                      net.name());
}

CheckReport cross_check(std::size_t seeds, unsigned ell, unsigned m, unsigned n, std::uint64_t first_seed) {
    CheckReport report;
    auto expect = [&](bool same, std::uint64_t seed, const std::string& what) {
        ++report.comparisons;
        if (!same) report.mismatches.push_back("seed " + std::to_string(seed) + ": " + what);
    };
    for (std::uint64_t seed = first_seed; seed < first_seed + seeds; ++seed) {
        const NetworkDef net = random_network(ell, m, n, seed);
        ++report.nets;
        expect(is_observable_type1(net) == observable_type1(net), seed, "type I");
        expect(is_observable_type2(net) == observable_type2(net), seed, "type II");
        expect(is_observable_type3(net) == observable_type3(net), seed, "type III");
        expect(is_observable_type4(net) == observable_type4(net), seed, "type IV");
        expect(is_controllable(net) == controllable(net), seed, "controllability");
        const auto dist = word_distances(net);
        const ReachMatrix reach = reach_matrix(net);
        bool reach_same = true;
        for (Index s = 0; s < net.num_states(); ++s)
            for (Index t = 0; t < net.num_states(); ++t)
                reach_same = reach_same && reach.reachable(StateIdx{s}, StateIdx{t}) == dist[s][t].has_value();
        expect(reach_same, seed, "reach matrix");

        const GammaTable full = gamma_table(net, GammaMode::full);
        const GammaTable reachable = gamma_table(net, GammaMode::reachable);
        expect(online_verdict(net, full).observable == online(net), seed, "online (full)");
        expect(online_verdict(net, reachable).observable == online(net), seed, "online (reachable)");
        for (const StateSet& S : full.domain()) {
            const Gamma g = gamma(net, S);
            if (full.at(S) != g) expect(false, seed, "gamma " + S.to_string() + " (full)");
            if (const Gamma* r = reachable.find(S); r && *r != g)
                expect(false, seed, "gamma " + S.to_string() + " (reachable)");
        }
        ++report.comparisons;
    }
    return report;
}

}  // namespace bcn::oracle
