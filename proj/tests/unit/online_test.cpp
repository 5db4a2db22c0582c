#include <doctest.h>

#include <json.hpp>

#include "bcn/fixture.hpp"
#include "bcn/offline.hpp"
#include "bcn/online.hpp"
#include "bcn/oracle.hpp"
#include "nets.hpp"

using namespace bcn;
using testnets::constant_net;
using testnets::injective_cycle;
using testnets::set_of;

namespace {

std::vector<Index> raw(const std::vector<InputIdx>& xs) {
    std::vector<Index> r;
    for (auto x : xs) r.push_back(x.value);
    return r;
}

}  // namespace

TEST_CASE("zeta") {
    const NetworkDef net = reference_network();
    const StateSet all = StateSet::full(8);
    CHECK(zeta(net, all, std::nullopt, OutputIdx{1}) == set_of(net, {1, 2, 3}));
    CHECK(zeta(net, set_of(net, {4, 5}), InputIdx{1}, OutputIdx{3}) == set_of(net, {6}));
    CHECK(zeta(net, set_of(net, {4, 5}), InputIdx{1}, std::nullopt) == set_of(net, {2, 6}));
    CHECK(zeta(net, set_of(net, {1, 2, 3}), InputIdx{1}, OutputIdx{2}) == set_of(net, {4, 5}));
    for (Index mask = 1; mask < 256; mask += 7) {
        StateSet S(8);
        for (Index s = 0; s < 8; ++s)
            if (mask >> s & 1) S.insert(StateIdx{s});
        CHECK(zeta(net, S, std::nullopt, std::nullopt) == S);
    }
    CHECK_THROWS_AS(zeta(net, StateSet(8), InputIdx{0}, std::nullopt), UsageError);
}

TEST_CASE("g sets") {
    const NetworkDef net = reference_network();
    CHECK(g_sets(net, inputs({1, 1}), outputs({1, 2, 3})) == set_of(net, {6}));
    CHECK(g_sets(net, {}, outputs({2})) == set_of(net, {4, 5}));
    CHECK(g_sets(net, inputs({0}), outputs({0, 0})).empty());
    CHECK_THROWS_AS(g_sets(net, inputs({0}), outputs({0})), UsageError);
}

TEST_CASE("initial classes partition the states") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const NetworkDef net = oracle::random_network(1, 1 + seed % 5, 1 + seed % 3, seed);
        StateSet seen(net.num_states());
        std::size_t total = 0;
        for (const auto& [o, S] : initial_classes(net)) {
            CHECK(!S.intersects(seen));
            seen |= S;
            total += S.size();
            S.for_each([&](StateIdx s) { CHECK(observe(net, s) == o); });
        }
        CHECK(total == net.num_states());
    }
}

TEST_CASE("split identity") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const NetworkDef net = oracle::random_network(2, 3, 1 + seed % 2, seed);
        for (Index mask = 1; mask < 256; mask += 11) {
            StateSet S(8);
            for (Index s = 0; s < 8; ++s)
                if (mask >> s & 1) S.insert(StateIdx{s});
            for (Index i = 0; i < 4; ++i) {
                const StateSet image = zeta(net, S, InputIdx{i}, std::nullopt);
                CHECK(image.size() <= S.size());
                StateSet joined(8);
                std::size_t sizes = 0;
                for (Index o = 0; o < net.num_outputs(); ++o) {
                    const StateSet part = zeta(net, S, InputIdx{i}, OutputIdx{o});
                    part.for_each([&](StateIdx s) { CHECK(observe(net, s) == OutputIdx{o}); });
                    joined |= part;
                    sizes += part.size();
                }
                CHECK(joined == image);
                CHECK(sizes == image.size());
            }
        }
    }
}

TEST_CASE("fixture gamma") {
    const NetworkDef net = reference_network();
    for (GammaMode mode : {GammaMode::full, GammaMode::reachable}) {
        const GammaTable t = gamma_table(net, mode);
        CHECK(t.at(set_of(net, {4, 5})) == Gamma(1));
        CHECK(t.at(set_of(net, {1, 2, 3})) == Gamma(2));
        CHECK(t.at(set_of(net, {6, 7})) == Gamma(1));
        CHECK(t.at(set_of(net, {0})) == Gamma(0));
        CHECK(t.at(set_of(net, {2, 3})) == Gamma(1));
        CHECK(t.iterations() <= t.domain().size());
    }
    const GammaTable full = gamma_table(net, GammaMode::full);
    CHECK(full.at(set_of(net, {1, 2})) == Gamma(2));
    CHECK(full.domain().size() == 14);
    CHECK_THROWS_AS(full.at(set_of(net, {0, 1})), UsageError);
}

TEST_CASE("fixture psi") {
    const NetworkDef net = reference_network();
    const GammaTable t = gamma_table(net, GammaMode::full);
    CHECK(raw(psi(net, set_of(net, {1, 2, 3}), t)) == std::vector<Index>{1});
    CHECK(raw(psi(net, set_of(net, {6, 7}), t)) == std::vector<Index>{0});
    CHECK(raw(psi(net, set_of(net, {4, 5}), t)) == std::vector<Index>{0, 1});
    CHECK(raw(psi(net, set_of(net, {3}), t)) == std::vector<Index>{0, 1});
    CHECK_THROWS_AS(psi(net, set_of(net, {0, 7}), t), UsageError);
}

TEST_CASE("online verdicts") {
    const OnlineVerdict v = is_online_observable(reference_network());
    CHECK(v.observable);
    REQUIRE(v.class_gamma.size() == 4);
    CHECK(v.class_gamma[0].second == Gamma(0));
    CHECK(v.class_gamma[1].second == Gamma(2));
    CHECK(v.class_gamma[2].second == Gamma(1));
    CHECK(v.class_gamma[3].second == Gamma(1));

    const NetworkDef flat = constant_net(1, 3, 1);
    for (GammaMode mode : {GammaMode::full, GammaMode::reachable}) {
        const OnlineVerdict w = is_online_observable(flat, mode);
        CHECK(!w.observable);
        REQUIRE(w.witness_output.has_value());
        CHECK(*w.witness_output == OutputIdx{0});
        CHECK(*w.witness_class == StateSet::full(8));
    }
}

TEST_CASE("gamma tables agree with the recursive oracle") {
    for (unsigned m = 1; m <= 4; ++m) {
        for (std::uint64_t seed = 0; seed < (m == 4 ? 10u : 40u); ++seed) {
            const NetworkDef net = oracle::random_network(1 + seed % 2, m, 1 + seed % 2, seed * 13 + m);
            const GammaTable full = gamma_table(net, GammaMode::full);
            const GammaTable reach = gamma_table(net, GammaMode::reachable);
            for (const StateSet& S : full.domain()) {
                const Gamma g = oracle::gamma(net, S);
                CHECK(full.at(S) == g);
                if (const Gamma* r = reach.find(S)) CHECK(*r == g);
            }
            for (const StateSet& S : reach.domain()) CHECK(full.contains(S));
            CHECK(full.iterations() <= full.domain().size());
            CHECK(reach.iterations() <= reach.domain().size());
            CHECK(is_online_observable(net).observable == oracle::online(net));
        }
    }
}

TEST_CASE("gamma base and subset properties on the full domain") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const NetworkDef net = oracle::random_network(1 + seed % 2, 3, 1, seed + 500);
        const GammaTable t = gamma_table(net, GammaMode::full);
        for (const StateSet& S : t.domain()) CHECK((t.at(S) == Gamma(0)) == (S.size() == 1));
        for (const StateSet& small : t.domain()) {
            for (const StateSet& big : t.domain()) {
                if (!small.is_subset_of(big) || !t.at(big).finite()) continue;
                CHECK(t.at(small).finite());
                CHECK(t.at(small) <= t.at(big));
                const auto pb = psi(net, big, t), ps = psi(net, small, t);
                for (InputIdx i : pb) CHECK(std::find(ps.begin(), ps.end(), i) != ps.end());
            }
        }
    }
}

TEST_CASE("online observability sits between type III and type I") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const NetworkDef net = oracle::random_network(1 + seed % 2, 1 + seed % 4, 1 + seed % 3, seed);
        const bool online = is_online_observable(net).observable;
        if (online) CHECK(is_observable_type1(net));
        if (is_observable_type3(net)) CHECK(online);
    }
}

TEST_CASE("fixture input-labelled graph") {
    const NetworkDef net = reference_network();
    for (bool faithful : {false, true}) {
        const GraphResult r = build_input_labelled_graph(net, faithful);
        const auto* g = std::get_if<InputLabelledGraph>(&r);
        REQUIRE(g);
        for (auto S : {set_of(net, {0}), set_of(net, {1, 2, 3}), set_of(net, {4, 5}), set_of(net, {6, 7})})
            CHECK(g->index_of(S).has_value());
        const auto from = g->index_of(set_of(net, {4, 5}));
        const auto to = g->index_of(set_of(net, {2}));
        REQUIRE((from && to));
        const GraphEdge* e = g->edge(*from, *to);
        REQUIRE(e);
        CHECK(raw(e->inputs) == std::vector<Index>{1});

        const GammaTable t = gamma_table(net, GammaMode::full);
        for (std::size_t v = 0; v < g->vertices.size(); ++v) CHECK(g->gamma[v].finite());
        for (const auto& edge : g->edges) {
            const auto ps = psi(net, g->vertices[edge.from], t);
            for (InputIdx i : edge.inputs) CHECK(std::find(ps.begin(), ps.end(), i) != ps.end());
        }
    }
    const auto faithful = std::get<InputLabelledGraph>(build_input_labelled_graph(net, true));
    CHECK(faithful.vertices.size() == 14);
}

TEST_CASE("graph modes agree where both are defined") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const NetworkDef net = oracle::random_network(1 + seed % 2, 1 + seed % 4, 1 + seed % 2, seed);
        const GraphResult a = build_input_labelled_graph(net, true);
        const GraphResult b = build_input_labelled_graph(net, false);
        REQUIRE(a.index() == b.index());
        if (a.index() == 1) {
            const GammaTable t = gamma_table(net, GammaMode::full);
            for (const auto* f : {&std::get<GraphFailure>(a), &std::get<GraphFailure>(b)}) {
                CHECK(!t.at(f->witness_class).finite());
                CHECK(f->vertex.is_subset_of(f->witness_class));
            }
            continue;
        }
        const auto& full = std::get<InputLabelledGraph>(a);
        const auto& reach = std::get<InputLabelledGraph>(b);
        for (std::size_t v = 0; v < reach.vertices.size(); ++v) {
            const auto w = full.index_of(reach.vertices[v]);
            REQUIRE(w.has_value());
            CHECK(full.gamma[*w] == reach.gamma[v]);
        }
        for (const auto& e : reach.edges) {
            const auto f = full.index_of(reach.vertices[e.from]);
            const auto t = full.index_of(reach.vertices[e.to]);
            const GraphEdge* fe = full.edge(*f, *t);
            REQUIRE(fe);
            CHECK(raw(fe->inputs) == raw(e.inputs));
        }
    }
}

TEST_CASE("graph of an injective network") {
    const NetworkDef net = injective_cycle(1, 2);
    const auto g = std::get<InputLabelledGraph>(build_input_labelled_graph(net, true));
    CHECK(g.vertices.size() == 4);
    for (const auto& S : g.vertices) CHECK(S.size() == 1);
    for (const auto& e : g.edges) CHECK(raw(e.inputs).size() == 1);
    std::size_t labels = 0;
    for (const auto& e : g.edges) labels += e.inputs.size();
    CHECK(labels == 8);
}

TEST_CASE("graph failure for a constant network") {
    const NetworkDef net = constant_net(1, 2, 1);
    for (bool faithful : {false, true}) {
        const GraphResult r = build_input_labelled_graph(net, faithful);
        const auto* f = std::get_if<GraphFailure>(&r);
        REQUIRE(f);
        CHECK(f->witness_class == StateSet::full(4));
    }
}

TEST_CASE("graph export") {
    const NetworkDef net = reference_network();
    const auto g = std::get<InputLabelledGraph>(build_input_labelled_graph(net, true));
    const std::string dot = export_graph(g, GraphFormat::dot);
    CHECK(dot == export_graph(std::get<InputLabelledGraph>(build_input_labelled_graph(net, true)), GraphFormat::dot));
    std::size_t nodes = 0;
    for (std::size_t at = dot.find("[label=\"{"); at != std::string::npos; at = dot.find("[label=\"{", at + 1)) ++nodes;
    CHECK(nodes == g.vertices.size());

    const auto j = nlohmann::json::parse(export_graph(g, GraphFormat::json));
    CHECK(j["vertices"].size() == g.vertices.size());
    CHECK(j["edges"].size() == g.edges.size());
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        CHECK(j["edges"][k]["from"] == g.edges[k].from);
        CHECK(j["edges"][k]["to"] == g.edges[k].to);
    }

    // Singletons only, no edges: a net whose single input merges everything.
    const NetworkDef sink(1, 1, 1, {0, 0, 0, 0}, {0, 1});
    const auto lone = std::get<InputLabelledGraph>(build_input_labelled_graph(sink, true));
    const std::string text = export_graph(lone, GraphFormat::dot);
    CHECK(text.find("->") != std::string::npos);
    InputLabelledGraph bare;
    bare.vertices = {StateSet(2, {0}), StateSet(2, {1})};
    bare.gamma = {Gamma(0), Gamma(0)};
    const std::string empty = export_graph(bare, GraphFormat::dot);
    CHECK(empty.find("->") == std::string::npos);
    CHECK(empty.find("v1") != std::string::npos);
}
