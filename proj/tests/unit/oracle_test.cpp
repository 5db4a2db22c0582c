#include <doctest.h>

#include "bcn/fixture.hpp"
#include "bcn/online.hpp"
#include "bcn/oracle.hpp"
#include "nets.hpp"

using namespace bcn;
using testnets::set_of;

TEST_CASE("oracle gamma on the fixture") {
    const NetworkDef net = reference_network();
    CHECK(oracle::gamma(net, set_of(net, {4, 5})) == Gamma(1));
    CHECK(oracle::gamma(net, set_of(net, {7})) == Gamma(0));
    CHECK(oracle::gamma(net, set_of(net, {1, 2, 3})) == Gamma(2));
    CHECK(oracle::gamma(net, set_of(net, {1, 2})) == Gamma(2));
    CHECK_THROWS(oracle::gamma(net, set_of(net, {0, 1})));
    CHECK_THROWS(oracle::gamma(net, StateSet(8)));
    CHECK_THROWS(oracle::gamma(oracle::random_network(1, 5, 1, 0), StateSet(32, {0})));
}

TEST_CASE("oracle verdicts on the fixture") {
    const NetworkDef net = reference_network();
    CHECK(oracle::online(net));
    CHECK(oracle::controllable(net));
    CHECK(oracle::observable_type1(net));
    CHECK(oracle::observable_type2(net));
    CHECK(!oracle::observable_type3(net));
    CHECK(!oracle::observable_type4(net));
    CHECK(oracle::default_word_bound(net) == 64);
}

TEST_CASE("oracle verdicts on simple networks") {
    const NetworkDef inj = testnets::injective_cycle(1, 2);
    CHECK(oracle::observable_type1(inj));
    CHECK(oracle::observable_type2(inj));
    CHECK(oracle::observable_type3(inj));
    CHECK(oracle::observable_type4(inj));

    const NetworkDef flat = testnets::constant_net(1, 2, 1);
    CHECK(!oracle::online(flat));
    CHECK(!oracle::controllable(flat));
    CHECK(!oracle::observable_type2(flat));
    CHECK_THROWS(oracle::observable_type1(oracle::random_network(3, 2, 1, 0)));
    CHECK_THROWS(oracle::observable_type2(oracle::random_network(1, 4, 1, 0)));
}

TEST_CASE("random networks") {
    CHECK(oracle::random_network(2, 3, 2, 9) == oracle::random_network(2, 3, 2, 9));
    CHECK(!(oracle::random_network(2, 3, 2, 9) == oracle::random_network(2, 3, 2, 10)));
    const NetworkDef net = oracle::random_network(2, 3, 2, 1);
    CHECK(net.sigma_table().size() == 32);
    CHECK(net.rho_table().size() == 8);

    const NetworkDef pick = oracle::random_online_observable(1, 3, 1, 4, true);
    CHECK(is_online_observable(pick).observable);
    CHECK(oracle::controllable(pick));
}

TEST_CASE("online observable fraction") {
    // Frozen regression number for l=1, m=2, n drawn 1..2 by seed parity.
    std::size_t hits = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        hits += is_online_observable(oracle::random_network(1, 2, 1 + seed % 2, seed)).observable;
    CHECK(hits == std::size_t{645});
}

TEST_CASE("state permutation") {
    const NetworkDef net = reference_network();
    const auto perm = states({7, 6, 5, 4, 3, 2, 1, 0});
    const NetworkDef p = oracle::permute_states(net, perm);
    for (Index s = 0; s < 8; ++s) {
        CHECK(p.observe(perm[s]) == net.observe(StateIdx{s}));
        for (Index i = 0; i < 2; ++i)
            CHECK(p.step(InputIdx{i}, perm[s]) == perm[net.step(InputIdx{i}, StateIdx{s}).value]);
    }
}

TEST_CASE("cross check is reproducible") {
    const auto a = oracle::cross_check(10, 1, 2, 1, 5);
    const auto b = oracle::cross_check(10, 1, 2, 1, 5);
    CHECK(a.ok());
    CHECK(a.nets == 10);
    CHECK(a.comparisons == b.comparisons);
}
