#pragma once

#include <numeric>

#include "bcn/network.hpp"
#include "bcn/state_set.hpp"

namespace testnets {

using namespace bcn;

// Every state maps to state 0 and shows output 0.
inline NetworkDef constant_net(unsigned ell, unsigned m, unsigned n) {
    const Index I = Index{1} << ell, S = Index{1} << m;
    return NetworkDef(ell, m, n, std::vector<Index>(I * S, 0), std::vector<Index>(S, 0), "constant");
}

// sigma(i, s) = s, and rho is the given table.
inline NetworkDef identity_net(unsigned ell, unsigned m, unsigned n, std::vector<Index> rho) {
    const Index I = Index{1} << ell, S = Index{1} << m;
    std::vector<Index> sigma;
    for (Index i = 0; i < I; ++i)
        for (Index s = 0; s < S; ++s) sigma.push_back(s);
    return NetworkDef(ell, m, n, std::move(sigma), std::move(rho), "identity");
}

// rho is the identity (n = m); input 0 cycles the states, other inputs fix them.
inline NetworkDef injective_cycle(unsigned ell, unsigned m) {
    const Index I = Index{1} << ell, S = Index{1} << m;
    std::vector<Index> sigma, rho(S);
    for (Index i = 0; i < I; ++i)
        for (Index s = 0; s < S; ++s) sigma.push_back(i == 0 ? (s + 1) % S : s);
    std::iota(rho.begin(), rho.end(), Index{0});
    return NetworkDef(ell, m, m, std::move(sigma), std::move(rho), "cycle");
}

inline StateSet set_of(const NetworkDef& net, std::initializer_list<Index> xs) {
    return StateSet(net.num_states(), xs);
}

}  // namespace testnets
