#pragma once

#include "bcn/network.hpp"

namespace bcn {

// Reference network with one input node, three state nodes and two output
// nodes. It is online observable and controllable but has no single input
// word separating all initial states: i0 merges s1 and s2, i1 merges s6 and s7.
//
//   rho:        s0 -> o0; s1,s2,s3 -> o1; s4,s5 -> o2; s6,s7 -> o3
//   sigma(i0):  5 0 0 7 3 2 1 4
//   sigma(i1):  1 4 5 3 2 6 7 7
NetworkDef reference_network();

}  // namespace bcn
