#include "bcn/fixture.hpp"

namespace bcn {

NetworkDef reference_network() {
    return NetworkDef(1, 3, 2,
                      {5, 0, 0, 7, 3, 2, 1, 4,  //
                       1, 4, 5, 3, 2, 6, 7, 7},
                      {0, 1, 1, 1, 2, 2, 3, 3}, "reference");
}

}  // namespace bcn
