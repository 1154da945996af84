#pragma once

#include "meandim/meandim.hpp"

namespace testing_support {

// a=0, b=3, s=1 with p=5, q=3: r = 5/6.
inline meandim::ConstructionParams worked_instance() {
    return meandim::make_params(0, 3, 1, 5, 3, 0.5, 0.2);
}

// q=1, p=2, s=1/2: r = 1/2.
inline meandim::ConstructionParams half_instance() {
    return meandim::make_params(0, 3, 0.5, 2, 1, 1.2, 0.5);
}

} // namespace testing_support
