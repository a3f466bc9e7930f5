#pragma once

// Internal: cached Gauss-Legendre rules on [-1, 1]. Not installed.

#include <vector>

namespace supercal {

struct GaussRule {
    std::vector<double> nodes, weights;
};

const GaussRule& gauss_legendre(int count);

} // namespace supercal
