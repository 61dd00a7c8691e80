#pragma once

#include <vector>

#include "cfm/common.hpp"

namespace cfm {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> points;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Quadrature on the reference triangle {(x,y): x,y >= 0, x+y <= 1}, built by
// collapsing a tensor Gauss grid. Exact for polynomials up to `order`.
struct TriangleRule {
    std::vector<Vec2> points;
    std::vector<double> weights;  // sum to 1/2, the reference area
    int order = 0;
};

const TriangleRule& triangle_rule(int order);

}  // namespace cfm
