#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cfm/quadrature.hpp"

namespace cfm {

// Hierarchic (integrated-Legendre) shape functions on the reference triangle
// {(xi,eta): xi,eta >= 0, xi+eta <= 1} with barycentrics
// (1-xi-eta, xi, eta). Per degree p the space has (p+1)(p+2)/2 modes:
// 3 vertex modes, p-1 modes per edge (degrees 2..p, vanishing at vertices),
// and (p-1)(p-2)/2 interior bubbles (degrees 3..p, vanishing on the
// boundary). Spaces are nested across p.
class HierarchicBasis {
public:
    static constexpr int kMaxDegree = 12;

    enum class ModeKind { Vertex, Edge, Bubble };

    struct Mode {
        ModeKind kind;
        int entity;  // local vertex 0..2 or local edge 0..2; -1 for bubbles
        int degree;  // polynomial degree of the mode
        int index;   // edge modes: degree-2; bubbles: running bubble ordinal
    };

    explicit HierarchicBasis(int p);

    int degree() const { return p_; }
    int dim() const { return (p_ + 1) * (p_ + 2) / 2; }
    const std::vector<Mode>& modes() const { return modes_; }

    // Values and reference gradients of all modes at one point.
    void eval(double xi, double eta, double* values) const;
    void eval_grad(double xi, double eta, Vec2* grads) const;

    // Tabulated values/gradients at the points of a quadrature rule,
    // laid out (num points) x dim.
    struct Table {
        Eigen::MatrixXd value;
        Eigen::MatrixXd dxi;
        Eigen::MatrixXd deta;
    };
    Table tabulate(const TriangleRule& rule) const;

    // Local edges as (vertex, vertex) pairs in local orientation.
    static constexpr int kEdgeVertices[3][2] = {{0, 1}, {1, 2}, {2, 0}};

    // Sign carried by edge mode of degree k when the element's local edge
    // direction opposes the global (ascending node id) direction.
    static double orientation_sign(bool flipped, int k) {
        return (flipped && (k % 2 == 1)) ? -1.0 : 1.0;
    }

private:
    int p_;
    std::vector<Mode> modes_;
};

}  // namespace cfm
