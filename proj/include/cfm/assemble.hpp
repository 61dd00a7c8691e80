#pragma once

#include <memory>

#include "cfm/basis.hpp"
#include "cfm/mesh.hpp"
#include "cfm/sparse.hpp"

namespace cfm {

struct BasisSpec {
    int p = 1;
};

enum class GammaRole { Dirichlet0, Dirichlet1, Neumann };

// Boundary-condition roles of the four quadrilateral arcs plus the hole
// treatment. The primary problem fixes u on gamma_1/gamma_3 and leaves holes
// free; the conjugate problem fixes v on gamma_2/gamma_4 and pins each hole
// boundary to a constant.
struct RoleAssignment {
    std::array<GammaRole, 4> gamma{};
    bool holes_fixed = false;

    static RoleAssignment primary() {
        return {{GammaRole::Dirichlet0, GammaRole::Neumann, GammaRole::Dirichlet1,
                 GammaRole::Neumann},
                false};
    }
    static RoleAssignment conjugate() {
        return {{GammaRole::Neumann, GammaRole::Dirichlet0, GammaRole::Neumann,
                 GammaRole::Dirichlet1},
                true};
    }
};

// Global dof numbering by entity: vertices, then p-1 modes per mesh edge,
// then bubbles per element.
struct DofMap {
    int p = 1;
    int n_nodes = 0;
    int bubble_per_element = 0;
    int count = 0;
    EdgeTable edges;

    int vertex_dof(int v) const { return v; }
    int edge_dof(int e, int k) const {
        return n_nodes + e * (p - 1) + (k - 2);
    }
    int bubble_dof(int t, int ordinal) const {
        return n_nodes + static_cast<int>(edges.edges.size()) * (p - 1) +
               t * bubble_per_element + ordinal;
    }
};

DofMap build_dof_map(const Mesh& mesh, int p);

// Index sets of the block structure B, N1, N0, D1, D0, E_1..E_n for a given
// role assignment, expressed in matrix ids. Corner dofs shared by a Dirichlet
// and a Neumann arc land in the Dirichlet block. Only vertex dofs carry
// nonzero Dirichlet constants; hierarchic edge modes on Dirichlet boundaries
// are constrained to zero.
struct DofPartition {
    std::vector<int> B, N1, N0, D1, D0;
    std::vector<int> D1_vertex;
    std::vector<std::vector<int>> E;
    std::vector<std::vector<int>> E_vertex;
    bool holes_fixed = false;
    int dof_count = 0;

    std::vector<int> free_ids() const;
    std::vector<int> fixed_ids() const;
};

struct AssembleOptions {
    bool parallel = true;
    int extra_quad_order = 0;   // added to the 2p+4 baseline
    int quad_order_override = -1;
};

// Affine element map with optional transfinite arc blending on boundary
// edges; exact on every edge it blends.
struct ElementGeometry {
    Vec2 v[3];
    Eigen::Matrix2d J_affine;
    bool curved = false;

    struct CurvedEdge {
        int local_edge;  // 0,1,2: edge (local_edge+1, local_edge+2)
        ArcGeom arc;     // parameterized from the edge's first local vertex
    };
    std::vector<CurvedEdge> curved_edges;

    void eval(const Vec2& ref, Vec2* z, Eigen::Matrix2d* J) const;
};

// Per-run assembly state: quadrature rules, tabulated bases, element
// geometries. Shared by stiffness assembly, error estimation and evaluation.
class AssemblyKernel {
public:
    AssemblyKernel(std::shared_ptr<const Mesh> mesh,
                   std::shared_ptr<const SurfaceChart> chart, int p,
                   const AssembleOptions& opts);

    const Mesh& mesh() const { return *mesh_; }
    const SurfaceChart& chart() const { return *chart_; }
    const HierarchicBasis& basis() const { return basis_; }
    const DofMap& dofmap() const { return dofs_; }
    const ElementGeometry& geometry(int t) const { return geom_[static_cast<size_t>(t)]; }
    int quad_order() const { return order_straight_; }
    int dim() const { return basis_.dim(); }

    // Local stiffness matrix in local mode order (orientation-independent).
    void element_matrix(int t, Eigen::MatrixXd& Ke) const;
    // Entity dof ids and orientation signs aligned with the local mode order.
    void element_entity_dofs(int t, std::vector<int>* dofs, std::vector<double>* signs) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    std::shared_ptr<const SurfaceChart> chart_;
    HierarchicBasis basis_;
    DofMap dofs_;
    std::vector<ElementGeometry> geom_;
    std::vector<std::array<int, 3>> edge_flipped_;  // local edge direction vs ascending ids
    int order_straight_ = 0;
    int order_curved_ = 0;
    HierarchicBasis::Table table_straight_;
    HierarchicBasis::Table table_curved_;
};

// Stiffness system with dofs permuted into the partition block order of the
// primary roles.
struct AssembledSystem {
    std::shared_ptr<const Mesh> mesh;
    std::shared_ptr<const SurfaceChart> chart;
    std::shared_ptr<const AssemblyKernel> kernel;
    BasisSpec basis;
    SparseSym A;
    DofPartition partition;              // primary-role blocks (contiguous)
    std::vector<int> entity_to_matrix;   // entity dof id -> matrix id
    std::vector<std::vector<int>> element_dofs;    // matrix ids, local mode order
    std::vector<std::vector<double>> element_signs;
    Timings timings;
    int quadrature_order = 0;

    DofPartition partition_for(const RoleAssignment& roles) const;
    int dof_count() const { return A.dim(); }
};

// OpenMP-parallel assembly with deterministic in-order accumulation; results
// are bit-identical to assemble_serial for any worker count.
AssembledSystem assemble(std::shared_ptr<const Mesh> mesh,
                         std::shared_ptr<const SurfaceChart> chart,
                         const BasisSpec& basis, const AssembleOptions& opts = {});
// Single-threaded reference path.
AssembledSystem assemble_serial(std::shared_ptr<const Mesh> mesh,
                                std::shared_ptr<const SurfaceChart> chart,
                                const BasisSpec& basis, AssembleOptions opts = {});

DofPartition build_partition(const Mesh& mesh, const DofMap& dofs,
                             const RoleAssignment& roles,
                             const std::vector<int>* entity_to_matrix);

}  // namespace cfm
