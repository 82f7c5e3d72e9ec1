#pragma once

#include "pdwg/mesh.hpp"

#include <Eigen/Cholesky>

namespace pdwg {

// Dual space W_{j,h}^{0,Gamma+}: per-triangle P_j block plus one shared P_j(e)
// block per edge, with outflow-boundary edge blocks eliminated. Build after
// classify_boundary so the elimination matches the tags.
struct WeakSpace {
    const Mesh* mesh = nullptr;
    int j = 0;
    int nb_tri = 0;   // dim P_j
    int nb_edge = 0;  // j+1
    std::vector<int> edge_offset;  // -1 on eliminated (outflow) edges
    int n_tri_dofs = 0;
    int total_dofs = 0;

    int tri_offset(int t) const { return t * nb_tri; }
};

WeakSpace make_weak_space(const Mesh& m, int j);

// Primal space M_{k-1,h}: discontinuous piecewise P_{k-1}.
struct PrimalSpace {
    const Mesh* mesh = nullptr;
    int k = 1;
    int nb = 0;  // dim P_{k-1}
    int total_dofs = 0;

    int tri_offset(int t) const { return t * nb; }
};

PrimalSpace make_primal_space(const Mesh& m, int k);

struct WeakField {
    const WeakSpace* space = nullptr;
    Eigen::VectorXd coeffs;  // length space->total_dofs
};

struct PrimalField {
    const PrimalSpace* space = nullptr;
    Eigen::VectorXd coeffs;  // length space->total_dofs
};

// Quadrature-resolved tables for one triangle side (points in the side's
// traversal order; edge basis values already in the canonical parameter).
struct SideTables {
    Eigen::VectorXd w;         // physical weights, sum = edge length
    std::vector<Vec2> pts;
    Eigen::MatrixXd dual_tr;   // nq x nb_tri
    Eigen::MatrixXd prim_tr;   // nq x nb_prim
    Eigen::MatrixXd edge_val;  // nq x nb_edge
};

struct ElementTables {
    TriGeom geom;
    TriBasis dual_basis, prim_basis;
    Eigen::VectorXd w;  // physical weights, sum = area
    std::vector<Vec2> pts;
    BasisTable dual;           // nq x nb_tri
    Eigen::MatrixXd dual_lap;  // nq x nb_tri
    BasisTable prim;           // nq x nb_prim
    Eigen::LLT<Eigen::MatrixXd> prim_gram;
    Eigen::LLT<Eigen::MatrixXd> dual_gram;
    Eigen::MatrixXd wgrad;  // (2*nb_prim) x nloc
    std::array<SideTables, 3> side;
};

// Per-edge tables in the canonical parameterization, shared by both adjacent
// elements (jump integrals, edge projections, flux audits).
struct EdgeTables {
    Eigen::VectorXd w;  // physical weights, sum = length
    std::vector<Vec2> pts;
    Eigen::MatrixXd edge_val;  // nq x nb_edge
    Eigen::LLT<Eigen::MatrixXd> gram;
    Eigen::MatrixXd dual_tr0, dual_tr1;  // adjacent interior traces (tr1 empty on boundary)
    Eigen::MatrixXd prim_tr0, prim_tr1;
    Vec2 n0;      // outward normal of t0
    double he = 0.0;  // mean of adjacent h_T (one-sided on the boundary)
};

struct ElementCache {
    const Mesh* mesh = nullptr;
    int k = 1, j = 0;
    WeakSpace wspace;
    PrimalSpace pspace;
    int nb_tri = 0, nb_edge = 0, nb_prim = 0, nloc = 0;
    QuadRuleTri tri_rule;
    QuadRule1D edge_rule;
    std::vector<ElementTables> elems;
    std::vector<EdgeTables> edge_tables;

    // local dof index of side s, mode l within an element block
    int side_dof(int s, int l) const { return nb_tri + s * nb_edge + l; }
};

ElementCache build_cache(const Mesh& m, int k, int j);

// Local weak-function coefficients of element t (interior block then the three
// side blocks), with zeros on eliminated edges.
Eigen::VectorXd gather_local(const ElementCache& cache, const WeakField& f, int t);

// Discrete weak gradient of a local weak function: coefficients in [P_r(T)]^2,
// x-component block then y-component block. Requires r = k-1.
Eigen::VectorXd weak_gradient_local(const ElementCache& cache, int t,
                                    const Eigen::VectorXd& local, int r);

using ScalarFn = std::function<double(Vec2)>;

WeakField project_Qh(const ElementCache& cache, const ScalarFn& w);
PrimalField project_Mh(const ElementCache& cache, const ScalarFn& w);

double eval0(const ElementCache& cache, const WeakField& f, int t, Vec2 p);
Vec2 grad0(const ElementCache& cache, const WeakField& f, int t, Vec2 p);
double evalb(const ElementCache& cache, const WeakField& f, int e, double s_canonical);
double eval(const ElementCache& cache, const PrimalField& f, int t, Vec2 p);

}  // namespace pdwg
