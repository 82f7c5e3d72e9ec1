#pragma once

#include "pdwg/poly.hpp"

#include <array>
#include <functional>
#include <string>

namespace pdwg {

enum class EdgeTag { Interior, Inflow, Outflow };
enum class DomainId { Square, LShape };

// Direction of the diagonal that splits each grid cell into two triangles.
// Anti runs from the lower-right corner to the upper-left (aligned with
// x + y = const), Main from the lower-left to the upper-right.
enum class Diagonal { Anti, Main };

struct MeshTri {
    std::array<int, 3> v{};        // vertex indices, counterclockwise
    int region = 0;
    double h = 0.0;                // longest edge
    double area = 0.0;
    Vec2 centroid;
    std::array<int, 3> edge{};     // global edge index of side s: v[s] -> v[(s+1)%3]
    std::array<Vec2, 3> normal{};  // outward unit normal per side
    std::array<bool, 3> reversed{};// side traversal opposes the canonical edge direction
};

struct MeshEdge {
    int v0 = -1, v1 = -1;  // canonical orientation: v0 < v1
    int t0 = -1, t1 = -1;  // adjacent triangles; t1 = -1 on the boundary
    double length = 0.0;
    Vec2 midpoint;
    EdgeTag tag = EdgeTag::Interior;
};

struct Mesh {
    DomainId domain = DomainId::Square;
    std::vector<Vec2> vertices;
    std::vector<MeshTri> tris;
    std::vector<MeshEdge> edges;
    double h = 0.0;          // max over h_T
    int inv_h_nominal = 0;   // cells per unit length (the tables' 1/h column)

    Diagonal diag = Diagonal::Anti;

    // present only on directly built structured meshes, for point location
    bool structured = false;
    int grid_n = 0;          // cells per side (square) or per half-side doubled (L-shape)
    std::vector<int> cell2tri;  // 2 entries per grid cell, -1 where absent

    TriGeom geom(int t) const {
        const MeshTri& T = tris[t];
        return make_tri_geom(vertices[T.v[0]], vertices[T.v[1]], vertices[T.v[2]]);
    }
};

using VectorField = std::function<Vec2(Vec2, int)>;  // (point, region) -> beta
using RegionFn = std::function<int(Vec2)>;

Mesh build_structured_square(int n, Diagonal diag = Diagonal::Anti);
Mesh build_lshape(int n, Diagonal diag = Diagonal::Anti);
Mesh refine_uniform(const Mesh& m);

void assign_regions(Mesh& m, const RegionFn& region);

// Tags each boundary edge Inflow where beta(midpoint) . n < 0, else Outflow.
void classify_boundary(Mesh& m, const VectorField& beta);

void dump_csv(const Mesh& m, const std::string& path);

// Structured point location; returns -1 outside the domain. Points on shared
// lines resolve to the lower/left triangle deterministically.
int locate(const Mesh& m, Vec2 p);

}  // namespace pdwg
