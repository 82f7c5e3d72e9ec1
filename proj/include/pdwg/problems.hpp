#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pdwg/mesh.hpp"

namespace pdwg {

// A transport problem: convection field beta, reaction coefficient c, volume
// source f and inflow data g on the domain `domain`.  Coefficients that differ
// across sub-regions take the region id as a second argument; `region` maps a
// point to its region id (constant 0 for single-region problems).
struct ProblemSpec {
    std::string name;
    std::string description;
    DomainId domain = DomainId::Square;
    // All registered problems use the anti-diagonal split (the reference
    // tables were produced on it); for interface problems it is not a choice,
    // since the region boundary must stay aligned with element edges.
    Diagonal mesh_diag = Diagonal::Anti;
    RegionFn region;
    VectorField beta;
    std::function<double(Vec2, int)> div_beta;
    std::function<double(Vec2)> c;
    std::function<double(Vec2, int)> f;
    std::function<double(Vec2)> g;
    bool has_exact = false;
    std::function<double(Vec2, int)> u;
    std::function<Vec2(Vec2, int)> grad_u;
};

// Names of all registered problems, in registry order.
std::vector<std::string> problem_names();

// Looks up a problem by name; throws std::invalid_argument for unknown names.
ProblemSpec get_problem(const std::string& name);

// Copy of `spec` with the volume source replaced by a constant.
ProblemSpec with_constant_f(ProblemSpec spec, double value);

// Builds the mesh for `spec` at generator resolution n (square: 1/h = n,
// L-shape: 1/h = 2n), assigns regions and classifies the boundary.
Mesh make_problem_mesh(const ProblemSpec& spec, int n);

// One uniform refinement of `m`, with regions inherited from the parents and
// the boundary re-classified against `spec`.
Mesh refine_problem_mesh(const Mesh& m, const ProblemSpec& spec);

}  // namespace pdwg
