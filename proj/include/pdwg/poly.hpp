#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace pdwg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// sgn(0) = 0 exactly.
inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Affine geometry of a physical triangle with counterclockwise vertices.
struct TriGeom {
    Vec2 v0, v1, v2;
    double area = 0.0;
    Vec2 centroid;
    double h = 0.0;  // longest edge length

    // map reference coordinates (r,s) on (0,0),(1,0),(0,1) to physical space
    Vec2 map(Vec2 ref) const {
        return {v0.x + (v1.x - v0.x) * ref.x + (v2.x - v0.x) * ref.y,
                v0.y + (v1.y - v0.y) * ref.x + (v2.y - v0.y) * ref.y};
    }
};

// Builds geometry; throws std::invalid_argument on degenerate (zero-area) or
// clockwise input.
TriGeom make_tri_geom(Vec2 a, Vec2 b, Vec2 c);

// Quadrature on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
struct QuadRuleTri {
    std::vector<Vec2> pts;
    std::vector<double> w;
    int exactness = 0;
};

// Gauss rule on [0,1]; exact for polynomials of degree 2*count-1.
struct QuadRule1D {
    std::vector<double> s;
    std::vector<double> w;
    int exactness = 0;
};

// Symmetric positive-weight rule with at least the requested exactness.
// Supported requests: 1..12; higher degrees are rejected.
QuadRuleTri tri_quadrature(int exactness);

// Gauss-Legendre on [0,1]; 1..30 points.
QuadRule1D edge_quadrature(int points);

// Monomial basis of P_d(T) in local coordinates centered at the triangle
// centroid and scaled by h. Ordering: total degree ascending, x-power
// descending within a degree: 1, X, Y, X^2, XY, Y^2, ...
struct TriBasis {
    int degree = 0;
    Vec2 center;
    double scale = 1.0;

    int count() const { return (degree + 1) * (degree + 2) / 2; }
    void eval(Vec2 p, double* vals) const;
    void eval_grad(Vec2 p, Vec2* grads) const;
    void eval_lap(Vec2 p, double* laps) const;
};

TriBasis make_tri_basis(const TriGeom& geom, int degree);

// Basis of P_d(e) in the canonical arclength parameter s in [0,1]:
// phi_i(s) = (s - 1/2)^i.
struct EdgeBasis {
    int degree = 0;

    int count() const { return degree + 1; }
    void eval(double s, double* vals) const;
};

// Values (and for triangles, physical-space gradients) at a batch of points;
// rows are points, columns are basis functions.
struct BasisTable {
    Eigen::MatrixXd val, gx, gy;
};

BasisTable eval_basis(const TriBasis& basis, const std::vector<Vec2>& pts);
Eigen::MatrixXd eval_basis(const EdgeBasis& basis, const std::vector<double>& s);

}  // namespace pdwg
