#pragma once

#include <optional>
#include <vector>

#include "pdwg/solver.hpp"

namespace pdwg {

// Error metrics against the exact solution: e_h = u_h - Q_h u measured in
// L^q (q = p/(p-1)); the multiplier errors are the fields themselves (the
// exact multiplier is zero).  The second-order metric uses the piecewise
// Laplacian of lambda0 and is meaningful only when j = k (it vanishes
// identically for j = 1).
struct ErrorSet {
    double e_h_0q = 0.0;
    double u_err_0q = 0.0;  // raw distance |u_h - u|_{0,q}, reported for figures
    double eps0_0p = 0.0;
    double epsb_0p = 0.0;   // with per-element h_T weighting, sides counted per element
    double eps0_1p = 0.0;
    double eps0_2p = 0.0;
    bool has_second = false;  // j == k
};

// Returns nullopt when the problem carries no exact solution.
std::optional<ErrorSet> compute_errors(const ElementCache& cache, const ProblemSpec& prob,
                                       const PrimalField& u, const WeakField& lambda, double p);

// rate_i = log2(e_i / e_{i+1}); NaN when either error is below 1e-14.
std::vector<double> convergence_rates(const std::vector<double>& errors);

// Local balance of the discrete flux
//   F_h.n = -rho h_T^(1-p) w_e (lambda0 - lambda_b) + P_{k-1}(beta u_h).n
// and effective solution u~ = u_h + tau w_T (beta.grad lambda0 - c lambda0):
// per element |int_dT F_h.n + int_T c u~ - int_T f|, and per interior edge the
// Euclidean norm of the P_j(e) moments of the flux-normal jump.  Each value is
// paired with its local data scale: the same integrals with every term in
// absolute value, the convective part entering at its full vector magnitude
// |P_{k-1}(beta u_h)| (the normal component may cancel to zero on edges the
// convection runs along, but the subtraction still operates on numbers of
// that size).
struct ConservationAudit {
    std::vector<double> element_residual, element_scale;
    std::vector<double> edge_jump, edge_scale;  // zero entries on boundary edges
    double max_element_rel = 0.0;
    double max_edge_rel = 0.0;
};

// Requires a converged solution; reuses the assembly quadrature and the lagged
// weights of the final linear solve.
ConservationAudit conservation_audit(const ElementCache& cache, const ProblemSpec& prob,
                                     const Solution& sol, const SolverConfig& cfg);

// Mesh-dependent residual norm on the primal space:
//   ( sum_T h_T^q |div(beta v) + c v|^q_T
//   + sum_{e not in outflow} h_e |[[beta v . n]]|^q_e )^(1/q),
// with h_e the mean adjacent h_T on interior edges, one-sided on the boundary.
double mh_norm(const ElementCache& cache, const ProblemSpec& prob, const PrimalField& v,
               double q);

// Constructive dual test function:
//   sigma0 = -h_T^q Q0( sgn(R) |R|^(q-1) ),  R = div(beta v) + c v,
//   sigma_b = h_e Qb( sgn(J) |J|^(q-1) ),   J = [[beta v . n]],
// zero on outflow edges; satisfies b(v, sigma) = |v|_Mh^q up to quadrature.
WeakField infsup_test_function(const ElementCache& cache, const ProblemSpec& prob,
                               const PrimalField& v, double q);

}  // namespace pdwg
