#pragma once

#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "pdwg/problems.hpp"
#include "pdwg/space.hpp"

namespace pdwg {

// Lagged stabilizer weights (|.| + eps)^(p-2), frozen at a previous iterate:
// one value per quadrature point of every element side (boundary term) and of
// every element interior (volume term).
struct StabWeights {
    std::vector<std::array<Eigen::VectorXd, 3>> edge_w;
    std::vector<Eigen::VectorXd> tri_w;
};

// Evaluates the weights at `lambda_prev` (nullptr means the zero field, the
// iteration's starting point).  Requires p > 1 and eps > 0.
StabWeights compute_weights(const ElementCache& cache, const ProblemSpec& prob,
                            const WeakField* lambda_prev, double p, double eps);

// Linearized stabilizer matrix on the weak space:
//   s~(lambda, sigma) = sum_T rho h_T^(1-p) int_dT w_e (lambda0 - lambda_b)(sigma0 - sigma_b)
//                     + sum_T tau int_T w_T (beta.grad lambda0 - c lambda0)(beta.grad sigma0 - c sigma0).
// Requires rho > 0 and tau >= 0.
Eigen::SparseMatrix<double> assemble_s_tilde(const ElementCache& cache, const ProblemSpec& prob,
                                             const StabWeights& weights, double p, double rho,
                                             double tau);

// Coupling matrix, rows over the primal space, columns over the weak space:
//   b(v, sigma) = sum_T (v, beta.grad_w sigma - c sigma0)_T.
Eigen::SparseMatrix<double> assemble_b(const ElementCache& cache, const ProblemSpec& prob);

// Load functional on the weak space:
//   F(sigma) = sum_{e in inflow} <sigma_b, (beta.n) g>_e - (f, sigma0).
Eigen::VectorXd assemble_rhs(const ElementCache& cache, const ProblemSpec& prob);

// The genuinely nonlinear stabilizer s(lambda; sigma), i.e. with strength
// sgn(d)|d|^(p-1) in place of the lagged weights.  Requires p > 1.
double eval_s_nonlinear(const ElementCache& cache, const ProblemSpec& prob, const WeakField& lam,
                        const WeakField& sig, double p, double rho, double tau);

}  // namespace pdwg
