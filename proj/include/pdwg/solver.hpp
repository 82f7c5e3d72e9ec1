#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pdwg/forms.hpp"

namespace pdwg {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
    double p = 2.0;
    double rho = 1.0;
    double tau = 0.0;
    double eps = 1e-4;        // regularization inside the lagged weights
    double stop_tol = 1e-5;   // sup-norm coefficient update threshold
    int max_iters = 100;
    int k = 2;                // primal space degree is k-1, weak gradient degree k-1
    int j = 1;                // dual space degree, k-1 or k
    double pivot_tol = 1.0;   // sparse LU partial-pivoting threshold in (0, 1]
};

// Throws ConfigError on invalid parameter combinations.
void validate(const SolverConfig& cfg);

enum class SolveStatus { Converged, MaxIters, SingularSystem };

std::string to_string(SolveStatus s);

struct IterationRecord {
    double max_update = 0.0;    // sup-norm of coefficient change in this step
    double lin_residual = 0.0;  // relative inf-norm residual of the linear solve
    double seconds = 0.0;
};

struct IterationLog {
    std::vector<IterationRecord> iters;
    SolveStatus status = SolveStatus::MaxIters;
    std::string note;  // non-fatal flags (e.g. parameter regimes outside the theory)
};

struct Solution {
    WeakField lambda;
    PrimalField u;
    StabWeights weights;  // lagged weights used in the final linear solve
    IterationLog log;
};

// Lagged-weight fixed-point iteration from the zero initial guess.  Each pass
// freezes the stabilizer weights at the previous iterate and solves the linear
// saddle-point system [S~, B^T; B, 0] [lambda; u] = [F; 0].  cfg.k and cfg.j
// must match the cache.
Solution fixed_point_solve(const ElementCache& cache, const ProblemSpec& prob,
                           const SolverConfig& cfg);

}  // namespace pdwg
