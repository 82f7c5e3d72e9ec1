#include "pdwg/solver.hpp"

#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>

namespace pdwg {

void validate(const SolverConfig& cfg) {
    if (!(cfg.p > 1.0) || !std::isfinite(cfg.p))
        throw ConfigError("p must be a finite number > 1");
    if (!(cfg.rho > 0.0)) throw ConfigError("rho must be > 0");
    if (!(cfg.tau >= 0.0)) throw ConfigError("tau must be >= 0");
    if (!(cfg.eps > 0.0)) throw ConfigError("eps must be > 0");
    if (!(cfg.stop_tol > 0.0)) throw ConfigError("stop_tol must be > 0");
    if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (cfg.k < 1 || cfg.k > 4) throw ConfigError("k must be in 1..4");
    if (cfg.j != cfg.k - 1 && cfg.j != cfg.k) throw ConfigError("j must be k-1 or k");
    if (!(cfg.pivot_tol > 0.0) || cfg.pivot_tol > 1.0)
        throw ConfigError("pivot_tol must be in (0, 1]");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIters: return "max_iters";
        case SolveStatus::SingularSystem: return "singular_system";
    }
    return "unknown";
}

namespace {

Eigen::SparseMatrix<double> build_saddle(const Eigen::SparseMatrix<double>& S,
                                         const Eigen::SparseMatrix<double>& B) {
    const int nl = static_cast<int>(S.rows());
    const int nu = static_cast<int>(B.rows());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(S.nonZeros()) + 2 * static_cast<size_t>(B.nonZeros()));
    for (int o = 0; o < S.outerSize(); ++o)
        for (Eigen::SparseMatrix<double>::InnerIterator it(S, o); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                              it.value());
    for (int o = 0; o < B.outerSize(); ++o)
        for (Eigen::SparseMatrix<double>::InnerIterator it(B, o); it; ++it) {
            const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            trip.emplace_back(nl + r, c, it.value());
            trip.emplace_back(c, nl + r, it.value());
        }
    Eigen::SparseMatrix<double> A(nl + nu, nl + nu);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

struct LinearResult {
    Eigen::VectorXd x;
    double rel_residual = 0.0;
    bool ok = true;
};

// Direct solve with iterative refinement; keeps the iterate with the smallest
// relative inf-norm residual.
LinearResult solve_refined(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                           double pivot_tol) {
    LinearResult out;
    const double bnorm = b.lpNorm<Eigen::Infinity>();
    if (bnorm == 0.0) {
        out.x = Eigen::VectorXd::Zero(b.size());
        return out;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.setPivotThreshold(pivot_tol);
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        out.ok = false;
        out.x = Eigen::VectorXd::Zero(b.size());
        out.rel_residual = 1.0;
        return out;
    }
    Eigen::VectorXd x = lu.solve(b);
    Eigen::VectorXd r = b - A * x;
    double best = r.lpNorm<Eigen::Infinity>() / bnorm;
    out.x = x;
    out.rel_residual = best;
    for (int round = 0; round < 5 && best > 1e-13; ++round) {
        x += lu.solve(r).eval();
        r = b - A * x;
        double rel = r.lpNorm<Eigen::Infinity>() / bnorm;
        if (rel < best) {
            best = rel;
            out.x = x;
            out.rel_residual = rel;
        } else {
            break;
        }
    }
    out.ok = best <= 1e-10;
    return out;
}

}  // namespace

Solution fixed_point_solve(const ElementCache& cache, const ProblemSpec& prob,
                           const SolverConfig& cfg) {
    validate(cfg);
    if (cfg.k != cache.k || cfg.j != cache.j)
        throw ConfigError("solver k/j must match the element cache");

    Solution sol;
    sol.lambda.space = &cache.wspace;
    sol.lambda.coeffs = Eigen::VectorXd::Zero(cache.wspace.total_dofs);
    sol.u.space = &cache.pspace;
    sol.u.coeffs = Eigen::VectorXd::Zero(cache.pspace.total_dofs);
    if (cfg.j == cfg.k && cfg.tau == 0.0)
        sol.log.note = "j = k with tau = 0 is outside the uniqueness theory; proceeding";

    const Eigen::SparseMatrix<double> B = assemble_b(cache, prob);
    const Eigen::VectorXd F = assemble_rhs(cache, prob);
    const int nl = cache.wspace.total_dofs;
    const int nu = cache.pspace.total_dofs;
    Eigen::VectorXd rhs(nl + nu);
    rhs.head(nl) = F;
    rhs.tail(nu).setZero();

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        sol.weights = compute_weights(cache, prob, iter == 0 ? nullptr : &sol.lambda, cfg.p,
                                      cfg.eps);
        Eigen::SparseMatrix<double> S =
            assemble_s_tilde(cache, prob, sol.weights, cfg.p, cfg.rho, cfg.tau);
        Eigen::SparseMatrix<double> A = build_saddle(S, B);
        LinearResult lin = solve_refined(A, rhs, cfg.pivot_tol);

        IterationRecord rec;
        rec.lin_residual = lin.rel_residual;
        if (!lin.ok) {
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                              .count();
            sol.log.iters.push_back(rec);
            sol.log.status = SolveStatus::SingularSystem;
            return sol;
        }
        Eigen::VectorXd lam_new = lin.x.head(nl);
        Eigen::VectorXd u_new = lin.x.tail(nu);
        rec.max_update = std::max((lam_new - sol.lambda.coeffs).lpNorm<Eigen::Infinity>(),
                                  (u_new - sol.u.coeffs).lpNorm<Eigen::Infinity>());
        sol.lambda.coeffs = lam_new;
        sol.u.coeffs = u_new;
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        sol.log.iters.push_back(rec);
        if (rec.max_update <= cfg.stop_tol) {
            sol.log.status = SolveStatus::Converged;
            return sol;
        }
    }
    sol.log.status = SolveStatus::MaxIters;
    return sol;
}

}  // namespace pdwg
