#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pdwg/solver.hpp"

#include <Eigen/Dense>

using namespace pdwg;

namespace {

struct Setup {
    ProblemSpec prob;
    Mesh mesh;
    ElementCache cache;
};

Setup make_setup(const std::string& name, int n, int k, int j) {
    Setup s;
    s.prob = get_problem(name);
    s.mesh = make_problem_mesh(s.prob, n);
    s.cache = build_cache(s.mesh, k, j);
    return s;
}

// the same lagged iteration, but with a dense full-pivot solve
std::pair<Eigen::VectorXd, Eigen::VectorXd> dense_reference(const ElementCache& cache,
                                                            const ProblemSpec& prob,
                                                            const SolverConfig& cfg,
                                                            int* iters_out) {
    const int nl = cache.wspace.total_dofs;
    const int nu = cache.pspace.total_dofs;
    Eigen::MatrixXd Bd = Eigen::MatrixXd(assemble_b(cache, prob));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nl + nu);
    rhs.head(nl) = assemble_rhs(cache, prob);

    Eigen::VectorXd lam = Eigen::VectorXd::Zero(nl), u = Eigen::VectorXd::Zero(nu);
    WeakField lam_field{&cache.wspace, lam};
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        lam_field.coeffs = lam;
        StabWeights w =
            compute_weights(cache, prob, iter == 0 ? nullptr : &lam_field, cfg.p, cfg.eps);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nl + nu, nl + nu);
        A.topLeftCorner(nl, nl) =
            Eigen::MatrixXd(assemble_s_tilde(cache, prob, w, cfg.p, cfg.rho, cfg.tau));
        A.bottomLeftCorner(nu, nl) = Bd;
        A.topRightCorner(nl, nu) = Bd.transpose();
        Eigen::VectorXd x = A.fullPivLu().solve(rhs);
        double upd = std::max((x.head(nl) - lam).lpNorm<Eigen::Infinity>(),
                              (x.tail(nu) - u).lpNorm<Eigen::Infinity>());
        lam = x.head(nl);
        u = x.tail(nu);
        if (iters_out) *iters_out = iter + 1;
        if (upd <= cfg.stop_tol) break;
    }
    return {lam, u};
}

}  // namespace

TEST_CASE("configuration validation") {
    SolverConfig good;
    CHECK_NOTHROW(validate(good));

    auto reject = [](auto mutate) {
        SolverConfig c;
        mutate(c);
        CHECK_THROWS_AS(validate(c), ConfigError);
    };
    reject([](SolverConfig& c) { c.p = 1.0; });
    reject([](SolverConfig& c) { c.p = std::nan(""); });
    reject([](SolverConfig& c) { c.rho = 0.0; });
    reject([](SolverConfig& c) { c.tau = -1.0; });
    reject([](SolverConfig& c) { c.eps = 0.0; });
    reject([](SolverConfig& c) { c.stop_tol = 0.0; });
    reject([](SolverConfig& c) { c.max_iters = 0; });
    reject([](SolverConfig& c) { c.k = 0; });
    reject([](SolverConfig& c) { c.k = 5; });
    reject([](SolverConfig& c) { c.j = c.k - 2; });
    reject([](SolverConfig& c) { c.j = c.k + 1; });
    reject([](SolverConfig& c) { c.pivot_tol = 0.0; });
    reject([](SolverConfig& c) { c.pivot_tol = 1.5; });

    Setup s = make_setup("t4", 2, 2, 1);
    SolverConfig mismatched;
    mismatched.k = 1;
    mismatched.j = 0;
    CHECK_THROWS_AS(fixed_point_solve(s.cache, s.prob, mismatched), ConfigError);
}

TEST_CASE("status strings") {
    CHECK(to_string(SolveStatus::Converged) == "converged");
    CHECK(to_string(SolveStatus::MaxIters) == "max_iters");
    CHECK(to_string(SolveStatus::SingularSystem) == "singular_system");
}

TEST_CASE("zero data yields the zero solution in one pass") {
    Setup s = make_setup("t4", 2, 2, 1);
    s.prob.f = [](Vec2, int) { return 0.0; };
    s.prob.g = [](Vec2) { return 0.0; };
    SolverConfig cfg;
    Solution sol = fixed_point_solve(s.cache, s.prob, cfg);
    CHECK(sol.log.status == SolveStatus::Converged);
    CHECK(sol.log.iters.size() == 1);
    CHECK(sol.log.iters[0].max_update == 0.0);
    CHECK(sol.log.iters[0].lin_residual == 0.0);
    CHECK(sol.lambda.coeffs.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(sol.u.coeffs.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("p = 2 needs exactly two passes: the weights never change") {
    Setup s = make_setup("t4", 4, 2, 1);
    SolverConfig cfg;  // p = 2, rho = 1, tau = 0
    Solution sol = fixed_point_solve(s.cache, s.prob, cfg);
    CHECK(sol.log.status == SolveStatus::Converged);
    REQUIRE(sol.log.iters.size() == 2);
    CHECK(sol.log.iters[0].max_update > cfg.stop_tol);
    CHECK(sol.log.iters[1].max_update <= 1e-13);
    for (const IterationRecord& r : sol.log.iters) {
        CHECK(r.lin_residual <= 1e-10);
        CHECK(r.seconds >= 0.0);
    }
    CHECK(sol.log.note.empty());  // j = k-1 is inside the theory
}

TEST_CASE("j = k with tau = 0 is flagged in the note") {
    Setup s = make_setup("t2", 2, 1, 1);
    SolverConfig cfg;
    cfg.k = 1;
    cfg.j = 1;
    Solution sol = fixed_point_solve(s.cache, s.prob, cfg);
    CHECK(!sol.log.note.empty());
    cfg.tau = 0.5;
    CHECK(fixed_point_solve(s.cache, s.prob, cfg).log.note.empty());
}

TEST_CASE("sparse solver matches a dense full-pivot replica") {
    struct Run {
        const char* name;
        int n, k, j;
        double p, rho, tau;
    };
    for (Run r : {Run{"t2", 2, 1, 0, 1.6, 10.0, 0.0}, Run{"t4", 4, 2, 1, 3.0, 1e4, 0.0},
                  Run{"t3", 2, 1, 1, 2.0, 1.0, 0.5}}) {
        CAPTURE(r.name);
        Setup s = make_setup(r.name, r.n, r.k, r.j);
        SolverConfig cfg;
        cfg.p = r.p;
        cfg.rho = r.rho;
        cfg.tau = r.tau;
        cfg.k = r.k;
        cfg.j = r.j;
        Solution sol = fixed_point_solve(s.cache, s.prob, cfg);
        REQUIRE(sol.log.status == SolveStatus::Converged);
        int ref_iters = 0;
        auto [lam, u] = dense_reference(s.cache, s.prob, cfg, &ref_iters);
        CHECK(static_cast<int>(sol.log.iters.size()) == ref_iters);
        double scale = 1.0 + lam.lpNorm<Eigen::Infinity>() + u.lpNorm<Eigen::Infinity>();
        CHECK((sol.lambda.coeffs - lam).lpNorm<Eigen::Infinity>() / scale < 1e-8);
        CHECK((sol.u.coeffs - u).lpNorm<Eigen::Infinity>() / scale < 1e-8);
    }
}

TEST_CASE("repeated solves are bitwise identical") {
    Setup s = make_setup("t6", 4, 2, 1);
    SolverConfig cfg;
    cfg.p = 1.6;
    cfg.rho = 10.0;
    Solution a = fixed_point_solve(s.cache, s.prob, cfg);
    Solution b = fixed_point_solve(s.cache, s.prob, cfg);
    REQUIRE(a.log.iters.size() == b.log.iters.size());
    CHECK((a.lambda.coeffs - b.lambda.coeffs).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((a.u.coeffs - b.u.coeffs).lpNorm<Eigen::Infinity>() == 0.0);
    for (size_t i = 0; i < a.log.iters.size(); ++i)
        CHECK(a.log.iters[i].max_update == b.log.iters[i].max_update);
}
