#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pdwg/analysis.hpp"

#include <cmath>
#include <random>

using namespace pdwg;

namespace {

// all-inflow single-region problem with an exact solution attached, so that
// no weak dof is eliminated and every error metric sees the full fields
ProblemSpec centered_exact(double c_value) {
    ProblemSpec s;
    s.name = "centered";
    s.domain = DomainId::Square;
    s.region = [](Vec2) { return 0; };
    s.beta = [](Vec2 p, int) { return Vec2{0.5 - p.x, 0.5 - p.y}; };
    s.div_beta = [](Vec2, int) { return -2.0; };
    s.c = [c_value](Vec2) { return c_value; };
    s.f = [](Vec2, int) { return 0.0; };
    s.g = [](Vec2) { return 0.0; };
    s.has_exact = true;
    s.u = [](Vec2 p, int) { return std::sin(p.x + p.y); };
    s.grad_u = [](Vec2 p, int) {
        double c = std::cos(p.x + p.y);
        return Vec2{c, c};
    };
    return s;
}

ProblemSpec constant_field(double c_value) {
    ProblemSpec s = centered_exact(c_value);
    s.beta = [](Vec2, int) { return Vec2{1.0, 1.0}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    return s;
}

struct Setup {
    ProblemSpec prob;
    Mesh mesh;
    ElementCache cache;
};

Setup make_setup(ProblemSpec prob, int n, int k, int j) {
    Setup s;
    s.prob = std::move(prob);
    s.mesh = build_structured_square(n);
    classify_boundary(s.mesh, s.prob.beta);
    s.cache = build_cache(s.mesh, k, j);
    return s;
}

PrimalField random_primal(const ElementCache& cache, unsigned seed) {
    PrimalField f;
    f.space = &cache.pspace;
    f.coeffs.resize(cache.pspace.total_dofs);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = U(rng);
    return f;
}

WeakField zero_weak(const ElementCache& cache) {
    return {&cache.wspace, Eigen::VectorXd::Zero(cache.wspace.total_dofs)};
}

}  // namespace

TEST_CASE("convergence rates") {
    std::vector<double> r = convergence_rates({2e-3, 5e-4, 5e-4});
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(2.0));
    CHECK(r[1] == doctest::Approx(0.0));
    r = convergence_rates({1e-3, 1e-20});
    REQUIRE(r.size() == 1);
    CHECK(std::isnan(r[0]));
    CHECK(convergence_rates({1.0}).empty());
}

TEST_CASE("error metrics vanish on the projected exact solution") {
    Setup s = make_setup(centered_exact(1.0), 4, 2, 1);
    PrimalField uh = project_Mh(s.cache, [&](Vec2 p) { return s.prob.u(p, 0); });
    auto es = compute_errors(s.cache, s.prob, uh, zero_weak(s.cache), 2.0);
    REQUIRE(es.has_value());
    CHECK(es->e_h_0q < 1e-12);
    CHECK(es->eps0_0p == 0.0);
    CHECK(es->epsb_0p == 0.0);
    CHECK(es->eps0_1p == 0.0);
    CHECK(es->eps0_2p == 0.0);
    CHECK(!es->has_second);  // j = k - 1
    // the raw distance is the projection error: small but genuinely nonzero
    CHECK(es->u_err_0q > 1e-6);
    CHECK(es->u_err_0q < 1e-2);
}

TEST_CASE("a unit offset in u_h is measured as exactly one") {
    for (double p : {2.0, 3.0}) {
        Setup s = make_setup(centered_exact(1.0), 4, 2, 1);
        PrimalField uh = project_Mh(s.cache, [&](Vec2 pt) { return s.prob.u(pt, 0); });
        for (int t = 0; t < static_cast<int>(s.mesh.tris.size()); ++t)
            uh.coeffs[s.cache.pspace.tri_offset(t)] += 1.0;  // constant mode is 1
        auto es = compute_errors(s.cache, s.prob, uh, zero_weak(s.cache), p);
        REQUIRE(es.has_value());
        CHECK(es->e_h_0q == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("multiplier metrics of a constant weak field") {
    // lambda == 1 on a mesh with no eliminated edges: eps0 = |Omega|^(1/p) = 1
    // and epsb^p = sum_T h_T * perimeter(T) = 4 + 4 sqrt(2) on the unit square
    for (double p : {2.0, 1.2}) {
        Setup s = make_setup(centered_exact(1.0), 4, 2, 1);
        WeakField lam = project_Qh(s.cache, [](Vec2) { return 1.0; });
        PrimalField uh = project_Mh(s.cache, [&](Vec2 pt) { return s.prob.u(pt, 0); });
        auto es = compute_errors(s.cache, s.prob, uh, lam, p);
        REQUIRE(es.has_value());
        CHECK(es->eps0_0p == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(es->epsb_0p ==
              doctest::Approx(std::pow(4.0 + 4.0 * std::sqrt(2.0), 1.0 / p)).epsilon(1e-12));
        CHECK(es->eps0_1p < 1e-12);
        CHECK(es->eps0_2p < 1e-12);
    }
    // lambda = Q_h(x): gradient magnitude 1 everywhere, so eps1 = 1
    Setup s = make_setup(centered_exact(1.0), 4, 2, 2);
    WeakField lam = project_Qh(s.cache, [](Vec2 p) { return p.x; });
    PrimalField uh = project_Mh(s.cache, [&](Vec2 pt) { return s.prob.u(pt, 0); });
    auto es = compute_errors(s.cache, s.prob, uh, lam, 2.0);
    CHECK(es->eps0_1p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(es->has_second);  // j = k
    CHECK(es->eps0_2p < 1e-10);
}

TEST_CASE("problems without an exact solution yield no metrics") {
    ProblemSpec f1 = get_problem("f1");
    Mesh m = make_problem_mesh(f1, 2);
    ElementCache cache = build_cache(m, 2, 1);
    PrimalField uh{&cache.pspace, Eigen::VectorXd::Zero(cache.pspace.total_dofs)};
    CHECK(!compute_errors(cache, f1, uh, zero_weak(cache), 2.0).has_value());
}

TEST_CASE("mesh-dependent norm against hand-computed values") {
    // v == 1, beta = (1,1), c = 0: only the inflow boundary contributes,
    // 8 edges each worth h_e * |e| = (sqrt(2)/4) * (1/4)
    Setup s = make_setup(constant_field(0.0), 4, 2, 1);
    PrimalField one = project_Mh(s.cache, [](Vec2) { return 1.0; });
    CHECK(mh_norm(s.cache, s.prob, one, 2.0) ==
          doctest::Approx(std::sqrt(std::sqrt(2.0) / 2.0)).epsilon(1e-12));

    // with c = 1 the strong residual R == 1 adds sum_T h_T^2 |T| = 1/8
    Setup sc = make_setup(constant_field(1.0), 4, 2, 1);
    PrimalField onec = project_Mh(sc.cache, [](Vec2) { return 1.0; });
    CHECK(mh_norm(sc.cache, sc.prob, onec, 2.0) ==
          doctest::Approx(std::sqrt(0.125 + std::sqrt(2.0) / 2.0)).epsilon(1e-12));

    // zero field, positivity, and q-homogeneity
    PrimalField zero{&sc.cache.pspace, Eigen::VectorXd::Zero(sc.cache.pspace.total_dofs)};
    CHECK(mh_norm(sc.cache, sc.prob, zero, 2.0) == 0.0);
    for (double q : {2.0, 1.5}) {
        PrimalField v = random_primal(sc.cache, 31);
        double base = mh_norm(sc.cache, sc.prob, v, q);
        CHECK(base > 0.0);
        PrimalField v3 = v;
        v3.coeffs *= 3.0;
        CHECK(mh_norm(sc.cache, sc.prob, v3, q) == doctest::Approx(3.0 * base).epsilon(1e-12));
    }
}

TEST_CASE("constructive test function attains the norm at q = 2") {
    // b(v, sigma_v) = |v|^2 for every discrete v: beta and c are polynomial,
    // so the projections in the construction are exact
    ProblemSpec prob = get_problem("t4");
    Mesh m = make_problem_mesh(prob, 8);
    ElementCache cache = build_cache(m, 2, 1);
    Eigen::SparseMatrix<double> B = assemble_b(cache, prob);
    for (unsigned seed = 1; seed <= 20; ++seed) {
        PrimalField v = random_primal(cache, seed);
        WeakField sig = infsup_test_function(cache, prob, v, 2.0);
        double lhs = v.coeffs.dot(B * sig.coeffs);
        double norm2 = std::pow(mh_norm(cache, prob, v, 2.0), 2.0);
        CHECK(std::abs(lhs - norm2) <= 1e-8 * norm2);
    }
}

TEST_CASE("conservation audit of the zero solution") {
    Setup s = make_setup(centered_exact(1.0), 2, 2, 1);
    SolverConfig cfg;
    Solution sol = fixed_point_solve(s.cache, s.prob, cfg);  // f = g = 0
    REQUIRE(sol.log.status == SolveStatus::Converged);
    ConservationAudit a = conservation_audit(s.cache, s.prob, sol, cfg);
    CHECK(a.element_residual.size() == s.mesh.tris.size());
    CHECK(a.edge_jump.size() == s.mesh.edges.size());
    CHECK(a.max_element_rel == 0.0);
    CHECK(a.max_edge_rel == 0.0);
}

TEST_CASE("conservation audit of a transport solve") {
    ProblemSpec prob = get_problem("t4");
    Mesh m = make_problem_mesh(prob, 4);
    ElementCache cache = build_cache(m, 2, 1);
    SolverConfig cfg;
    Solution sol = fixed_point_solve(cache, prob, cfg);
    REQUIRE(sol.log.status == SolveStatus::Converged);
    ConservationAudit a = conservation_audit(cache, prob, sol, cfg);
    CHECK(a.max_element_rel < 1e-12);
    CHECK(a.max_edge_rel < 1e-12);
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e)
        if (m.edges[e].t1 == -1) {
            CHECK(a.edge_jump[e] == 0.0);
            CHECK(a.edge_scale[e] == 0.0);
        }
}

TEST_CASE("conservation audit refuses unconverged solutions") {
    ProblemSpec prob = get_problem("t4");
    Mesh m = make_problem_mesh(prob, 2);
    ElementCache cache = build_cache(m, 2, 1);
    SolverConfig cfg;
    cfg.max_iters = 1;  // p = 2 needs two passes
    Solution sol = fixed_point_solve(cache, prob, cfg);
    REQUIRE(sol.log.status == SolveStatus::MaxIters);
    CHECK_THROWS_AS(conservation_audit(cache, prob, sol, cfg), std::logic_error);
}
