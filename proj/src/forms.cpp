#include "pdwg/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace pdwg {

namespace {

void check_exponent(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("stabilizer exponent p must be > 1");
}

// Side-restricted value of (phi0 - phi_b) for every local dof of side s.
// Columns: nb_tri interior dofs, then the nb_edge dofs of side s itself
// (other sides do not appear on this side).
Eigen::MatrixXd side_mismatch(const ElementCache& c, const SideTables& S) {
    const int nq = static_cast<int>(S.pts.size());
    Eigen::MatrixXd d(nq, c.nb_tri + c.nb_edge);
    d.leftCols(c.nb_tri) = S.dual_tr;
    d.rightCols(c.nb_edge) = -S.edge_val;
    return d;
}

}  // namespace

StabWeights compute_weights(const ElementCache& cache, const ProblemSpec& prob,
                            const WeakField* lambda_prev, double p, double eps) {
    check_exponent(p);
    if (!(eps > 0.0)) throw std::invalid_argument("regularization eps must be > 0");
    const Mesh& m = *cache.mesh;
    const int nT = static_cast<int>(m.tris.size());
    StabWeights w;
    w.edge_w.resize(nT);
    w.tri_w.resize(nT);
    for (int t = 0; t < nT; ++t) {
        const ElementTables& E = cache.elems[t];
        const int reg = m.tris[t].region;
        Eigen::VectorXd loc = lambda_prev ? gather_local(cache, *lambda_prev, t)
                                          : Eigen::VectorXd::Zero(cache.nloc);
        for (int s = 0; s < 3; ++s) {
            const SideTables& S = E.side[s];
            const int nq = static_cast<int>(S.pts.size());
            Eigen::VectorXd mis(cache.nb_tri + cache.nb_edge);
            mis.head(cache.nb_tri) = loc.head(cache.nb_tri);
            mis.tail(cache.nb_edge) = loc.segment(cache.side_dof(s, 0), cache.nb_edge);
            Eigen::VectorXd dl = side_mismatch(cache, S) * mis;
            Eigen::VectorXd& out = w.edge_w[t][s];
            out.resize(nq);
            for (int q = 0; q < nq; ++q) out[q] = std::pow(std::abs(dl[q]) + eps, p - 2.0);
        }
        const int nq = static_cast<int>(E.pts.size());
        Eigen::VectorXd& out = w.tri_w[t];
        out.resize(nq);
        for (int q = 0; q < nq; ++q) {
            Vec2 b = prob.beta(E.pts[q], reg);
            double cc = prob.c(E.pts[q]);
            double r = 0.0;
            for (int i = 0; i < cache.nb_tri; ++i)
                r += loc[i] * (b.x * E.dual.gx(q, i) + b.y * E.dual.gy(q, i) -
                               cc * E.dual.val(q, i));
            out[q] = std::pow(std::abs(r) + eps, p - 2.0);
        }
    }
    return w;
}

Eigen::SparseMatrix<double> assemble_s_tilde(const ElementCache& cache, const ProblemSpec& prob,
                                             const StabWeights& weights, double p, double rho,
                                             double tau) {
    check_exponent(p);
    if (!(rho > 0.0)) throw std::invalid_argument("stabilizer scaling rho must be > 0");
    if (!(tau >= 0.0)) throw std::invalid_argument("stabilizer scaling tau must be >= 0");
    const Mesh& m = *cache.mesh;
    const int n = cache.wspace.total_dofs;
    const int nT = static_cast<int>(m.tris.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(nT) * 3 * (cache.nb_tri + cache.nb_edge) *
                 (cache.nb_tri + cache.nb_edge));

    std::vector<int> gdof(cache.nb_tri + cache.nb_edge);
    for (int t = 0; t < nT; ++t) {
        const ElementTables& E = cache.elems[t];
        const MeshTri& T = m.tris[t];
        const double scale = rho * std::pow(E.geom.h, 1.0 - p);
        for (int s = 0; s < 3; ++s) {
            const SideTables& S = E.side[s];
            const int off = cache.wspace.edge_offset[T.edge[s]];
            int na = cache.nb_tri + (off >= 0 ? cache.nb_edge : 0);
            for (int i = 0; i < cache.nb_tri; ++i) gdof[i] = cache.wspace.tri_offset(t) + i;
            for (int l = 0; off >= 0 && l < cache.nb_edge; ++l) gdof[cache.nb_tri + l] = off + l;

            Eigen::MatrixXd d = side_mismatch(cache, S).leftCols(na);
            Eigen::VectorXd wq =
                S.w.cwiseProduct(weights.edge_w[t][s]);
            Eigen::MatrixXd loc = d.transpose() * wq.asDiagonal() * d;
            for (int i = 0; i < na; ++i)
                for (int jj = 0; jj < na; ++jj)
                    trip.emplace_back(gdof[i], gdof[jj], scale * loc(i, jj));
        }
        if (tau > 0.0) {
            const int nq = static_cast<int>(E.pts.size());
            Eigen::MatrixXd D(nq, cache.nb_tri);
            for (int q = 0; q < nq; ++q) {
                Vec2 b = prob.beta(E.pts[q], T.region);
                double cc = prob.c(E.pts[q]);
                for (int i = 0; i < cache.nb_tri; ++i)
                    D(q, i) = b.x * E.dual.gx(q, i) + b.y * E.dual.gy(q, i) -
                              cc * E.dual.val(q, i);
            }
            Eigen::VectorXd wq = E.w.cwiseProduct(weights.tri_w[t]);
            Eigen::MatrixXd loc = D.transpose() * wq.asDiagonal() * D;
            for (int i = 0; i < cache.nb_tri; ++i)
                for (int jj = 0; jj < cache.nb_tri; ++jj)
                    trip.emplace_back(cache.wspace.tri_offset(t) + i,
                                      cache.wspace.tri_offset(t) + jj, tau * loc(i, jj));
        }
    }
    Eigen::SparseMatrix<double> S(n, n);
    S.setFromTriplets(trip.begin(), trip.end());
    return S;
}

Eigen::SparseMatrix<double> assemble_b(const ElementCache& cache, const ProblemSpec& prob) {
    const Mesh& m = *cache.mesh;
    const int nT = static_cast<int>(m.tris.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(nT) * cache.nb_prim * cache.nloc);

    for (int t = 0; t < nT; ++t) {
        const ElementTables& E = cache.elems[t];
        const MeshTri& T = m.tris[t];
        const int nq = static_cast<int>(E.pts.size());

        // pointwise values of beta . grad_w(phi) over the volume rule, per local dof
        Eigen::MatrixXd Gx = E.prim.val * E.wgrad.topRows(cache.nb_prim);
        Eigen::MatrixXd Gy = E.prim.val * E.wgrad.bottomRows(cache.nb_prim);
        Eigen::MatrixXd Z(nq, cache.nloc);
        for (int q = 0; q < nq; ++q) {
            Vec2 b = prob.beta(E.pts[q], T.region);
            Z.row(q) = b.x * Gx.row(q) + b.y * Gy.row(q);
        }
        for (int q = 0; q < nq; ++q) {
            double cc = prob.c(E.pts[q]);
            Z.row(q).head(cache.nb_tri) -= cc * E.dual.val.row(q);
        }
        Eigen::MatrixXd loc = E.prim.val.transpose() * E.w.asDiagonal() * Z;

        for (int mrow = 0; mrow < cache.nb_prim; ++mrow) {
            const int grow = cache.pspace.tri_offset(t) + mrow;
            for (int i = 0; i < cache.nb_tri; ++i)
                trip.emplace_back(grow, cache.wspace.tri_offset(t) + i, loc(mrow, i));
            for (int s = 0; s < 3; ++s) {
                const int off = cache.wspace.edge_offset[T.edge[s]];
                if (off < 0) continue;
                for (int l = 0; l < cache.nb_edge; ++l)
                    trip.emplace_back(grow, off + l, loc(mrow, cache.side_dof(s, l)));
            }
        }
    }
    Eigen::SparseMatrix<double> B(cache.pspace.total_dofs, cache.wspace.total_dofs);
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

Eigen::VectorXd assemble_rhs(const ElementCache& cache, const ProblemSpec& prob) {
    const Mesh& m = *cache.mesh;
    Eigen::VectorXd F = Eigen::VectorXd::Zero(cache.wspace.total_dofs);
    for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
        const ElementTables& E = cache.elems[t];
        const int reg = m.tris[t].region;
        for (int q = 0; q < static_cast<int>(E.pts.size()); ++q) {
            double wf = E.w[q] * prob.f(E.pts[q], reg);
            for (int i = 0; i < cache.nb_tri; ++i)
                F[cache.wspace.tri_offset(t) + i] -= wf * E.dual.val(q, i);
        }
    }
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        if (m.edges[e].tag != EdgeTag::Inflow) continue;
        const EdgeTables& E = cache.edge_tables[e];
        const int off = cache.wspace.edge_offset[e];
        const int reg = m.tris[m.edges[e].t0].region;
        for (int q = 0; q < static_cast<int>(E.pts.size()); ++q) {
            Vec2 b = prob.beta(E.pts[q], reg);
            double wf = E.w[q] * (b.x * E.n0.x + b.y * E.n0.y) * prob.g(E.pts[q]);
            for (int l = 0; l < cache.wspace.nb_edge; ++l)
                F[off + l] += wf * E.edge_val(q, l);
        }
    }
    return F;
}

double eval_s_nonlinear(const ElementCache& cache, const ProblemSpec& prob, const WeakField& lam,
                        const WeakField& sig, double p, double rho, double tau) {
    check_exponent(p);
    const Mesh& m = *cache.mesh;
    double acc = 0.0;
    for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
        const ElementTables& E = cache.elems[t];
        const int reg = m.tris[t].region;
        Eigen::VectorXd ll = gather_local(cache, lam, t);
        Eigen::VectorXd sl = gather_local(cache, sig, t);
        const double scale = rho * std::pow(E.geom.h, 1.0 - p);
        for (int s = 0; s < 3; ++s) {
            const SideTables& S = E.side[s];
            Eigen::MatrixXd d = side_mismatch(cache, S);
            Eigen::VectorXd lm(cache.nb_tri + cache.nb_edge), sm(cache.nb_tri + cache.nb_edge);
            lm.head(cache.nb_tri) = ll.head(cache.nb_tri);
            lm.tail(cache.nb_edge) = ll.segment(cache.side_dof(s, 0), cache.nb_edge);
            sm.head(cache.nb_tri) = sl.head(cache.nb_tri);
            sm.tail(cache.nb_edge) = sl.segment(cache.side_dof(s, 0), cache.nb_edge);
            Eigen::VectorXd dl = d * lm, ds = d * sm;
            for (int q = 0; q < dl.size(); ++q)
                acc += scale * S.w[q] * sgn(dl[q]) * std::pow(std::abs(dl[q]), p - 1.0) * ds[q];
        }
        if (tau > 0.0) {
            for (int q = 0; q < static_cast<int>(E.pts.size()); ++q) {
                Vec2 b = prob.beta(E.pts[q], reg);
                double cc = prob.c(E.pts[q]);
                double rl = 0.0, rs = 0.0;
                for (int i = 0; i < cache.nb_tri; ++i) {
                    double di = b.x * E.dual.gx(q, i) + b.y * E.dual.gy(q, i) -
                                cc * E.dual.val(q, i);
                    rl += ll[i] * di;
                    rs += sl[i] * di;
                }
                acc += tau * E.w[q] * sgn(rl) * std::pow(std::abs(rl), p - 1.0) * rs;
            }
        }
    }
    return acc;
}

}  // namespace pdwg
