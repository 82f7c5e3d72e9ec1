#include "pdwg/space.hpp"

namespace pdwg {

WeakSpace make_weak_space(const Mesh& m, int j) {
    if (j < 0) throw std::invalid_argument("weak space degree must be >= 0");
    WeakSpace s;
    s.mesh = &m;
    s.j = j;
    s.nb_tri = (j + 1) * (j + 2) / 2;
    s.nb_edge = j + 1;
    s.n_tri_dofs = static_cast<int>(m.tris.size()) * s.nb_tri;
    s.edge_offset.assign(m.edges.size(), -1);
    int off = s.n_tri_dofs;
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        if (m.edges[e].tag == EdgeTag::Outflow) continue;
        s.edge_offset[e] = off;
        off += s.nb_edge;
    }
    s.total_dofs = off;
    return s;
}

PrimalSpace make_primal_space(const Mesh& m, int k) {
    if (k < 1) throw std::invalid_argument("primal degree k must be >= 1");
    PrimalSpace s;
    s.mesh = &m;
    s.k = k;
    s.nb = k * (k + 1) / 2;
    s.total_dofs = static_cast<int>(m.tris.size()) * s.nb;
    return s;
}

namespace {

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& val, const Eigen::VectorXd& w) {
    return val.transpose() * w.asDiagonal() * val;
}

}  // namespace

ElementCache build_cache(const Mesh& m, int k, int j) {
    ElementCache c;
    c.mesh = &m;
    c.k = k;
    c.j = j;
    c.wspace = make_weak_space(m, j);
    c.pspace = make_primal_space(m, k);
    c.nb_tri = c.wspace.nb_tri;
    c.nb_edge = c.wspace.nb_edge;
    c.nb_prim = c.pspace.nb;
    c.nloc = c.nb_tri + 3 * c.nb_edge;
    c.tri_rule = tri_quadrature(2 * k + 4);
    c.edge_rule = edge_quadrature(k + 3);
    const int nq = static_cast<int>(c.tri_rule.pts.size());
    const int ne = static_cast<int>(c.edge_rule.s.size());
    const int nT = static_cast<int>(m.tris.size());

    c.elems.resize(nT);
    for (int t = 0; t < nT; ++t) {
        ElementTables& E = c.elems[t];
        E.geom = m.geom(t);
        E.dual_basis = make_tri_basis(E.geom, j);
        E.prim_basis = make_tri_basis(E.geom, k - 1);

        E.pts.resize(nq);
        E.w.resize(nq);
        for (int q = 0; q < nq; ++q) {
            E.pts[q] = E.geom.map(c.tri_rule.pts[q]);
            E.w[q] = 2.0 * E.geom.area * c.tri_rule.w[q];
        }
        E.dual = eval_basis(E.dual_basis, E.pts);
        E.prim = eval_basis(E.prim_basis, E.pts);
        E.dual_lap.resize(nq, c.nb_tri);
        std::vector<double> laps(c.nb_tri);
        for (int q = 0; q < nq; ++q) {
            E.dual_basis.eval_lap(E.pts[q], laps.data());
            for (int i = 0; i < c.nb_tri; ++i) E.dual_lap(q, i) = laps[i];
        }
        E.prim_gram.compute(weighted_gram(E.prim.val, E.w));
        E.dual_gram.compute(weighted_gram(E.dual.val, E.w));

        const MeshTri& T = m.tris[t];
        for (int s = 0; s < 3; ++s) {
            SideTables& S = E.side[s];
            Vec2 a = m.vertices[T.v[s]], b = m.vertices[T.v[(s + 1) % 3]];
            double len = m.edges[T.edge[s]].length;
            S.pts.resize(ne);
            S.w.resize(ne);
            std::vector<double> sc(ne);
            for (int q = 0; q < ne; ++q) {
                double sq = c.edge_rule.s[q];
                S.pts[q] = a + sq * (b - a);
                S.w[q] = len * c.edge_rule.w[q];
                sc[q] = T.reversed[s] ? 1.0 - sq : sq;
            }
            BasisTable tr = eval_basis(E.dual_basis, S.pts);
            S.dual_tr = tr.val;
            S.prim_tr = eval_basis(E.prim_basis, S.pts).val;
            S.edge_val = eval_basis(EdgeBasis{j}, sc);
        }

        // weak gradient operator: solve the vector Gram system against the
        // duality right-hand side for every local weak dof
        Eigen::MatrixXd Rx = Eigen::MatrixXd::Zero(c.nb_prim, c.nloc);
        Eigen::MatrixXd Ry = Eigen::MatrixXd::Zero(c.nb_prim, c.nloc);
        for (int i = 0; i < c.nb_tri; ++i)
            for (int mrow = 0; mrow < c.nb_prim; ++mrow) {
                double rx = 0.0, ry = 0.0;
                for (int q = 0; q < nq; ++q) {
                    rx -= E.w[q] * E.dual.val(q, i) * E.prim.gx(q, mrow);
                    ry -= E.w[q] * E.dual.val(q, i) * E.prim.gy(q, mrow);
                }
                Rx(mrow, i) = rx;
                Ry(mrow, i) = ry;
            }
        for (int s = 0; s < 3; ++s) {
            const SideTables& S = E.side[s];
            Vec2 n = T.normal[s];
            for (int l = 0; l < c.nb_edge; ++l) {
                int dof = c.side_dof(s, l);
                for (int mrow = 0; mrow < c.nb_prim; ++mrow) {
                    double v = 0.0;
                    for (int q = 0; q < ne; ++q)
                        v += S.w[q] * S.edge_val(q, l) * S.prim_tr(q, mrow);
                    Rx(mrow, dof) = n.x * v;
                    Ry(mrow, dof) = n.y * v;
                }
            }
        }
        E.wgrad.resize(2 * c.nb_prim, c.nloc);
        E.wgrad.topRows(c.nb_prim) = E.prim_gram.solve(Rx);
        E.wgrad.bottomRows(c.nb_prim) = E.prim_gram.solve(Ry);
    }

    const int nE = static_cast<int>(m.edges.size());
    c.edge_tables.resize(nE);
    for (int e = 0; e < nE; ++e) {
        const MeshEdge& ed = m.edges[e];
        EdgeTables& E = c.edge_tables[e];
        Vec2 a = m.vertices[ed.v0], b = m.vertices[ed.v1];
        E.pts.resize(ne);
        E.w.resize(ne);
        std::vector<double> sc(ne);
        for (int q = 0; q < ne; ++q) {
            double sq = c.edge_rule.s[q];
            E.pts[q] = a + sq * (b - a);
            E.w[q] = ed.length * c.edge_rule.w[q];
            sc[q] = sq;
        }
        E.edge_val = eval_basis(EdgeBasis{j}, sc);
        E.gram.compute(weighted_gram(E.edge_val, E.w));
        E.dual_tr0 = eval_basis(c.elems[ed.t0].dual_basis, E.pts).val;
        E.prim_tr0 = eval_basis(c.elems[ed.t0].prim_basis, E.pts).val;
        if (ed.t1 != -1) {
            E.dual_tr1 = eval_basis(c.elems[ed.t1].dual_basis, E.pts).val;
            E.prim_tr1 = eval_basis(c.elems[ed.t1].prim_basis, E.pts).val;
            E.he = 0.5 * (m.tris[ed.t0].h + m.tris[ed.t1].h);
        } else {
            E.he = m.tris[ed.t0].h;
        }
        const MeshTri& T0 = m.tris[ed.t0];
        for (int s = 0; s < 3; ++s)
            if (T0.edge[s] == e) E.n0 = T0.normal[s];
    }
    return c;
}

Eigen::VectorXd gather_local(const ElementCache& c, const WeakField& f, int t) {
    Eigen::VectorXd loc = Eigen::VectorXd::Zero(c.nloc);
    loc.head(c.nb_tri) = f.coeffs.segment(c.wspace.tri_offset(t), c.nb_tri);
    const MeshTri& T = c.mesh->tris[t];
    for (int s = 0; s < 3; ++s) {
        int off = c.wspace.edge_offset[T.edge[s]];
        if (off < 0) continue;
        loc.segment(c.side_dof(s, 0), c.nb_edge) = f.coeffs.segment(off, c.nb_edge);
    }
    return loc;
}

Eigen::VectorXd weak_gradient_local(const ElementCache& c, int t, const Eigen::VectorXd& local,
                                    int r) {
    if (r != c.k - 1) throw std::invalid_argument("weak gradient degree must be k-1");
    if (local.size() != c.nloc) throw std::invalid_argument("bad local coefficient size");
    return c.elems[t].wgrad * local;
}

WeakField project_Qh(const ElementCache& c, const ScalarFn& w) {
    WeakField f;
    f.space = &c.wspace;
    f.coeffs = Eigen::VectorXd::Zero(c.wspace.total_dofs);
    const int nT = static_cast<int>(c.mesh->tris.size());
    for (int t = 0; t < nT; ++t) {
        const ElementTables& E = c.elems[t];
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(c.nb_tri);
        for (int q = 0; q < E.w.size(); ++q) {
            double wv = E.w[q] * w(E.pts[q]);
            for (int i = 0; i < c.nb_tri; ++i) rhs[i] += wv * E.dual.val(q, i);
        }
        f.coeffs.segment(c.wspace.tri_offset(t), c.nb_tri) = E.dual_gram.solve(rhs);
    }
    for (int e = 0; e < static_cast<int>(c.mesh->edges.size()); ++e) {
        int off = c.wspace.edge_offset[e];
        if (off < 0) continue;
        const EdgeTables& E = c.edge_tables[e];
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(c.nb_edge);
        for (int q = 0; q < E.w.size(); ++q) {
            double wv = E.w[q] * w(E.pts[q]);
            for (int l = 0; l < c.nb_edge; ++l) rhs[l] += wv * E.edge_val(q, l);
        }
        f.coeffs.segment(off, c.nb_edge) = E.gram.solve(rhs);
    }
    return f;
}

PrimalField project_Mh(const ElementCache& c, const ScalarFn& w) {
    PrimalField f;
    f.space = &c.pspace;
    f.coeffs = Eigen::VectorXd::Zero(c.pspace.total_dofs);
    const int nT = static_cast<int>(c.mesh->tris.size());
    for (int t = 0; t < nT; ++t) {
        const ElementTables& E = c.elems[t];
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(c.nb_prim);
        for (int q = 0; q < E.w.size(); ++q) {
            double wv = E.w[q] * w(E.pts[q]);
            for (int i = 0; i < c.nb_prim; ++i) rhs[i] += wv * E.prim.val(q, i);
        }
        f.coeffs.segment(c.pspace.tri_offset(t), c.nb_prim) = E.prim_gram.solve(rhs);
    }
    return f;
}

double eval0(const ElementCache& c, const WeakField& f, int t, Vec2 p) {
    std::vector<double> vals(c.nb_tri);
    c.elems[t].dual_basis.eval(p, vals.data());
    double r = 0.0;
    for (int i = 0; i < c.nb_tri; ++i) r += vals[i] * f.coeffs[c.wspace.tri_offset(t) + i];
    return r;
}

Vec2 grad0(const ElementCache& c, const WeakField& f, int t, Vec2 p) {
    std::vector<Vec2> g(c.nb_tri);
    c.elems[t].dual_basis.eval_grad(p, g.data());
    Vec2 r{0.0, 0.0};
    for (int i = 0; i < c.nb_tri; ++i) {
        double co = f.coeffs[c.wspace.tri_offset(t) + i];
        r.x += co * g[i].x;
        r.y += co * g[i].y;
    }
    return r;
}

double evalb(const ElementCache& c, const WeakField& f, int e, double s_canonical) {
    int off = c.wspace.edge_offset[e];
    if (off < 0) return 0.0;
    std::vector<double> vals(c.nb_edge);
    EdgeBasis{c.j}.eval(s_canonical, vals.data());
    double r = 0.0;
    for (int l = 0; l < c.nb_edge; ++l) r += vals[l] * f.coeffs[off + l];
    return r;
}

double eval(const ElementCache& c, const PrimalField& f, int t, Vec2 p) {
    std::vector<double> vals(c.nb_prim);
    c.elems[t].prim_basis.eval(p, vals.data());
    double r = 0.0;
    for (int i = 0; i < c.nb_prim; ++i) r += vals[i] * f.coeffs[c.pspace.tri_offset(t) + i];
    return r;
}

}  // namespace pdwg
