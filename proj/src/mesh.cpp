#include "pdwg/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace pdwg {

namespace {

// Computes per-triangle geometry, the edge set, adjacency, and normals.
void finalize(Mesh& m) {
    m.edges.clear();
    std::map<std::pair<int, int>, int> edge_of;
    m.h = 0.0;
    for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
        MeshTri& T = m.tris[t];
        TriGeom g = make_tri_geom(m.vertices[T.v[0]], m.vertices[T.v[1]], m.vertices[T.v[2]]);
        T.h = g.h;
        T.area = g.area;
        T.centroid = g.centroid;
        m.h = std::max(m.h, g.h);
        for (int s = 0; s < 3; ++s) {
            int a = T.v[s], b = T.v[(s + 1) % 3];
            auto key = std::minmax(a, b);
            auto it = edge_of.find(key);
            int e;
            if (it == edge_of.end()) {
                e = static_cast<int>(m.edges.size());
                edge_of.emplace(key, e);
                MeshEdge E;
                E.v0 = key.first;
                E.v1 = key.second;
                E.t0 = t;
                Vec2 pa = m.vertices[E.v0], pb = m.vertices[E.v1];
                E.length = norm(pb - pa);
                E.midpoint = {0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
                m.edges.push_back(E);
            } else {
                e = it->second;
                MeshEdge& E = m.edges[e];
                if (E.t1 != -1) throw std::runtime_error("non-conforming mesh: edge with >2 triangles");
                E.t1 = t;
            }
            T.edge[s] = e;
            T.reversed[s] = a > b;
            Vec2 ev = m.vertices[b] - m.vertices[a];
            double len = norm(ev);
            T.normal[s] = {ev.y / len, -ev.x / len};
        }
    }
    for (MeshEdge& E : m.edges)
        if (E.t1 == -1) E.tag = EdgeTag::Outflow;  // boundary default until classified
}

void split_cell(Mesh& m, int v00, int v10, int v01, int v11, Diagonal diag) {
    // both children counterclockwise; "lo" is the one touching v10
    MeshTri lo, hi;
    if (diag == Diagonal::Anti) {  // cut from v10 to v01
        lo.v = {v00, v10, v01};
        hi.v = {v10, v11, v01};
    } else {  // cut from v00 to v11
        lo.v = {v00, v10, v11};
        hi.v = {v00, v11, v01};
    }
    m.cell2tri.push_back(static_cast<int>(m.tris.size()));
    m.tris.push_back(lo);
    m.cell2tri.push_back(static_cast<int>(m.tris.size()));
    m.tris.push_back(hi);
}

}  // namespace

Mesh build_structured_square(int n, Diagonal diag) {
    if (n < 1) throw std::invalid_argument("build_structured_square: n must be >= 1");
    Mesh m;
    m.domain = DomainId::Square;
    m.inv_h_nominal = n;
    m.structured = true;
    m.grid_n = n;
    m.diag = diag;
    m.vertices.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    m.cell2tri.reserve(2 * n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int v00 = j * (n + 1) + i;
            split_cell(m, v00, v00 + 1, v00 + n + 1, v00 + n + 2, diag);
        }
    finalize(m);
    return m;
}

Mesh build_lshape(int n, Diagonal diag) {
    if (n < 1) throw std::invalid_argument("build_lshape: n must be >= 1");
    Mesh m;
    m.domain = DomainId::LShape;
    m.inv_h_nominal = 2 * n;
    m.structured = true;
    m.grid_n = 2 * n;
    m.diag = diag;
    const int g = 2 * n;
    const double s = 0.5 / n;
    // grid vertices outside the notch (x > 0.5, y < 0.5)
    std::vector<int> vid((g + 1) * (g + 1), -1);
    for (int j = 0; j <= g; ++j)
        for (int i = 0; i <= g; ++i) {
            if (i > n && j < n) continue;
            vid[j * (g + 1) + i] = static_cast<int>(m.vertices.size());
            m.vertices.push_back({i * s, j * s});
        }
    for (int j = 0; j < g; ++j)
        for (int i = 0; i < g; ++i) {
            if (i >= n && j < n) {  // cell inside the notch
                m.cell2tri.push_back(-1);
                m.cell2tri.push_back(-1);
                continue;
            }
            int v00 = vid[j * (g + 1) + i];
            int v10 = vid[j * (g + 1) + i + 1];
            int v01 = vid[(j + 1) * (g + 1) + i];
            int v11 = vid[(j + 1) * (g + 1) + i + 1];
            split_cell(m, v00, v10, v01, v11, diag);
        }
    finalize(m);
    return m;
}

Mesh refine_uniform(const Mesh& parent) {
    Mesh m;
    m.domain = parent.domain;
    m.diag = parent.diag;
    m.inv_h_nominal = 2 * parent.inv_h_nominal;
    m.structured = false;
    m.vertices = parent.vertices;
    const int nv = static_cast<int>(parent.vertices.size());
    m.vertices.resize(nv + parent.edges.size());
    for (int e = 0; e < static_cast<int>(parent.edges.size()); ++e)
        m.vertices[nv + e] = parent.edges[e].midpoint;
    m.tris.reserve(4 * parent.tris.size());
    for (const MeshTri& T : parent.tris) {
        int a = T.v[0], b = T.v[1], c = T.v[2];
        int mab = nv + T.edge[0], mbc = nv + T.edge[1], mca = nv + T.edge[2];
        MeshTri child;
        child.region = T.region;
        child.v = {a, mab, mca};
        m.tris.push_back(child);
        child.v = {mab, b, mbc};
        m.tris.push_back(child);
        child.v = {mca, mbc, c};
        m.tris.push_back(child);
        child.v = {mab, mbc, mca};
        m.tris.push_back(child);
    }
    finalize(m);
    return m;
}

void assign_regions(Mesh& m, const RegionFn& region) {
    for (MeshTri& T : m.tris) T.region = region(T.centroid);
}

void classify_boundary(Mesh& m, const VectorField& beta) {
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        MeshEdge& E = m.edges[e];
        if (E.t1 != -1) {
            E.tag = EdgeTag::Interior;
            continue;
        }
        const MeshTri& T = m.tris[E.t0];
        int s = 0;
        while (T.edge[s] != e) ++s;
        Vec2 b = beta(E.midpoint, T.region);
        E.tag = dot(b, T.normal[s]) < 0.0 ? EdgeTag::Inflow : EdgeTag::Outflow;
    }
}

void dump_csv(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[128];
    out << "vertex,x,y\n";
    for (int i = 0; i < static_cast<int>(m.vertices.size()); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", i, m.vertices[i].x, m.vertices[i].y);
        out << buf;
    }
    out << "triangle,v0,v1,v2,region\n";
    for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
        const MeshTri& T = m.tris[t];
        out << t << ',' << T.v[0] << ',' << T.v[1] << ',' << T.v[2] << ',' << T.region << '\n';
    }
    out << "edge,v0,v1,t0,t1,tag\n";
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
        const MeshEdge& E = m.edges[e];
        const char* tag = E.tag == EdgeTag::Interior ? "interior"
                        : E.tag == EdgeTag::Inflow   ? "inflow"
                                                     : "outflow";
        out << e << ',' << E.v0 << ',' << E.v1 << ',' << E.t0 << ',' << E.t1 << ',' << tag << '\n';
    }
}

int locate(const Mesh& m, Vec2 p) {
    if (!m.structured) throw std::logic_error("locate: mesh lacks structured metadata");
    const int g = m.grid_n;
    const double tol = 1e-12;
    double ext = m.domain == DomainId::Square ? 1.0 : 1.0;  // both domains span [0,1]^2
    if (p.x < -tol || p.x > ext + tol || p.y < -tol || p.y > ext + tol) return -1;
    double gx = std::min(std::max(p.x, 0.0), ext) * g / ext;
    double gy = std::min(std::max(p.y, 0.0), ext) * g / ext;
    int i = std::min(static_cast<int>(gx), g - 1);
    int j = std::min(static_cast<int>(gy), g - 1);
    // points on a grid line bordering an absent cell belong to the present neighbor
    if (m.cell2tri[2 * (j * g + i)] < 0) {
        if (gx - i <= tol * g && i > 0 && m.cell2tri[2 * (j * g + i - 1)] >= 0) --i;
        else if (gy - j <= tol * g && j > 0 && m.cell2tri[2 * ((j - 1) * g + i)] >= 0) --j;
    }
    int lo = m.cell2tri[2 * (j * g + i)];
    if (lo < 0) return -1;
    double lx = gx - i, ly = gy - j;
    bool lower = m.diag == Diagonal::Anti ? lx + ly <= 1.0 : ly <= lx;
    return lower ? lo : m.cell2tri[2 * (j * g + i) + 1];
}

}  // namespace pdwg
