#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pdwg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

using namespace pdwg;

namespace {

bool tri_contains(const Mesh& m, int t, Vec2 p, double tol = 1e-12) {
    const MeshTri& T = m.tris[t];
    Vec2 a = m.vertices[T.v[0]], b = m.vertices[T.v[1]], c = m.vertices[T.v[2]];
    double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    return l1 >= -tol && l2 >= -tol && l1 + l2 <= 1.0 + tol;
}

long key(double v) { return std::lround(v * 1e12); }

// multiset of triangles encoded by their sorted vertex coordinates
std::multiset<std::array<long, 6>> tri_signature(const Mesh& m) {
    std::multiset<std::array<long, 6>> sig;
    for (const MeshTri& T : m.tris) {
        std::array<std::pair<long, long>, 3> vs;
        for (int i = 0; i < 3; ++i)
            vs[i] = {key(m.vertices[T.v[i]].x), key(m.vertices[T.v[i]].y)};
        std::sort(vs.begin(), vs.end());
        sig.insert({vs[0].first, vs[0].second, vs[1].first, vs[1].second, vs[2].first,
                    vs[2].second});
    }
    return sig;
}

double total_area(const Mesh& m) {
    double a = 0.0;
    for (const MeshTri& T : m.tris) a += T.area;
    return a;
}

}  // namespace

TEST_CASE("structured square counts and measures") {
    for (int n : {1, 3, 8}) {
        Mesh m = build_structured_square(n);
        CHECK(static_cast<int>(m.vertices.size()) == (n + 1) * (n + 1));
        CHECK(static_cast<int>(m.tris.size()) == 2 * n * n);
        // Euler characteristic of a disk: V - E + F = 1
        CHECK(static_cast<int>(m.vertices.size() - m.edges.size() + m.tris.size()) == 1);
        CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(m.h == doctest::Approx(std::sqrt(2.0) / n));
        CHECK(m.inv_h_nominal == n);
        CHECK(m.structured);
        for (const MeshTri& T : m.tris) {
            CHECK(T.area == doctest::Approx(0.5 / (n * n)));
            CHECK(T.h == doctest::Approx(std::sqrt(2.0) / n));
        }
    }
    CHECK_THROWS_AS(build_structured_square(0), std::invalid_argument);
}

TEST_CASE("L-shape counts and measures") {
    Mesh m1 = build_lshape(1);
    CHECK(static_cast<int>(m1.tris.size()) == 6);
    CHECK(static_cast<int>(m1.vertices.size()) == 8);
    CHECK(m1.inv_h_nominal == 2);
    for (int n : {1, 4}) {
        Mesh m = build_lshape(n);
        CHECK(static_cast<int>(m.tris.size()) == 6 * n * n);
        CHECK(static_cast<int>(m.vertices.size()) == (2 * n + 1) * (2 * n + 1) - n * n);
        CHECK(static_cast<int>(m.vertices.size() - m.edges.size() + m.tris.size()) == 1);
        CHECK(total_area(m) == doctest::Approx(0.75).epsilon(1e-13));
        // uniform diameters: every element is a right triangle with legs 1/(2n)
        for (const MeshTri& T : m.tris) CHECK(T.h == doctest::Approx(std::sqrt(2.0) / (2 * n)));
        // no vertex inside the notch
        for (Vec2 v : m.vertices) CHECK(!(v.x > 0.5 + 1e-12 && v.y < 0.5 - 1e-12));
    }
    CHECK_THROWS_AS(build_lshape(0), std::invalid_argument);
}

TEST_CASE("edge connectivity and outward normals") {
    for (Diagonal d : {Diagonal::Anti, Diagonal::Main}) {
        Mesh m = build_structured_square(4, d);
        int boundary = 0;
        for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
            const MeshEdge& E = m.edges[e];
            CHECK(E.v0 < E.v1);
            Vec2 a = m.vertices[E.v0], b = m.vertices[E.v1];
            CHECK(E.length == doctest::Approx(norm(b - a)));
            CHECK(E.midpoint.x == doctest::Approx(0.5 * (a.x + b.x)));
            if (E.t1 == -1) {
                ++boundary;
                continue;
            }
            // shared-side normals from the two elements cancel
            int s0 = 0, s1 = 0;
            while (m.tris[E.t0].edge[s0] != e) ++s0;
            while (m.tris[E.t1].edge[s1] != e) ++s1;
            CHECK(norm(m.tris[E.t0].normal[s0] + m.tris[E.t1].normal[s1]) < 1e-14);
        }
        CHECK(boundary == 16);
        for (const MeshTri& T : m.tris)
            for (int s = 0; s < 3; ++s) {
                CHECK(norm(T.normal[s]) == doctest::Approx(1.0));
                // outward: points away from the centroid
                Vec2 mid = m.edges[T.edge[s]].midpoint;
                CHECK(dot(T.normal[s], mid - T.centroid) > 0.0);
            }
    }
}

TEST_CASE("diagonal orientation of the cell split") {
    Mesh anti = build_structured_square(2, Diagonal::Anti);
    Mesh main = build_structured_square(2, Diagonal::Main);
    CHECK(anti.diag == Diagonal::Anti);
    CHECK(main.diag == Diagonal::Main);
    // same vertex set, same total area, different triangles
    CHECK(anti.vertices.size() == main.vertices.size());
    CHECK(total_area(main) == doctest::Approx(1.0));
    CHECK(tri_signature(anti) != tri_signature(main));
    // anti: the first cell's lower triangle spans (0,0),(.5,0),(0,.5)
    CHECK(tri_contains(anti, 0, {0.1, 0.1}));
    CHECK(!tri_contains(anti, 0, {0.4, 0.4}));
    // main: the lower triangle spans (0,0),(.5,0),(.5,.5)
    CHECK(tri_contains(main, 0, {0.3, 0.1}));
    CHECK(!tri_contains(main, 0, {0.1, 0.3}));
}

TEST_CASE("uniform refinement reproduces the finer structured grid") {
    for (Diagonal d : {Diagonal::Anti, Diagonal::Main}) {
        for (int n : {2, 4}) {
            Mesh fine = build_structured_square(2 * n, d);
            Mesh ref = refine_uniform(build_structured_square(n, d));
            CHECK(ref.diag == d);
            CHECK(!ref.structured);
            CHECK(ref.inv_h_nominal == 2 * n);
            CHECK(ref.vertices.size() == fine.vertices.size());
            CHECK(tri_signature(ref) == tri_signature(fine));
        }
        Mesh lfine = build_lshape(4, d);
        Mesh lref = refine_uniform(build_lshape(2, d));
        CHECK(tri_signature(lref) == tri_signature(lfine));
    }
}

TEST_CASE("refinement inherits regions") {
    Mesh m = build_structured_square(4);
    assign_regions(m, [](Vec2 p) { return p.x + p.y < 1.0 ? 0 : 1; });
    Mesh r = refine_uniform(m);
    for (const MeshTri& T : r.tris) {
        int expect = T.centroid.x + T.centroid.y < 1.0 ? 0 : 1;
        CHECK(T.region == expect);
    }
}

TEST_CASE("boundary classification by the convection direction") {
    auto count_tags = [](const Mesh& m) {
        std::map<EdgeTag, int> c;
        for (const MeshEdge& E : m.edges) ++c[E.tag];
        return c;
    };
    auto tag_at = [](const Mesh& m, Vec2 p) {
        for (const MeshEdge& E : m.edges)
            if (std::abs(E.midpoint.x - p.x) < 1e-12 && std::abs(E.midpoint.y - p.y) < 1e-12)
                return E.tag;
        throw std::logic_error("edge not found");
    };

    Mesh m = build_structured_square(4);

    classify_boundary(m, [](Vec2, int) { return Vec2{1.0, 1.0}; });
    auto c = count_tags(m);
    CHECK(c[EdgeTag::Inflow] == 8);  // left and bottom walls
    CHECK(c[EdgeTag::Outflow] == 8);
    CHECK(tag_at(m, {0.0, 0.125}) == EdgeTag::Inflow);
    CHECK(tag_at(m, {0.125, 0.0}) == EdgeTag::Inflow);
    CHECK(tag_at(m, {1.0, 0.125}) == EdgeTag::Outflow);
    CHECK(tag_at(m, {0.125, 1.0}) == EdgeTag::Outflow);

    classify_boundary(m, [](Vec2, int) { return Vec2{1.0, -1.0}; });
    CHECK(tag_at(m, {0.0, 0.125}) == EdgeTag::Inflow);   // left
    CHECK(tag_at(m, {0.125, 1.0}) == EdgeTag::Inflow);   // top
    CHECK(tag_at(m, {1.0, 0.125}) == EdgeTag::Outflow);
    CHECK(tag_at(m, {0.125, 0.0}) == EdgeTag::Outflow);

    classify_boundary(m, [](Vec2 p, int) { return Vec2{-p.y, p.x}; });
    CHECK(tag_at(m, {0.125, 0.0}) == EdgeTag::Inflow);   // bottom, beta.n = -x
    CHECK(tag_at(m, {1.0, 0.125}) == EdgeTag::Inflow);   // right, beta.n = -y
    CHECK(tag_at(m, {0.125, 1.0}) == EdgeTag::Outflow);
    CHECK(tag_at(m, {0.0, 0.125}) == EdgeTag::Outflow);

    // a vanishing field leaves every boundary edge outflow
    classify_boundary(m, [](Vec2, int) { return Vec2{0.0, 0.0}; });
    c = count_tags(m);
    CHECK(c[EdgeTag::Outflow] == 16);
    CHECK(c[EdgeTag::Inflow] == 0);
    // interior edges keep the interior tag under every classification
    for (const MeshEdge& E : m.edges)
        if (E.t1 != -1) CHECK(E.tag == EdgeTag::Interior);
}

TEST_CASE("point location on the square") {
    for (Diagonal d : {Diagonal::Anti, Diagonal::Main}) {
        Mesh m = build_structured_square(8, d);
        for (Vec2 p : {Vec2{0.3, 0.7}, Vec2{0.01, 0.99}, Vec2{0.62, 0.62}, Vec2{1.0, 1.0},
                       Vec2{0.0, 0.0}, Vec2{0.5, 0.5}}) {
            int t = locate(m, p);
            REQUIRE(t >= 0);
            CHECK(tri_contains(m, t, p));
        }
        CHECK(locate(m, {-0.1, 0.5}) == -1);
        CHECK(locate(m, {0.5, 1.2}) == -1);
        // deterministic: repeated queries agree
        CHECK(locate(m, {0.25, 0.25}) == locate(m, {0.25, 0.25}));
    }
    Mesh r = refine_uniform(build_structured_square(4));
    CHECK_THROWS_AS(locate(r, {0.5, 0.5}), std::logic_error);
}

TEST_CASE("point location on the L-shape skips the notch") {
    Mesh m = build_lshape(2);
    CHECK(locate(m, {0.75, 0.25}) == -1);  // inside the notch
    CHECK(locate(m, {0.9, 0.1}) == -1);
    for (Vec2 p : {Vec2{0.25, 0.25}, Vec2{0.75, 0.75}, Vec2{0.25, 0.75}, Vec2{1.0, 1.0}}) {
        int t = locate(m, p);
        REQUIRE(t >= 0);
        CHECK(tri_contains(m, t, p));
    }
    // points on the notch boundary resolve to the present side
    for (Vec2 p : {Vec2{0.5, 0.25}, Vec2{0.75, 0.5}, Vec2{0.5, 0.5}}) {
        int t = locate(m, p);
        REQUIRE(t >= 0);
        CHECK(tri_contains(m, t, p));
    }
}

TEST_CASE("geom accessor matches stored metadata") {
    Mesh m = build_lshape(2);
    for (int t = 0; t < static_cast<int>(m.tris.size()); ++t) {
        TriGeom g = m.geom(t);
        CHECK(g.area == doctest::Approx(m.tris[t].area));
        CHECK(g.h == doctest::Approx(m.tris[t].h));
        CHECK(g.centroid.x == doctest::Approx(m.tris[t].centroid.x));
    }
}
