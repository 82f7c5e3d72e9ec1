#include "pdwg/poly.hpp"

#include <cmath>

namespace pdwg {

TriGeom make_tri_geom(Vec2 a, Vec2 b, Vec2 c) {
    TriGeom g;
    g.v0 = a;
    g.v1 = b;
    g.v2 = c;
    double twice = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    double e0 = norm(b - a), e1 = norm(c - b), e2 = norm(a - c);
    g.h = std::max({e0, e1, e2});
    if (!(twice > 1e-14 * g.h * g.h))
        throw std::invalid_argument("degenerate or clockwise triangle");
    g.area = 0.5 * twice;
    g.centroid = {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
    return g;
}

namespace {

void add_center(QuadRuleTri& r, double w) {
    r.pts.push_back({1.0 / 3.0, 1.0 / 3.0});
    r.w.push_back(0.5 * w);
}

// three-point orbit: (b,c),(a,b),(c,a) with b=a, c=1-2a
void add3(QuadRuleTri& r, double a, double w) {
    double b = a, c = 1.0 - 2.0 * a;
    r.pts.push_back({b, c});
    r.pts.push_back({a, b});
    r.pts.push_back({c, a});
    for (int i = 0; i < 3; ++i) r.w.push_back(0.5 * w);
}

// six-point orbit: all permutations of (a,b,c) with c=1-a-b
void add6(QuadRuleTri& r, double a, double b, double w) {
    double c = 1.0 - a - b;
    r.pts.push_back({b, c});
    r.pts.push_back({c, b});
    r.pts.push_back({a, c});
    r.pts.push_back({c, a});
    r.pts.push_back({a, b});
    r.pts.push_back({b, a});
    for (int i = 0; i < 6; ++i) r.w.push_back(0.5 * w);
}

QuadRuleTri build_tri_rule(int degree) {
    QuadRuleTri r;
    r.exactness = degree;
    switch (degree) {
        case 1:
            add_center(r, 1.0);
            break;
        case 2:
            add3(r, 1.0 / 6.0, 1.0 / 3.0);
            break;
        case 4:
            add3(r, 0.44594849091596488631832925388305, 0.22338158967801146569500700843312);
            add3(r, 0.09157621350977074345957146340220, 0.10995174365532186763832632490021);
            break;
        case 5:
            add_center(r, 0.22500000000000000000000000000000);
            add3(r, 0.47014206410511508977044120951345, 0.13239415278850618073764938783315);
            add3(r, 0.10128650732345633880098736191512, 0.12593918054482715259568394550018);
            break;
        case 6:
            add3(r, 0.24928674517091042129163855310702, 0.11678627572637936602528961138558);
            add3(r, 0.06308901449150222834033160287082, 0.05084490637020681692093680910686);
            add6(r, 0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
                 0.08285107561837357519355345642044);
            break;
        case 8:
            add_center(r, 0.14431560767778716825109111048906);
            add3(r, 0.17056930775176020662229350149146, 0.10321737053471825028179155029212);
            add3(r, 0.05054722831703097545842355059660, 0.03245849762319808031092592834178);
            add3(r, 0.45929258829272315602881551449417, 0.09509163426728462479389610438858);
            add6(r, 0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
                 0.02723031417443499426484469007390);
            break;
        case 10:
            add_center(r, 0.090817990382754);
            add3(r, 0.485577633383657, 0.036725957756467);
            add3(r, 0.109481575485037, 0.045321059435528);
            add6(r, 0.141707219414880, 0.307939838764121, 0.072757916845420);
            add6(r, 0.025003534762686, 0.246672560639903, 0.028327242531057);
            add6(r, 0.009540815400299, 0.066803251012200, 0.009421666963733);
            break;
        case 12:
            add3(r, 0.488217389773805, 0.025731066440455);
            add3(r, 0.439724392294460, 0.043692544538038);
            add3(r, 0.271210385012116, 0.062858224217885);
            add3(r, 0.127576145541586, 0.034796112930709);
            add3(r, 0.021317350453210, 0.006166261051559);
            add6(r, 0.115343494534698, 0.275713269685514, 0.040371557766381);
            add6(r, 0.022838332222257, 0.281325580989940, 0.022356773202303);
            add6(r, 0.025734050548330, 0.116251915907597, 0.017316231108659);
            break;
        default:
            throw std::invalid_argument("unsupported triangle quadrature degree");
    }
    return r;
}

}  // namespace

QuadRuleTri tri_quadrature(int exactness) {
    if (exactness < 1) throw std::invalid_argument("quadrature exactness must be >= 1");
    // Rules of degrees 3 and 7 in the classical tables carry negative weights
    // and 9/11 have less favorable point sets, so requests are mapped up to
    // the next shipped positive rule.
    static const int shipped[] = {1, 2, 4, 5, 6, 8, 10, 12};
    for (int d : shipped)
        if (d >= exactness) return build_tri_rule(d);
    throw std::invalid_argument("unsupported triangle quadrature degree");
}

QuadRule1D edge_quadrature(int points) {
    if (points < 1 || points > 30) throw std::invalid_argument("unsupported edge quadrature size");
    QuadRule1D r;
    r.exactness = 2 * points - 1;
    const int n = points;
    r.s.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration for the i-th root of the Legendre polynomial P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.s[i] = 0.5 * (1.0 - x);  // roots found in descending x order
        r.s[n - 1 - i] = 0.5 * (1.0 + x);
        r.w[i] = 0.5 * w;
        r.w[n - 1 - i] = 0.5 * w;
    }
    if (n == 1) {
        r.s[0] = 0.5;
        r.w[0] = 1.0;
    }
    return r;
}

void TriBasis::eval(Vec2 p, double* vals) const {
    double xi = (p.x - center.x) / scale;
    double eta = (p.y - center.y) / scale;
    double px[16], py[16];
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= degree; ++i) {
        px[i] = px[i - 1] * xi;
        py[i] = py[i - 1] * eta;
    }
    int idx = 0;
    for (int d = 0; d <= degree; ++d)
        for (int a = d; a >= 0; --a) vals[idx++] = px[a] * py[d - a];
}

void TriBasis::eval_grad(Vec2 p, Vec2* grads) const {
    double xi = (p.x - center.x) / scale;
    double eta = (p.y - center.y) / scale;
    double px[16], py[16];
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= degree; ++i) {
        px[i] = px[i - 1] * xi;
        py[i] = py[i - 1] * eta;
    }
    int idx = 0;
    for (int d = 0; d <= degree; ++d)
        for (int a = d; a >= 0; --a) {
            int b = d - a;
            double gx = a > 0 ? a * px[a - 1] * py[b] / scale : 0.0;
            double gy = b > 0 ? b * px[a] * py[b - 1] / scale : 0.0;
            grads[idx++] = {gx, gy};
        }
}

void TriBasis::eval_lap(Vec2 p, double* laps) const {
    double xi = (p.x - center.x) / scale;
    double eta = (p.y - center.y) / scale;
    double px[16], py[16];
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= degree; ++i) {
        px[i] = px[i - 1] * xi;
        py[i] = py[i - 1] * eta;
    }
    double s2 = scale * scale;
    int idx = 0;
    for (int d = 0; d <= degree; ++d)
        for (int a = d; a >= 0; --a) {
            int b = d - a;
            double lxx = a > 1 ? a * (a - 1) * px[a - 2] * py[b] / s2 : 0.0;
            double lyy = b > 1 ? b * (b - 1) * px[a] * py[b - 2] / s2 : 0.0;
            laps[idx++] = lxx + lyy;
        }
}

TriBasis make_tri_basis(const TriGeom& geom, int degree) {
    if (degree < 0 || degree > 14) throw std::invalid_argument("unsupported basis degree");
    return TriBasis{degree, geom.centroid, geom.h};
}

void EdgeBasis::eval(double s, double* vals) const {
    double t = s - 0.5;
    vals[0] = 1.0;
    for (int i = 1; i <= degree; ++i) vals[i] = vals[i - 1] * t;
}

BasisTable eval_basis(const TriBasis& basis, const std::vector<Vec2>& pts) {
    const int nb = basis.count();
    const int np = static_cast<int>(pts.size());
    BasisTable t;
    t.val.resize(np, nb);
    t.gx.resize(np, nb);
    t.gy.resize(np, nb);
    std::vector<double> vals(nb);
    std::vector<Vec2> grads(nb);
    for (int q = 0; q < np; ++q) {
        basis.eval(pts[q], vals.data());
        basis.eval_grad(pts[q], grads.data());
        for (int i = 0; i < nb; ++i) {
            t.val(q, i) = vals[i];
            t.gx(q, i) = grads[i].x;
            t.gy(q, i) = grads[i].y;
        }
    }
    return t;
}

Eigen::MatrixXd eval_basis(const EdgeBasis& basis, const std::vector<double>& s) {
    const int nb = basis.count();
    const int np = static_cast<int>(s.size());
    Eigen::MatrixXd val(np, nb);
    std::vector<double> vals(nb);
    for (int q = 0; q < np; ++q) {
        basis.eval(s[q], vals.data());
        for (int i = 0; i < nb; ++i) val(q, i) = vals[i];
    }
    return val;
}

}  // namespace pdwg
