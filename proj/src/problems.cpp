#include "pdwg/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pdwg {

namespace {

constexpr double kPi = std::numbers::pi;

int single_region(Vec2) { return 0; }
int split_antidiag(Vec2 p) { return p.x + p.y < 1.0 ? 0 : 1; }
int split_half_y(Vec2 p) { return p.y < 0.5 ? 0 : 1; }

double zero_src(Vec2, int) { return 0.0; }

// Attaches g = trace of the exact solution (regions touch the boundary only
// along interface endpoints, where the exact solutions agree).
void use_exact_trace(ProblemSpec& s) {
    s.g = [u = s.u, region = s.region](Vec2 p) { return u(p, region(p)); };
}

ProblemSpec make_t1() {
    ProblemSpec s;
    s.name = "t1";
    s.description = "rotating field about the origin, smooth solution";
    s.domain = DomainId::Square;
    s.region = single_region;
    s.beta = [](Vec2 p, int) { return Vec2{-p.y, p.x}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 1.0; };
    s.has_exact = true;
    s.u = [](Vec2 p, int) { return std::cos(kPi * p.x) * std::cos(kPi * p.y); };
    s.grad_u = [](Vec2 p, int) {
        return Vec2{-kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y),
                    -kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y)};
    };
    s.f = [](Vec2 p, int) {
        double cx = std::cos(kPi * p.x), sx = std::sin(kPi * p.x);
        double cy = std::cos(kPi * p.y), sy = std::sin(kPi * p.y);
        return kPi * p.y * sx * cy - kPi * p.x * cx * sy + cx * cy;
    };
    use_exact_trace(s);
    return s;
}

ProblemSpec make_t2() {
    ProblemSpec s;
    s.name = "t2";
    s.description = "rotating field about the square center, smooth solution";
    s.domain = DomainId::Square;
    s.region = single_region;
    s.beta = [](Vec2 p, int) { return Vec2{p.y - 0.5, 0.5 - p.x}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 1.0; };
    s.has_exact = true;
    s.u = [](Vec2 p, int) { return std::cos(kPi * p.x) * std::cos(kPi * p.y); };
    s.grad_u = [](Vec2 p, int) {
        return Vec2{-kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y),
                    -kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y)};
    };
    s.f = [](Vec2 p, int) {
        double cx = std::cos(kPi * p.x), sx = std::sin(kPi * p.x);
        double cy = std::cos(kPi * p.y), sy = std::sin(kPi * p.y);
        return -kPi * (p.y - 0.5) * sx * cy - kPi * (0.5 - p.x) * cx * sy + cx * cy;
    };
    use_exact_trace(s);
    return s;
}

ProblemSpec make_t3() {
    ProblemSpec s;
    s.name = "t3";
    s.description = "constant diagonal field with negative reaction";
    s.domain = DomainId::Square;
    s.region = single_region;
    s.beta = [](Vec2, int) { return Vec2{1.0, 1.0}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return -1.0; };
    s.has_exact = true;
    s.u = [](Vec2 p, int) { return std::cos(p.x) * std::sin(p.y); };
    s.grad_u = [](Vec2 p, int) {
        return Vec2{-std::sin(p.x) * std::sin(p.y), std::cos(p.x) * std::cos(p.y)};
    };
    s.f = [](Vec2 p, int) { return std::cos(p.x + p.y) - std::cos(p.x) * std::sin(p.y); };
    use_exact_trace(s);
    return s;
}

ProblemSpec make_t4() {
    ProblemSpec s;
    s.name = "t4";
    s.description = "constant anti-diagonal field, smooth solution";
    s.domain = DomainId::Square;
    s.region = single_region;
    s.beta = [](Vec2, int) { return Vec2{1.0, -1.0}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 1.0; };
    s.has_exact = true;
    s.u = [](Vec2 p, int) { return std::sin(kPi * p.x) * std::cos(kPi * p.y); };
    s.grad_u = [](Vec2 p, int) {
        return Vec2{kPi * std::cos(kPi * p.x) * std::cos(kPi * p.y),
                    -kPi * std::sin(kPi * p.x) * std::sin(kPi * p.y)};
    };
    s.f = [](Vec2 p, int) {
        double cx = std::cos(kPi * p.x), sx = std::sin(kPi * p.x);
        double cy = std::cos(kPi * p.y), sy = std::sin(kPi * p.y);
        return kPi * cx * cy + kPi * sx * sy + sx * cy;
    };
    use_exact_trace(s);
    return s;
}

ProblemSpec make_t5() {
    ProblemSpec s;
    s.name = "t5";
    s.description = "rotating field on the L-shaped domain, polynomial solution";
    s.domain = DomainId::LShape;
    s.region = single_region;
    s.beta = [](Vec2 p, int) { return Vec2{p.y - 0.5, 0.25 - p.x}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 1.0; };
    s.has_exact = true;
    auto w = [](double y) { return y * (1.0 - y) * (y - 0.25) * (y - 0.25); };
    auto dw = [](double y) { return (y - 0.25) * (-4.0 * y * y + 3.5 * y - 0.25); };
    s.u = [w](Vec2 p, int) { return p.x * (1.0 - p.x) * w(p.y); };
    s.grad_u = [w, dw](Vec2 p, int) {
        return Vec2{(1.0 - 2.0 * p.x) * w(p.y), p.x * (1.0 - p.x) * dw(p.y)};
    };
    s.f = [w, dw](Vec2 p, int) {
        double xf = p.x * (1.0 - p.x);
        return (p.y - 0.5) * (1.0 - 2.0 * p.x) * w(p.y) + (0.25 - p.x) * xf * dw(p.y) +
               xf * w(p.y);
    };
    use_exact_trace(s);
    return s;
}

ProblemSpec make_t6() {
    ProblemSpec s;
    s.name = "t6";
    s.description = "piecewise rotating field across the anti-diagonal";
    s.domain = DomainId::Square;
    s.mesh_diag = Diagonal::Anti;
    s.region = split_antidiag;
    s.beta = [](Vec2 p, int r) {
        return r == 0 ? Vec2{p.y + 1.0, -p.x - 1.0} : Vec2{p.y - 2.0, 2.0 - p.x};
    };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return -1.0; };
    s.has_exact = true;
    s.u = [](Vec2 p, int) { return std::sin(p.x) * std::cos(p.y); };
    s.grad_u = [](Vec2 p, int) {
        return Vec2{std::cos(p.x) * std::cos(p.y), -std::sin(p.x) * std::sin(p.y)};
    };
    s.f = [](Vec2 p, int r) {
        double cc = std::cos(p.x) * std::cos(p.y), ss = std::sin(p.x) * std::sin(p.y);
        double u = std::sin(p.x) * std::cos(p.y);
        if (r == 0) return (p.y + 1.0) * cc + (p.x + 1.0) * ss - u;
        return (p.y - 2.0) * cc - (2.0 - p.x) * ss - u;
    };
    use_exact_trace(s);
    return s;
}

ProblemSpec make_t7() {
    ProblemSpec s;
    s.name = "t7";
    s.description = "piecewise constant field on the L-shaped domain";
    s.domain = DomainId::LShape;
    s.mesh_diag = Diagonal::Anti;
    s.region = split_antidiag;
    s.beta = [](Vec2, int r) { return r == 0 ? Vec2{1.0, -1.0} : Vec2{-1.0, 1.0}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 1.0; };
    s.has_exact = true;
    s.u = [](Vec2 p, int) { return std::sin(p.x) * std::cos(p.y); };
    s.grad_u = [](Vec2 p, int) {
        return Vec2{std::cos(p.x) * std::cos(p.y), -std::sin(p.x) * std::sin(p.y)};
    };
    s.f = [](Vec2 p, int r) {
        double u = std::sin(p.x) * std::cos(p.y);
        double cd = std::cos(p.x - p.y);
        return r == 0 ? cd + u : -cd + u;
    };
    use_exact_trace(s);
    return s;
}

ProblemSpec make_t8() {
    ProblemSpec s;
    s.name = "t8";
    s.description = "piecewise field and solution joined continuously at y = 1/2";
    s.domain = DomainId::Square;
    s.region = split_half_y;
    s.beta = [](Vec2 p, int r) {
        return r == 0 ? Vec2{p.x - 2.0, 0.5 - p.y} : Vec2{2.0 - p.x, 0.5 - p.y};
    };
    s.div_beta = [](Vec2, int r) { return r == 0 ? 0.0 : -2.0; };
    s.c = [](Vec2) { return 0.0; };
    s.has_exact = true;
    s.u = [](Vec2 p, int r) {
        if (r == 0) return std::cos(p.y - 0.5) + std::sin(p.x + p.y);
        return 1.0 + std::sin(p.x + p.y);
    };
    s.grad_u = [](Vec2 p, int r) {
        double cxy = std::cos(p.x + p.y);
        if (r == 0) return Vec2{cxy, -std::sin(p.y - 0.5) + cxy};
        return Vec2{cxy, cxy};
    };
    s.f = [](Vec2 p, int r) {
        double cxy = std::cos(p.x + p.y);
        if (r == 0) return (p.x - p.y - 1.5) * cxy + (p.y - 0.5) * std::sin(p.y - 0.5);
        return (2.5 - p.x - p.y) * cxy - 2.0 * (1.0 + std::sin(p.x + p.y));
    };
    use_exact_trace(s);
    return s;
}

ProblemSpec make_f1() {
    ProblemSpec s;
    s.name = "f1";
    s.description = "discontinuous data transported from both side walls";
    s.domain = DomainId::Square;
    s.mesh_diag = Diagonal::Anti;
    s.region = split_antidiag;
    s.beta = [](Vec2, int r) { return r == 0 ? Vec2{1.0, -1.0} : Vec2{-2.0, 2.0}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 0.0; };
    s.f = zero_src;
    s.g = [](Vec2 p) { return p.x < 0.5 ? 1.0 : -1.0; };
    return s;
}

ProblemSpec make_f2() {
    ProblemSpec s;
    s.name = "f2";
    s.description = "piecewise rotating field with smooth inflow data";
    s.domain = DomainId::Square;
    s.mesh_diag = Diagonal::Anti;
    s.region = split_antidiag;
    s.beta = [](Vec2 p, int r) {
        return r == 0 ? Vec2{-p.y, p.x} : Vec2{1.0 - p.y, p.x - 1.0};
    };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 0.0; };
    s.f = zero_src;
    s.g = [](Vec2 p) { return std::sin(2.0 * p.x); };
    return s;
}

ProblemSpec make_f3() {
    ProblemSpec s;
    s.name = "f3";
    s.description = "closed rotating field with reaction";
    s.domain = DomainId::Square;
    s.region = single_region;
    s.beta = [](Vec2 p, int) { return Vec2{0.5 - p.y, p.x - 0.5}; };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 1.0; };
    s.f = zero_src;
    s.g = [](Vec2 p) { return std::cos(kPi * p.x) * std::cos(kPi * p.y); };
    return s;
}

ProblemSpec make_f4() {
    ProblemSpec s;
    s.name = "f4";
    s.description = "piecewise rotating field on the L-shaped domain";
    s.domain = DomainId::LShape;
    s.mesh_diag = Diagonal::Anti;
    s.region = split_antidiag;
    s.beta = [](Vec2 p, int r) {
        return r == 0 ? Vec2{p.y + 1.0, -p.x - 1.0} : Vec2{p.y - 2.0, 2.0 - p.x};
    };
    s.div_beta = [](Vec2, int) { return 0.0; };
    s.c = [](Vec2) { return 0.0; };
    s.f = zero_src;
    s.g = [](Vec2 p) { return std::cos(5.0 * p.y); };
    return s;
}

const std::vector<ProblemSpec>& registry() {
    static const std::vector<ProblemSpec> all = {
        make_t1(), make_t2(), make_t3(), make_t4(), make_t5(), make_t6(),
        make_t7(), make_t8(), make_f1(), make_f2(), make_f3(), make_f4(),
    };
    return all;
}

}  // namespace

std::vector<std::string> problem_names() {
    std::vector<std::string> names;
    for (const ProblemSpec& s : registry()) names.push_back(s.name);
    return names;
}

ProblemSpec get_problem(const std::string& name) {
    for (const ProblemSpec& s : registry())
        if (s.name == name) return s;
    throw std::invalid_argument("unknown problem: " + name);
}

ProblemSpec with_constant_f(ProblemSpec spec, double value) {
    spec.f = [value](Vec2, int) { return value; };
    return spec;
}

Mesh make_problem_mesh(const ProblemSpec& spec, int n) {
    Mesh m = spec.domain == DomainId::Square ? build_structured_square(n, spec.mesh_diag)
                                             : build_lshape(n, spec.mesh_diag);
    assign_regions(m, spec.region);
    classify_boundary(m, spec.beta);
    return m;
}

Mesh refine_problem_mesh(const Mesh& m, const ProblemSpec& spec) {
    Mesh r = refine_uniform(m);
    classify_boundary(r, spec.beta);
    return r;
}

}  // namespace pdwg
