#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "moebius.hpp"

// Labelled ideal polygon data: alphabet with involution and cyclic order,
// side-pairing generators, boundary arcs, cusp representatives and
// per-vertex charts.

namespace cuspdim {

using Letter = int;

struct Alphabet {
    int d = 0;                 // 2d letters in total
    std::vector<Letter> hat;   // involution
    std::vector<int> order;    // clockwise cyclic position mod 2d
    std::vector<std::string> label;
    std::vector<Letter> letter_at;  // inverse of order

    int size() const { return 2 * d; }

    void build_inverse() {
        letter_at.assign(size(), -1);
        for (Letter a = 0; a < size(); ++a) letter_at[order[a]] = a;
    }

    Letter successor(Letter a) const { return letter_at[(order[a] + 1) % size()]; }
    int order_diff(Letter x, Letter y) const {  // o(x) - o(y) reduced to (-d, d]
        int diff = ((order[x] - order[y]) % size() + size()) % size();
        if (diff > d) diff -= size();
        return diff;
    }
};

// right-open boundary arc, stored through its endpoints and their angles
struct Arc {
    cplx left;     // contained endpoint (counterclockwise end)
    cplx right;    // excluded endpoint (clockwise end)
    double theta_right;          // angle of the excluded end in [0, 2pi)
    double width;                // positive angular width, arc = (theta_right, theta_right+width]
    cplx midpoint() const {
        double t = theta_right + 0.5 * width;
        return {std::cos(t), std::sin(t)};
    }
};

inline double angle_of(cplx z) {
    double t = std::arg(z);
    if (t < 0) t += 2 * kPi;
    return t;
}

struct CuspClass {
    RealMoebius rep;   // A_k with z_k = A_k * infinity
    ExtendedPoint point;
    double width = 0;  // translation length of the primitive parabolic at the cusp
};

struct VertexData {
    cplx xi;            // disc boundary position
    ExtendedPoint zeta;  // half-plane position
    RealMoebius B;       // zeta = B * A_k * infinity
    int cusp = 0;
};

struct CheckResult {
    std::string name;
    bool pass = true;
    bool applicable = true;
    double slack = 0;
    std::string note;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool ok = true;

    void add(CheckResult c) {
        if (c.applicable && !c.pass) ok = false;
        checks.push_back(std::move(c));
    }
};

class GroupPresentation {
public:
    std::string name;
    Alphabet alphabet;
    std::vector<RealMoebius> gen_h;   // F_a acting on the half plane
    std::vector<DiscMoebius> gen_d;   // the same in the disc model
    std::vector<Arc> arc;             // [a], indexed by letter
    std::vector<CuspClass> cusps;
    std::vector<VertexData> vertices;
    bool ford = true;  // whether sides coincide with isometric circles

    double max_cusp_width() const {
        double m = 0;
        for (const auto& c : cusps) m = std::max(m, c.width);
        return m;
    }

    std::vector<RealMoebius> cusp_reps() const {
        std::vector<RealMoebius> v;
        for (const auto& c : cusps) v.push_back(c.rep);
        return v;
    }

    // letter whose right-open arc contains the boundary point
    Letter locate(cplx xi) const {
        double t = angle_of(xi);
        for (Letter a = 0; a < alphabet.size(); ++a) {
            const Arc& J = arc[a];
            double rel = t - J.theta_right;
            while (rel < 0) rel += 2 * kPi;
            while (rel >= 2 * kPi) rel -= 2 * kPi;
            // right open: the clockwise endpoint is excluded, the other included
            if (rel > 1e-12 && rel <= J.width + 1e-12) {
                if (rel > J.width) continue;  // inside the guard band of the next arc
                return a;
            }
            if (rel <= 1e-12 || rel >= 2 * kPi - 1e-12) {
                // on the excluded endpoint: belongs to the clockwise neighbour,
                // which owns this point as its contained endpoint
                continue;
            }
        }
        // fall back: snap to nearest arc by angle (numerical corner case)
        for (Letter a = 0; a < alphabet.size(); ++a) {
            double rel = t - arc[a].theta_right;
            while (rel < 0) rel += 2 * kPi;
            if (rel <= arc[a].width + 1e-9) return a;
        }
        throw std::runtime_error("locate: boundary arcs do not cover the point");
    }

    const VertexData* find_vertex(cplx xi, double tol = 1e-8) const {
        for (const auto& v : vertices)
            if (std::abs(v.xi - xi) < tol) return &v;
        return nullptr;
    }

    // chart sending the given polygon vertex to infinity in the half plane,
    // well defined up to a horizontal translation
    RealMoebius vertex_at_infinity_chart(const ExtendedPoint& vertex) const {
        cplx xi;
        if (vertex.model == Model::Disc) {
            xi = vertex.z / std::abs(vertex.z);
        } else {
            xi = cayley(vertex).z;
        }
        const VertexData* v = find_vertex(xi);
        if (!v) throw std::domain_error("vertex not recognized");
        return (v->B * cusps[v->cusp].rep).inverse();
    }
};

namespace detail {

inline ExtendedPoint hp_point(double x) { return ExtendedPoint::half_plane(x); }

struct PolygonSpec {
    std::string name;
    // polygon vertices on the half-plane boundary in cyclic order; NaN = infinity
    std::vector<std::optional<double>> hp_vertices;
    // side i joins vertex i to vertex i+1 and carries this letter label
    std::vector<std::string> side_letter;
    // labels come in pairs (label, hat label); matrix given for one of each pair
    std::map<std::string, std::string> hat_of;
    std::map<std::string, RealMoebius> matrix_of;  // for every letter (derived ones too)
    std::vector<RealMoebius> cusp_reps;
    // per polygon vertex: (B, k) with vertex = B * A_k * infinity
    std::vector<std::pair<RealMoebius, int>> vertex_charts;
};

// translation length of the primitive parabolic fixing infinity in A^{-1} Gamma A;
// found by conjugating the parabolic vertex-cycle element through the chart.
inline double cusp_width_from(const RealMoebius& chart, const RealMoebius& parab) {
    RealMoebius c = chart * parab * chart.inverse();
    c.renormalize();
    double a = c.a < 0 ? -c.a : c.a;
    if (std::abs(std::abs(c.a) - 1.0) > 1e-8 || std::abs(c.c) > 1e-8)
        throw std::runtime_error("cusp width: conjugated element is not a translation");
    (void)a;
    return std::abs(c.b / c.a);
}

GroupPresentation build(const PolygonSpec& spec);

}  // namespace detail

// ---------------------------------------------------------------------------
// validation

inline ValidationReport validate(const GroupPresentation& g) {
    ValidationReport rep;
    const int n = g.alphabet.size();

    {  // hat is an involution exchanging the two halves
        CheckResult c{"alphabet_involution"};
        for (Letter a = 0; a < n; ++a) {
            if (g.alphabet.hat[a] == a || g.alphabet.hat[g.alphabet.hat[a]] != a) c.pass = false;
        }
        rep.add(c);
    }
    {  // o is a bijection onto Z/2d
        CheckResult c{"cyclic_order_bijection"};
        std::set<int> seen;
        for (Letter a = 0; a < n; ++a) seen.insert(((g.alphabet.order[a] % n) + n) % n);
        c.pass = (int(seen.size()) == n);
        rep.add(c);
    }
    {  // generators unimodular
        CheckResult c{"generator_determinant"};
        for (Letter a = 0; a < n; ++a)
            c.slack = std::max(c.slack, std::abs(g.gen_h[a].det() - 1.0));
        c.pass = c.slack < 1e-9;
        rep.add(c);
    }
    {  // F_hat(a) = F_a^{-1}
        CheckResult c{"pairing_inverse"};
        for (Letter a = 0; a < n; ++a) {
            RealMoebius p = g.gen_h[a] * g.gen_h[g.alphabet.hat[a]];
            double err = std::abs(p.a - 1) + std::abs(p.b) + std::abs(p.c) + std::abs(p.d - 1);
            RealMoebius q = p;  // PSL sign
            double err2 = std::abs(q.a + 1) + std::abs(q.b) + std::abs(q.c) + std::abs(q.d + 1);
            c.slack = std::max(c.slack, std::min(err, err2));
        }
        c.pass = c.slack < 1e-9;
        rep.add(c);
    }
    {  // F_a maps the endpoints of [hat a] to those of [a], swapped
        CheckResult c{"side_pairing_endpoints"};
        for (Letter a = 0; a < n; ++a) {
            Letter ah = g.alphabet.hat[a];
            cplx img_r = apply_boundary(g.gen_d[a], g.arc[ah].right);
            cplx img_l = apply_boundary(g.gen_d[a], g.arc[ah].left);
            c.slack = std::max(c.slack, std::abs(img_r - g.arc[a].left));
            c.slack = std::max(c.slack, std::abs(img_l - g.arc[a].right));
        }
        c.pass = c.slack < 1e-10;
        rep.add(c);
    }
    {  // arcs partition the circle, consecutive under the cyclic order
        CheckResult c{"arc_partition"};
        double total = 0;
        for (Letter a = 0; a < n; ++a) {
            total += g.arc[a].width;
            Letter b = g.alphabet.successor(a);
            c.slack = std::max(c.slack, std::abs(g.arc[a].right - g.arc[b].left));
        }
        c.slack = std::max(c.slack, std::abs(total - 2 * kPi));
        c.pass = c.slack < 1e-9;
        rep.add(c);
    }
    {  // arc endpoints on the isometric circle of F_hat(a); only meaningful
       // when the polygon sides are the generators' isometric circles
        CheckResult c{"isometric_circle_arcs"};
        c.applicable = g.ford;
        for (Letter a = 0; a < n; ++a) {
            const DiscMoebius& F = g.gen_d[g.alphabet.hat[a]];
            if (F.is_rotation()) { c.pass = false; continue; }
            IsometricCircle I = isometric_circle(F);
            c.slack = std::max(c.slack, std::abs(std::abs(g.arc[a].left - I.center) - I.radius));
            c.slack = std::max(c.slack, std::abs(std::abs(g.arc[a].right - I.center) - I.radius));
        }
        if (c.applicable) c.pass = c.slack < 1e-9;
        rep.add(c);
    }
    {  // no generator's isometric disc contains another generator's circle
        CheckResult c{"isometric_circle_nesting"};
        for (Letter a = 0; a < n && c.pass; ++a) {
            for (Letter b = 0; b < n; ++b) {
                if (a == b) continue;
                IsometricCircle Ia = isometric_circle(g.gen_d[a]);
                IsometricCircle Ib = isometric_circle(g.gen_d[b]);
                if (std::abs(Ia.center - Ib.center) + Ib.radius < Ia.radius - 1e-12) {
                    c.pass = false;
                    c.note = "circle of " + g.alphabet.label[b] + " inside disc of " + g.alphabet.label[a];
                    break;
                }
            }
        }
        rep.add(c);
    }
    {  // boundary action: F_a maps the complement of [hat a] onto [a]
        CheckResult c{"boundary_action"};
        for (Letter a = 0; a < n; ++a) {
            Letter ah = g.alphabet.hat[a];
            for (int s = 0; s < 20; ++s) {
                // sample the open complement of [hat a]
                double t = g.arc[ah].theta_right + g.arc[ah].width +
                           (2 * kPi - g.arc[ah].width) * (s + 0.5) / 20.0;
                cplx xi(std::cos(t), std::sin(t));
                cplx img = apply_boundary(g.gen_d[a], xi);
                double rel = angle_of(img) - g.arc[a].theta_right;
                while (rel < 0) rel += 2 * kPi;
                if (rel > g.arc[a].width + 1e-9) { c.pass = false; }
            }
        }
        rep.add(c);
    }
    {  // expansion domains stay clear of each other: for every admissible
       // non-cuspidal pair (b0, a0) the closed discs U_{b0}, U_{hat a0} are disjoint
        CheckResult c{"noncuspidal_separation"};
        double worst = 1e9;
        for (Letter b0 = 0; b0 < n; ++b0) {
            for (Letter a0 = 0; a0 < n; ++a0) {
                if (a0 == g.alphabet.hat[b0]) continue;
                int diff = g.alphabet.order_diff(a0, g.alphabet.hat[b0]);
                if (diff == 1 || diff == -1) continue;  // cuspidal continuation
                IsometricCircle Ub = isometric_circle(g.gen_d[b0]);
                IsometricCircle Ua = isometric_circle(g.gen_d[g.alphabet.hat[a0]]);
                double gap = std::abs(Ub.center - Ua.center) - Ub.radius - Ua.radius;
                worst = std::min(worst, gap);
            }
        }
        c.slack = worst;
        c.pass = worst > 1e-10;
        rep.add(c);
    }
    {  // disc generators satisfy the SU(1,1) constraint
        CheckResult c{"su11_constraint"};
        for (Letter a = 0; a < n; ++a)
            c.slack = std::max(c.slack, std::abs(g.gen_d[a].unitarity_defect()));
        c.pass = c.slack < 1e-12;
        rep.add(c);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// construction from polygon data

namespace detail {

inline GroupPresentation build(const PolygonSpec& spec) {
    GroupPresentation g;
    g.name = spec.name;

    const int nsides = int(spec.side_letter.size());
    const int nv = int(spec.hp_vertices.size());
    if (nsides != nv) throw std::runtime_error("group spec: need one side per vertex");
    if (nsides % 2 != 0) throw std::runtime_error("group spec: odd number of sides");

    // letters in first-appearance order
    std::vector<std::string> labels;
    for (const auto& s : spec.side_letter)
        if (std::find(labels.begin(), labels.end(), s) == labels.end()) labels.push_back(s);
    if (int(labels.size()) != nsides) throw std::runtime_error("group spec: duplicate side labels");

    g.alphabet.d = nsides / 2;
    g.alphabet.label = labels;
    g.alphabet.hat.assign(nsides, -1);
    auto index_of = [&](const std::string& s) {
        auto it = std::find(labels.begin(), labels.end(), s);
        if (it == labels.end()) throw std::runtime_error("group spec: unknown label " + s);
        return int(it - labels.begin());
    };
    for (const auto& [x, y] : spec.hat_of) {
        g.alphabet.hat[index_of(x)] = index_of(y);
        g.alphabet.hat[index_of(y)] = index_of(x);
    }
    for (Letter a = 0; a < nsides; ++a)
        if (g.alphabet.hat[a] < 0) throw std::runtime_error("group spec: letter without hat partner");

    g.gen_h.resize(nsides);
    for (Letter a = 0; a < nsides; ++a) {
        auto it = spec.matrix_of.find(labels[a]);
        if (it != spec.matrix_of.end()) {
            g.gen_h[a] = it->second;
        } else {
            auto jt = spec.matrix_of.find(labels[g.alphabet.hat[a]]);
            if (jt == spec.matrix_of.end())
                throw std::runtime_error("group spec: no matrix for " + labels[a]);
            g.gen_h[a] = jt->second.inverse();
        }
        if (std::abs(g.gen_h[a].det() - 1.0) > 1e-9)
            throw std::runtime_error("group spec: non-unimodular matrix for " + labels[a]);
    }
    g.gen_d.resize(nsides);
    for (Letter a = 0; a < nsides; ++a) g.gen_d[a] = to_disc(g.gen_h[a]);

    // disc vertices in polygon cyclic order
    std::vector<cplx> vxi(nv);
    for (int i = 0; i < nv; ++i) {
        if (!spec.hp_vertices[i].has_value())
            vxi[i] = cplx(1.0, 0.0);
        else
            vxi[i] = cayley(cplx(*spec.hp_vertices[i], 0.0));
        vxi[i] /= std::abs(vxi[i]);
    }

    // the arc [a] is the boundary arc cut off by side a: the arc between the
    // side's endpoints that does not contain the other vertices
    g.arc.resize(nsides);
    for (int i = 0; i < nv; ++i) {
        Letter a = index_of(spec.side_letter[i]);
        cplx p = vxi[i], q = vxi[(i + 1) % nv];
        double tp = angle_of(p), tq = angle_of(q);
        // the arc from p to q not containing the remaining vertices; pick the
        // orientation by checking a third vertex
        cplx other = vxi[(i + 2) % nv];
        double to = angle_of(other);
        auto in_ccw = [](double from, double to_, double t) {
            double w = to_ - from;  while (w <= 0) w += 2 * kPi;
            double r = t - from;    while (r < 0) r += 2 * kPi;
            return r < w;
        };
        // candidate 1: counterclockwise from p to q
        bool other_in_1 = in_ccw(tp, tq, to);
        double start, width;
        cplx left, right;
        if (!other_in_1) {
            // arc = ccw(p..q): counterclockwise end is q
            start = tp; width = tq - tp; while (width <= 0) width += 2 * kPi;
            left = q; right = p;
        } else {
            start = tq; width = tp - tq; while (width <= 0) width += 2 * kPi;
            left = p; right = q;
        }
        g.arc[a].left = left;
        g.arc[a].right = right;
        g.arc[a].theta_right = angle_of(right);
        g.arc[a].width = width;
    }

    // clockwise cyclic order: o(b) = o(a)+1 when right endpoint of [a] is the
    // left endpoint of [b]
    g.alphabet.order.assign(nsides, -1);
    {
        Letter cur = 0;
        g.alphabet.order[0] = 0;
        for (int step = 1; step < nsides; ++step) {
            cplx target = g.arc[cur].right;
            Letter next = -1;
            for (Letter b = 0; b < nsides; ++b)
                if (b != cur && std::abs(g.arc[b].left - target) < 1e-9) next = b;
            if (next < 0) throw std::runtime_error("group spec: arcs are not consecutive");
            g.alphabet.order[next] = step;
            cur = next;
        }
        g.alphabet.build_inverse();
    }

    // cusp data
    for (const auto& A : spec.cusp_reps) {
        CuspClass c;
        c.rep = A;
        c.point = apply(A, ExtendedPoint::infinity());
        g.cusps.push_back(c);
    }

    // vertex charts
    for (int i = 0; i < nv; ++i) {
        VertexData v;
        v.xi = vxi[i];
        v.zeta = spec.hp_vertices[i] ? hp_point(*spec.hp_vertices[i]) : ExtendedPoint::infinity();
        v.B = spec.vertex_charts[i].first;
        v.cusp = spec.vertex_charts[i].second;
        g.vertices.push_back(v);
    }

    // ford flag: do the arcs sit on the isometric circles of the pairings?
    g.ford = true;
    for (Letter a = 0; a < nsides && g.ford; ++a) {
        const DiscMoebius& F = g.gen_d[g.alphabet.hat[a]];
        if (F.is_rotation()) { g.ford = false; break; }
        IsometricCircle I = isometric_circle(F);
        if (std::abs(std::abs(g.arc[a].left - I.center) - I.radius) > 1e-9 ||
            std::abs(std::abs(g.arc[a].right - I.center) - I.radius) > 1e-9)
            g.ford = false;
    }

    return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// built-in lattices

// Free degree-2 congruence-type lattice: parabolic generators z -> z+2 and
// z -> z/(2z+1), ideal quadrilateral with half-plane vertices -1, 0, 1, inf,
// three cusp classes.
inline GroupPresentation builtin_gamma2() {
    detail::PolygonSpec s;
    s.name = "gamma2";
    // vertices in cyclic order: inf, -1, 0, 1
    s.hp_vertices = {std::nullopt, -1.0, 0.0, 1.0};
    // sides: (inf,-1) = ah, (-1,0) = b, (0,1) = bh? -- pairings below fix this:
    //   F_a = z+2 maps side (-1,inf) to (1,inf);  F_b = z/(2z+1) maps (-1,0) to (0,1)
    s.side_letter = {"ah", "bh", "b", "a"};
    // (inf,-1): arc cut = the quarter containing phi^{-1} of (-inf,-1): label ah
    // (-1,0): side paired by F_b onto (0,1): that side carries label bh (F_b(s_bh)=s_b)
    s.hat_of = {{"a", "ah"}, {"b", "bh"}};
    s.matrix_of = {{"a", {1, 2, 0, 1}}, {"b", {1, 0, 2, 1}}};
    s.cusp_reps = {{1, 0, 0, 1}, {0, -1, 1, 0}, {1, -1, 1, 0}};  // inf, 0, 1
    // vertices: inf (cusp 0, B=id), -1 = F_bh * (1) with 1 = A_3*inf, 0 (cusp 1, B=id), 1 (cusp 2, B=id)
    s.vertex_charts = {{RealMoebius::identity(), 0},
                       {{1, 0, -2, 1}, 2},
                       {RealMoebius::identity(), 1},
                       {RealMoebius::identity(), 2}};
    GroupPresentation g = detail::build(s);
    // cusp widths: conjugate the parabolic stabilizer through each chart
    g.cusps[0].width = detail::cusp_width_from(g.cusps[0].rep.inverse(), {1, 2, 0, 1});
    g.cusps[1].width = detail::cusp_width_from(g.cusps[1].rep.inverse(), {1, 0, 2, 1});
    g.cusps[2].width = detail::cusp_width_from(g.cusps[2].rep.inverse(), {-1, 2, -2, 3});
    return g;
}

// Once-punctured torus: hyperbolic generators [[1,1],[1,2]] and [[1,-1],[-1,2]]
// pairing the ideal quadrilateral with vertices -1, 0, 1, inf; one cusp whose
// vertex cycle is the commutator.
inline GroupPresentation builtin_punctured_torus() {
    detail::PolygonSpec s;
    s.name = "punctured_torus";
    s.hp_vertices = {std::nullopt, -1.0, 0.0, 1.0};
    // F_a = [[1,1],[1,2]] maps (-1,inf) -> (0,1); F_b = [[1,-1],[-1,2]] maps (1,inf) -> (-1,0)
    s.side_letter = {"ah", "b", "a", "bh"};
    s.hat_of = {{"a", "ah"}, {"b", "bh"}};
    s.matrix_of = {{"a", {1, 1, 1, 2}}, {"b", {1, -1, -1, 2}}};
    s.cusp_reps = {{1, 0, 0, 1}};
    // all four vertices in the single cusp class of infinity:
    //   inf = id*inf,  1 = A(inf),  -1 = B(inf),  0 = AB(inf)
    s.vertex_charts = {{RealMoebius::identity(), 0},
                       {{1, -1, -1, 2}, 0},
                       {{0, 1, -1, 3}, 0},
                       {{1, 1, 1, 2}, 0}};
    GroupPresentation g = detail::build(s);
    // width of the single cusp: the primitive parabolic fixing infinity is z -> z+6
    g.cusps[0].width = detail::cusp_width_from(RealMoebius::identity(), {1, 6, 0, 1});
    return g;
}

inline GroupPresentation builtin(const std::string& name) {
    if (name == "gamma2") return builtin_gamma2();
    if (name == "punctured_torus") return builtin_punctured_torus();
    throw std::invalid_argument("unknown builtin group: " + name);
}

}  // namespace cuspdim
