#pragma once

#include <algorithm>
#include <deque>

#include "coding.hpp"
#include "rng.hpp"

// Empirical verification of the approximation theory: enumeration of
// parabolic points with bounded denominator, Dirichlet-type inequalities,
// membership tests for the badly-approximable sets, the two-sided
// convergent estimates, and horoball separation.

namespace cuspdim {

struct ParabolicPoint {
    double x = 0;
    double denom = 0;
    int cusp = 0;
    RealMoebius witness;  // point = witness * A_cusp * infinity
};

struct EnumerationResult {
    std::vector<ParabolicPoint> points;  // finite points with 0 < D <= Q, deduplicated
    bool complete = true;                // frontier exhausted before the depth cap
    double dup_denominator_slack = 0;    // worst |D - D'| over coincident points
    std::size_t visited = 0;
};

// Breadth-first walk over reduced words in the generators. A branch is cut
// once every parabolic point below it provably has denominator above the
// bound: all such points lie under the image of the branch's boundary
// interval, whose euclidean length bounds their horoball diameters.
inline EnumerationResult enumerate_parabolic_points(const GroupPresentation& g, double Q,
                                                    int depth_cap = 48, double prune_safety = 4.0) {
    if (!(Q > 0)) throw std::invalid_argument("denominator bound must be positive");
    EnumerationResult out;
    std::vector<ParabolicPoint> raw;

    // half-plane endpoints of the letter intervals
    const int n = g.alphabet.size();
    std::vector<ExtendedPoint> left(n), right(n);
    for (Letter a = 0; a < n; ++a) {
        left[a] = cayley_inverse(ExtendedPoint::disc(g.arc[a].left));
        right[a] = cayley_inverse(ExtendedPoint::disc(g.arc[a].right));
    }

    auto emit = [&](const RealMoebius& G) {
        for (std::size_t k = 0; k < g.cusps.size(); ++k) {
            RealMoebius GA = G * g.cusps[k].rep;
            double D = std::abs(GA.c);
            if (D <= 0 || D > Q) continue;
            ParabolicPoint p;
            p.x = GA.a / GA.c;
            p.denom = D;
            p.cusp = int(k);
            p.witness = G;
            raw.push_back(p);
        }
    };

    struct Node {
        RealMoebius G;
        Letter last;
        int depth;
    };
    std::deque<Node> queue;
    queue.push_back({RealMoebius::identity(), -1, 0});
    emit(RealMoebius::identity());

    const double prune_len = 1.0 / (prune_safety * prune_safety * Q * Q);
    while (!queue.empty()) {
        Node nd = queue.front();
        queue.pop_front();
        ++out.visited;
        if (nd.depth >= depth_cap) {
            out.complete = false;
            continue;
        }
        for (Letter a = 0; a < n; ++a) {
            if (nd.last >= 0 && a == g.alphabet.hat[nd.last]) continue;
            RealMoebius Gc = nd.G * g.gen_h[a];
            Gc.renormalize();
            // every descendant point lies in the image of the letter interval
            ExtendedPoint e1 = apply(nd.G, left[a]);
            ExtendedPoint e2 = apply(nd.G, right[a]);
            if (!e1.infinite && !e2.infinite) {
                double len = std::abs(e1.z.real() - e2.z.real());
                if (len < prune_len) continue;  // denominators beyond the bound
            }
            emit(Gc);
            queue.push_back({Gc, a, nd.depth + 1});
        }
    }

    std::sort(raw.begin(), raw.end(), [](const ParabolicPoint& p, const ParabolicPoint& q) {
        return p.x < q.x;
    });
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!out.points.empty() && std::abs(raw[i].x - out.points.back().x) < 1e-10) {
            out.dup_denominator_slack = std::max(
                out.dup_denominator_slack, std::abs(raw[i].denom - out.points.back().denom));
            if (raw[i].denom < out.points.back().denom) out.points.back() = raw[i];
        } else {
            out.points.push_back(raw[i]);
        }
    }
    return out;
}

// brute force over all reduced words to a fixed depth; oracle for the pruned walk
inline std::vector<ParabolicPoint> enumerate_brute_force(const GroupPresentation& g, double Q,
                                                         int depth) {
    EnumerationResult r = enumerate_parabolic_points(g, Q, depth, 1e9);  // pruning disabled
    return r.points;
}

struct ApproximationRecord {
    ParabolicPoint best;
    double patterson_constant = 0;  // min over points of |alpha - p| D(p) Q
};

inline ApproximationRecord patterson_check(const EnumerationResult& e, double alpha, double Q) {
    if (!e.complete) throw std::runtime_error("enumeration incomplete; raise the depth cap");
    ApproximationRecord rec;
    double best = 1e300;
    for (const auto& p : e.points) {
        if (p.denom > Q) continue;
        double v = std::abs(alpha - p.x) * p.denom * Q;
        if (v < best) {
            best = v;
            rec.best = p;
        }
    }
    rec.patterson_constant = best;
    return rec;
}

// one-sided certificate: "false" is definitive, "true" holds up to the
// enumeration bound Q
inline bool bad_test(const EnumerationResult& e, double alpha, double eps, double Q) {
    for (const auto& p : e.points) {
        if (p.denom > Q) continue;
        if (std::abs(alpha - p.x) < eps / (p.denom * p.denom)) return false;
    }
    return true;
}

// worst pair ratio |x - x'| D D'; positive by horoball disjointness
inline double horoball_separation_check(const std::vector<ParabolicPoint>& pts) {
    double worst = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (std::abs(pts[i].x - pts[j].x) < 1e-10) continue;
            worst = std::min(worst, std::abs(pts[i].x - pts[j].x) * pts[i].denom * pts[j].denom);
        }
    return worst;
}

// ---------------------------------------------------------------------------
// convergent-type estimates along the accelerated expansion

struct ConvergentVerdict {
    int r = 0;
    double length = 0;        // |W_r|
    double point = 0;         // the convergent G * zeta
    double denom = 0;
    double product = 0;       // D^2 |alpha - point|
    bool lower_ok = false;    // 1/(|W_r| + 2 mu) <= product
    bool upper_ok = false;    // product <= 1/|W_r|
};

struct endpoint_hit : std::runtime_error {
    endpoint_hit() : std::runtime_error("expansion hit a cylinder endpoint; resample") {}
};

inline std::vector<ConvergentVerdict> expansion_approximation_check(const CuspidalSystem& sys,
                                                                    double alpha, int R,
                                                                    double slack = 1e-9,
                                                                    double denom_factor = 1.0) {
    const GroupPresentation& g = sys.group();
    const double mu = g.max_cusp_width();

    // expand far enough to cover R blocks
    cplx xi = cayley(cplx(alpha, 0.0));
    xi /= std::abs(xi);
    Word letters = expand(g, xi, 16 * (R + 2));
    Decomposition dec = cuspidal_decompose(sys, letters);
    if (int(dec.blocks.size()) < R + 1) throw endpoint_hit();

    std::vector<ConvergentVerdict> out;
    RealProduct prefix;  // G over W_0 .. W_{r-1}
    for (int r = 0; r < R; ++r) {
        const CuspidalWord& W = dec.blocks[r];
        if (W.length > 0) {
            const VertexData* v = g.find_vertex(W.xi_W);
            if (!v) throw std::runtime_error("vertex lookup failed");
            RealMoebius GBA = prefix.value * v->B * g.cusps[v->cusp].rep;
            ConvergentVerdict cv;
            cv.r = r;
            cv.length = W.length;
            cv.denom = std::abs(GBA.c) * denom_factor;
            if (cv.denom > 0) {
                cv.point = GBA.a / GBA.c;
                cv.product = cv.denom * cv.denom * std::abs(alpha - cv.point);
                cv.lower_ok = cv.product >= 1.0 / (W.length + 2 * mu) - slack;
                cv.upper_ok = cv.product <= 1.0 / W.length + slack;
                out.push_back(cv);
            }
        }
        for (Letter l : letters_of(g, W)) prefix.push(g.gen_h[l]);
    }
    return out;
}

// a point of the bounded-type set: decode a seeded random admissible block
// sequence with all geometric lengths below the bound
inline double random_bounded_type_point(const CuspidalSystem& sys, const CuspidalAlphabet& A,
                                        Rng& rng, int blocks = 60) {
    const GroupPresentation& g = sys.group();
    std::vector<std::size_t> seq;
    seq.push_back(std::size_t(rng.uniform_int(int(A.words.size()))));
    while (int(seq.size()) < blocks) {
        std::size_t cur = seq.back();
        std::vector<std::size_t> options;
        for (std::size_t j = 0; j < A.words.size(); ++j)
            if (A.compatible(cur, A.words[j].a0)) options.push_back(j);
        seq.push_back(options[std::size_t(rng.uniform_int(int(options.size())))]);
    }
    DiscMoebius F = DiscMoebius::identity();
    int count = 0;
    for (std::size_t i : seq) {
        F = F * A.words[i].F;
        if (++count % 8 == 0) F.renormalize();
    }
    cplx seed = g.arc[domain_letters(g, A.words[seq.back()]).front()].midpoint();
    cplx xi = apply_boundary(F, seed);
    ExtendedPoint hp = cayley_inverse(ExtendedPoint::disc(xi));
    if (hp.infinite) throw endpoint_hit();
    return hp.z.real();
}

}  // namespace cuspdim
