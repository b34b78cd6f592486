#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "coding.hpp"
#include "linalg.hpp"

// Discretized transfer operators on piecewise-Lipschitz functions over the
// boundary circle: collocation on per-arc angular grids with linear
// interpolation, weights |DF_W|^s summed over the accelerated alphabet.
// The infinite-parameter operator sums explicit words up to a cutoff and
// closes each parabolic family analytically.

namespace cuspdim {

constexpr double kInfiniteT = std::numeric_limits<double>::infinity();

struct ArcGrid {
    const GroupPresentation* group = nullptr;
    int per_arc = 0;
    std::vector<double> theta;  // node angles, arc major, ascending within arc
    std::vector<cplx> node;

    ArcGrid() = default;
    ArcGrid(const GroupPresentation& g, int m) : group(&g), per_arc(m) {
        for (Letter a = 0; a < g.alphabet.size(); ++a) {
            const Arc& J = g.arc[a];
            double h = J.width / m;
            for (int j = 0; j < m; ++j) {
                double t = J.theta_right + (j + 0.5) * h;
                theta.push_back(t);
                node.push_back(cplx(std::cos(t), std::sin(t)));
            }
        }
    }

    int size() const { return int(node.size()); }
    int base(Letter a) const { return a * per_arc; }
    Letter arc_of(int i) const { return Letter(i / per_arc); }

    // linear interpolation weights for a boundary point; clamped to the
    // nearest node inside the endpoint half-gaps so weights stay nonnegative
    struct Stencil {
        int j1 = 0, j2 = 0;
        double w1 = 1, w2 = 0;
    };

    Stencil stencil(cplx xi) const {
        const GroupPresentation& g = *group;
        Letter a = g.locate(xi);
        const Arc& J = g.arc[a];
        double h = J.width / per_arc;
        double rel = angle_of(xi) - J.theta_right;
        while (rel < 0) rel += 2 * kPi;
        while (rel > 2 * kPi) rel -= 2 * kPi;
        if (rel > J.width) rel = J.width;
        double pos = rel / h - 0.5;
        Stencil s;
        if (pos <= 0) {
            s.j1 = s.j2 = base(a);
            return s;
        }
        if (pos >= per_arc - 1) {
            s.j1 = s.j2 = base(a) + per_arc - 1;
            return s;
        }
        int j0 = int(pos);
        s.j1 = base(a) + j0;
        s.j2 = s.j1 + 1;
        s.w2 = pos - j0;
        s.w1 = 1.0 - s.w2;
        return s;
    }

    // one-sided node at an arc endpoint: the node of [a] nearest the
    // clockwise (right) or counterclockwise (left) end
    int endpoint_node(Letter a, bool right_end) const {
        return right_end ? base(a) : base(a) + per_arc - 1;
    }
};

struct ArcFunction {
    const ArcGrid* grid = nullptr;
    std::vector<double> values;

    ArcFunction() = default;
    explicit ArcFunction(const ArcGrid& g, double fill = 0.0) : grid(&g), values(g.size(), fill) {}

    double eval(cplx xi) const {
        auto s = grid->stencil(xi);
        return s.w1 * values[s.j1] + s.w2 * values[s.j2];
    }

    // Lipschitz seminorm: max slope between adjacent nodes, per arc
    double lipschitz() const {
        double lip = 0;
        for (Letter a = 0; a < grid->group->alphabet.size(); ++a) {
            int b = grid->base(a);
            for (int j = 0; j + 1 < grid->per_arc; ++j) {
                double dist = std::abs(grid->node[b + j + 1] - grid->node[b + j]);
                lip = std::max(lip, std::abs(values[b + j + 1] - values[b + j]) / dist);
            }
        }
        return lip;
    }

    double sup() const { return sup_norm(values); }
};

// checks the multiplicative-cone condition f(y) <= exp(C|y-x|) f(x) per arc
inline double cone_defect(const ArcFunction& f, double C) {
    const ArcGrid& G = *f.grid;
    double worst = 0;
    for (Letter a = 0; a < G.group->alphabet.size(); ++a) {
        int b = G.base(a);
        for (int i = 0; i < G.per_arc; ++i)
            for (int j = 0; j < G.per_arc; ++j) {
                double bound = std::exp(C * std::abs(G.node[b + i] - G.node[b + j])) * f.values[b + j];
                worst = std::max(worst, f.values[b + i] - bound);
            }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// prepared operator: geometry-dependent data reusable across parameter s

struct OperatorOptions {
    double explicit_cut = 200.0;  // words up to this length are summed directly
    int k_total_min = 512;        // per-family terms evaluated before the series tail
    int k_explicit_min = 64;
};

struct PreparedOperator {
    const ArcGrid* grid = nullptr;
    double lo = 0, hi = 0;  // support: words with lo < |W| <= hi
    struct Term {
        double logD;
        ArcGrid::Stencil tgt;
    };
    struct SeriesTail {
        double logDv;    // log |D_xi F_V|
        double A;        // |F_V(xi) - xi_P|^2
        double b, c;     // expansion of the pole drift: x = b/k + c/k^2
        double pref_log; // log(4 / t^2)
        int K;           // series starts at k = K
        int limit_node;  // one-sided evaluation node at xi_P
    };
    std::vector<std::size_t> row_begin;  // into terms
    std::vector<Term> terms;
    std::vector<std::size_t> tail_begin;  // into tails
    std::vector<SeriesTail> tails;
    double tail_error_bound = 0;  // monitored truncation bound of the series tails

    int size() const { return grid->size(); }
};

// Builds the collocation data for sum over cuspidal words with lo < |W| <= hi.
inline PreparedOperator prepare_operator(const CuspidalSystem& sys, const ArcGrid& grid,
                                         double lo, double hi,
                                         const OperatorOptions& opt = {}) {
    const GroupPresentation& g = sys.group();
    PreparedOperator P;
    P.grid = &grid;
    P.lo = lo;
    P.hi = hi;

    const bool infinite = std::isinf(hi);
    const double cut = infinite ? std::max(lo, opt.explicit_cut) : hi;
    CuspidalAlphabet A = enumerate_alphabet(sys, cut);

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < A.words.size(); ++i)
        if (A.words[i].length > lo) keep.push_back(i);

    const int n = grid.size();
    for (int i = 0; i < n; ++i) {
        P.row_begin.push_back(P.terms.size());
        P.tail_begin.push_back(P.tails.size());
        Letter a = grid.arc_of(i);
        cplx xi = grid.node[i];
        for (std::size_t idx : keep) {
            if (!A.compatible(idx, a)) continue;
            const CuspidalWord& W = A.words[idx];
            PreparedOperator::Term t;
            t.logD = std::log(derivative_modulus(W.F, xi));
            t.tgt = grid.stencil(apply_boundary(W.F, xi));
            P.terms.push_back(t);
        }
        if (!infinite) continue;
        for (const TailFamily& tf : A.tails) {
            const CuspidalFamily& fam = sys.families()[tf.family];
            const int p = int(fam.cycle.size());
            // domain of every word in this (family, residue): decided by the
            // last letter and the type
            CuspidalWord probe;
            probe.type = fam.type;
            probe.last = fam.cycle[tf.r];
            if (!domain_contains(g.alphabet, probe, a)) continue;

            int k_explicit = std::max(opt.k_explicit_min, opt.k_total_min - tf.k_min);
            for (int k = tf.k_min; k < tf.k_min + k_explicit; ++k) {
                DiscMoebius F = parabolic_power(fam.cycle_parabolic, k) * fam.F_prefix[tf.r];
                PreparedOperator::Term t;
                t.logD = std::log(derivative_modulus(F, xi));
                t.tgt = grid.stencil(apply_boundary(F, xi));
                P.terms.push_back(t);
            }

            PreparedOperator::SeriesTail st;
            const DiscMoebius& FV = fam.F_prefix[tf.r];
            st.logDv = std::log(derivative_modulus(FV, xi));
            cplx u = apply_boundary(FV, xi) - fam.xi_W;
            const double t_len = fam.cycle_parabolic.translation;
            st.A = std::norm(u);
            double B = 4.0 * (u * std::conj(fam.xi_W)).imag() / t_len;
            st.b = -B / st.A;
            st.c = (4.0 / (t_len * t_len)) / st.A;
            st.pref_log = std::log(4.0 / (t_len * t_len));
            st.K = tf.k_min + k_explicit;
            st.limit_node = grid.endpoint_node(fam.a0, fam.type == WordType::Right);
            P.tails.push_back(st);
        }
    }
    P.row_begin.push_back(P.terms.size());
    P.tail_begin.push_back(P.tails.size());
    return P;
}

struct TailSums {
    double plain = 0;  // sum of D^s over the series tail
    double logk = 0;   // sum of ln(k) * D^s
    double logpref = 0;  // sum of (log of k-independent factor) * D^s, without the -2 ln k part
    double error = 0;
};

inline TailSums tail_sums(const PreparedOperator::SeriesTail& st, double s) {
    const double pref = std::exp(s * (st.logDv + st.pref_log - std::log(st.A)));
    const double b = st.b, c = st.c;
    const double g1 = -s * b;
    const double g2 = -s * c + 0.5 * s * (s + 1) * b * b;
    const double g3 = s * (s + 1) * b * c - s * (s + 1) * (s + 2) / 6.0 * b * b * b;
    const double K = st.K;
    TailSums out;
    double z0 = zeta_tail(2 * s, K), z1 = zeta_tail(2 * s + 1, K), z2 = zeta_tail(2 * s + 2, K),
           z3 = zeta_tail(2 * s + 3, K);
    out.plain = pref * (z0 + g1 * z1 + g2 * z2 + g3 * z3);
    double g4bound = 0.5 * s * (s + 1) * c * c + s * (s + 1) * (s + 2) * 0.5 * b * b * std::abs(c) +
                     s * (s + 1) * (s + 2) * (s + 3) / 24.0 * b * b * b * b;
    out.error = pref * std::abs(g4bound) * zeta_tail(2 * s + 4, K);
    return out;
}

// Sum_{k >= n} ln(k) k^(-m) by Euler-Maclaurin.
inline double zeta_log_tail(double m, double n) {
    double s = 0;
    double N = n;
    while (N < n + 32) { s += std::log(N) * std::pow(N, -m); N += 1.0; }
    double lnN = std::log(N);
    double t = std::pow(N, 1.0 - m) * (lnN / (m - 1.0) + 1.0 / ((m - 1.0) * (m - 1.0)));
    t += 0.5 * lnN * std::pow(N, -m);
    t -= std::pow(N, -m - 1.0) * (1.0 - m * lnN) / 12.0;
    return s + t;
}

// tail of the s-derivative weights (ln D) D^s
inline double tail_log_weighted(const PreparedOperator::SeriesTail& st, double s) {
    const double pref = std::exp(s * (st.logDv + st.pref_log - std::log(st.A)));
    const double L0 = st.logDv + st.pref_log - std::log(st.A);
    const double b = st.b, c = st.c;
    const double g1 = -s * b;
    const double g2 = -s * c + 0.5 * s * (s + 1) * b * b;
    const double K = st.K;
    // (L0 - ln(1+x)) (1+x)^{-s} expanded in 1/k
    const double d0 = L0;
    const double d1 = L0 * g1 - b;
    const double d2 = L0 * g2 - (c - 0.5 * b * b) - b * g1;
    double part1 = pref * (d0 * zeta_tail(2 * s, K) + d1 * zeta_tail(2 * s + 1, K) +
                           d2 * zeta_tail(2 * s + 2, K));
    double part2 = -2.0 * pref *
                   (zeta_log_tail(2 * s, K) + g1 * zeta_log_tail(2 * s + 1, K) +
                    g2 * zeta_log_tail(2 * s + 2, K));
    return part1 + part2;
}

enum class WeightKind { Plain, LogDerivative };

// materialize the dense collocation matrix at parameter s
inline DenseMatrix assemble(const PreparedOperator& P, double s,
                            WeightKind kind = WeightKind::Plain,
                            double* tail_error = nullptr) {
    const int n = P.size();
    DenseMatrix M(n);
    double err = 0;
    for (int i = 0; i < n; ++i) {
        for (std::size_t t = P.row_begin[i]; t < P.row_begin[i + 1]; ++t) {
            const auto& term = P.terms[t];
            double w = std::exp(s * term.logD);
            if (kind == WeightKind::LogDerivative) w *= term.logD;
            M(i, term.tgt.j1) += w * term.tgt.w1;
            M(i, term.tgt.j2) += w * term.tgt.w2;
        }
        for (std::size_t t = P.tail_begin[i]; t < P.tail_begin[i + 1]; ++t) {
            const auto& st = P.tails[t];
            if (kind == WeightKind::Plain) {
                TailSums ts = tail_sums(st, s);
                double w = std::max(ts.plain, 0.0);
                M(i, st.limit_node) += w;
                err = std::max(err, ts.error);
            } else {
                M(i, st.limit_node) += tail_log_weighted(st, s);
            }
        }
    }
    if (tail_error) *tail_error = err;
    return M;
}

// ---------------------------------------------------------------------------
// eigendata

struct EigenData {
    double lambda = 0;
    ArcFunction g;            // strictly positive, normalized so that mu(g) = 1
    std::vector<double> mu;   // left eigen-functional, total mass 1
    double residual = 0;
    int iterations = 0;

    double integrate(const std::vector<double>& f) const {
        return dot(mu, f);
    }
};

struct TransferEigenOptions {
    double tol = 1e-12;
    int max_iter = 20000;
};

inline EigenData leading_eigendata(const ArcGrid& grid, const DenseMatrix& M,
                                   const TransferEigenOptions& o = {}) {
    EigenPair e = leading_eigen(M, o.tol, o.max_iter);
    EigenData d;
    d.lambda = e.value;
    d.residual = e.residual;
    d.iterations = e.iterations;
    double mass = 0;
    for (double w : e.left) mass += w;
    d.mu = std::move(e.left);
    for (double& w : d.mu) w /= mass;
    d.g = ArcFunction(grid);
    d.g.values = std::move(e.right);
    double c = dot(d.mu, d.g.values);
    for (double& v : d.g.values) v /= c;
    return d;
}

// max_x | sum_W N_W(x) - 1 | for the normalized weights N_W built from the
// eigendata; a direct check that (lambda, g) solves the eigenproblem
inline double normalized_operator_check(const DenseMatrix& M, const EigenData& d) {
    std::vector<double> Lg;
    M.matvec(d.g.values, Lg);
    double worst = 0;
    for (std::size_t i = 0; i < Lg.size(); ++i)
        worst = std::max(worst, std::abs(Lg[i] / (d.lambda * d.g.values[i]) - 1.0));
    return worst;
}

// normalized operator entries: (1/lambda) g_j M_ij / g_i
inline DenseMatrix normalized_operator(const DenseMatrix& M, const EigenData& d) {
    DenseMatrix N(M.n);
    for (std::size_t i = 0; i < M.n; ++i)
        for (std::size_t j = 0; j < M.n; ++j)
            N(i, j) = M(i, j) * d.g.values[j] / (d.lambda * d.g.values[i]);
    return N;
}

// ---------------------------------------------------------------------------
// function-space application (no grid): used by consistency oracles

inline double apply_to_function(const CuspidalSystem& sys, const CuspidalAlphabet& A, double s,
                                cplx xi, const std::function<double(cplx)>& f) {
    const GroupPresentation& g = sys.group();
    Letter a = g.locate(xi);
    double sum = 0;
    for (std::size_t i = 0; i < A.words.size(); ++i) {
        if (!A.compatible(i, a)) continue;
        const CuspidalWord& W = A.words[i];
        sum += std::pow(derivative_modulus(W.F, xi), s) * f(apply_boundary(W.F, xi));
    }
    return sum;
}

inline double apply_twice_to_function(const CuspidalSystem& sys, const CuspidalAlphabet& A, double s,
                                      cplx xi, const std::function<double(cplx)>& f) {
    // two-step sum over admissible block pairs, composed with the chain rule
    const GroupPresentation& g = sys.group();
    Letter a = g.locate(xi);
    double sum = 0;
    for (std::size_t i = 0; i < A.words.size(); ++i) {
        if (!A.compatible(i, a)) continue;
        const CuspidalWord& W = A.words[i];
        for (std::size_t j = 0; j < A.words.size(); ++j) {
            if (!A.compatible(j, A.words[i].a0)) continue;
            const CuspidalWord& Wp = A.words[j];
            DiscMoebius F = Wp.F * W.F;
            sum += std::pow(derivative_modulus(F, xi), s) * f(apply_boundary(F, xi));
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Gibbs cylinder measure

// nu([W_1..W_n]) = lambda^{-n} int_{domain(W_n)} |D F_{w_n}|^s dmu
inline double gibbs_cylinder_measure(const CuspidalSystem& sys, const ArcGrid& grid,
                                     const EigenData& d, double s,
                                     const std::vector<CuspidalWord>& block) {
    const GroupPresentation& g = sys.group();
    if (block.empty()) throw std::invalid_argument("empty block");
    for (std::size_t i = 0; i + 1 < block.size(); ++i)
        if (!transition(g, block[i], block[i + 1])) throw std::invalid_argument("inadmissible block");
    DiscMoebius F = DiscMoebius::identity();
    for (const auto& W : block) F = F * W.F;
    const CuspidalWord& last = block.back();
    double sum = 0;
    for (int i = 0; i < grid.size(); ++i) {
        if (!domain_contains(g.alphabet, last, grid.arc_of(i))) continue;
        sum += d.mu[i] * std::pow(derivative_modulus(F, grid.node[i]), s);
    }
    return sum / std::pow(d.lambda, double(block.size()));
}

// ---------------------------------------------------------------------------
// Lasota-Yorke diagnostics for the normalized operator

struct LasotaYorkeReport {
    std::vector<double> lip;   // Lip(Lhat^k f) for k = 0..kmax
    double decay_rate = 0;     // measured geometric decay before the floor
    double C_estimate = 0;     // max_k (Lip(Lhat^k f) - theta^k Lip f)+ / ||f||
};

inline LasotaYorkeReport lasota_yorke_check(const ArcGrid& grid, const DenseMatrix& Nhat,
                                            const ArcFunction& f, double theta, int kmax) {
    LasotaYorkeReport rep;
    ArcFunction cur = f;
    rep.lip.push_back(cur.lipschitz());
    double sup0 = cur.sup();
    std::vector<double> next;
    for (int k = 1; k <= kmax; ++k) {
        Nhat.matvec(cur.values, next);
        cur.values = next;
        rep.lip.push_back(cur.lipschitz());
        double excess = rep.lip.back() - std::pow(theta, k) * rep.lip.front();
        rep.C_estimate = std::max(rep.C_estimate, excess / std::max(sup0, 1e-300));
    }
    if (rep.lip.size() > 2 && rep.lip[0] > 0) {
        // decay rate over the first couple of steps, before the sup-norm floor
        rep.decay_rate = rep.lip[1] / rep.lip[0];
    }
    return rep;
}

// measured uniform contraction factor over the alphabet and grid
inline double contraction_factor(const CuspidalSystem& sys, const CuspidalAlphabet& A,
                                 const ArcGrid& grid) {
    const GroupPresentation& g = sys.group();
    double theta = 0;
    for (std::size_t i = 0; i < A.words.size(); ++i) {
        const CuspidalWord& W = A.words[i];
        for (int n = 0; n < grid.size(); ++n) {
            if (!domain_contains(g.alphabet, W, grid.arc_of(n))) continue;
            theta = std::max(theta, derivative_modulus(W.F, grid.node[n]));
        }
    }
    return theta;
}

// Lipschitz constant of log|DF_W| over its domain, maximized over the
// alphabet; used to pin a concrete cone constant
inline double log_derivative_lipschitz(const CuspidalSystem& sys, const CuspidalAlphabet& A,
                                       const ArcGrid& grid) {
    const GroupPresentation& g = sys.group();
    double kappa = 0;
    for (const auto& W : A.words) {
        if (W.F.is_rotation()) continue;
        cplx omega = W.F.pole();
        for (int n = 0; n < grid.size(); ++n) {
            if (!domain_contains(g.alphabet, W, grid.arc_of(n))) continue;
            kappa = std::max(kappa, 2.0 / std::abs(grid.node[n] - omega));
        }
    }
    return kappa;
}

}  // namespace cuspdim
