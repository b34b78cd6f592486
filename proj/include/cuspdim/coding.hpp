#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "group.hpp"

// Boundary expansion under the piecewise-Moebius boundary map, cuspidal
// words, their geometric lengths, the accelerated alphabet W_T and its
// transition matrix.

namespace cuspdim {

enum class WordType : std::uint8_t { Singleton, Left, Right };

using Word = std::vector<Letter>;

inline bool admissible(const Alphabet& A, const Word& w) {
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        if (w[k + 1] == A.hat[w[k]]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// boundary expansion

inline std::pair<Letter, cplx> bowen_series_step(const GroupPresentation& g, cplx xi) {
    Letter a = g.locate(xi);
    return {a, apply_boundary(g.gen_d[a].inverse(), xi)};
}

inline Word expand(const GroupPresentation& g, cplx xi, int n) {
    Word w;
    w.reserve(n);
    for (int k = 0; k < n; ++k) {
        auto [a, next] = bowen_series_step(g, xi);
        w.push_back(a);
        xi = next;
    }
    return w;
}

struct backtracking_word : std::invalid_argument {
    backtracking_word() : std::invalid_argument("word violates the no-backtracking condition") {}
};

// endpoints of the arc [a_0,...,a_n] = F_{a_0..a_{n-1}}([a_n])
inline std::pair<cplx, cplx> cylinder(const GroupPresentation& g, const Word& w) {
    if (w.empty()) throw std::invalid_argument("empty word");
    if (!admissible(g.alphabet, w)) throw backtracking_word();
    DiscMoebius F = DiscMoebius::identity();
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        F = F * g.gen_d[w[k]];
        if (k % 16 == 15) F.renormalize();
    }
    const Arc& J = g.arc[w.back()];
    return {apply_boundary(F, J.left), apply_boundary(F, J.right)};
}

// ---------------------------------------------------------------------------
// cuspidal combinatorics

// next letter of the cuspidal continuation: o(next) = o(hat(a)) -/+ 1
inline Letter cuspidal_next(const Alphabet& A, Letter a, WordType t) {
    int o = A.order[A.hat[a]];
    int shift = (t == WordType::Right) ? -1 : +1;
    return A.letter_at[((o + shift) % A.size() + A.size()) % A.size()];
}

inline WordType classify_cuspidal_type(const Alphabet& A, const Word& w, bool* is_cuspidal) {
    *is_cuspidal = true;
    if (w.size() == 1) return WordType::Singleton;
    int d1 = A.order_diff(w[1], A.hat[w[0]]);
    WordType t;
    if (d1 == -1)
        t = WordType::Right;
    else if (d1 == 1)
        t = WordType::Left;
    else {
        *is_cuspidal = false;
        return WordType::Singleton;
    }
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        if (w[k + 1] != cuspidal_next(A, w[k], t)) {
            *is_cuspidal = false;
            break;
        }
    }
    return t;
}

enum class CuspidalClass { NotCuspidal, Left, Right, Singleton };

inline CuspidalClass classify_cuspidal(const GroupPresentation& g, const Word& w) {
    if (w.empty()) throw std::invalid_argument("empty word");
    if (!admissible(g.alphabet, w)) throw backtracking_word();
    if (w.size() == 1) return CuspidalClass::Singleton;
    bool ok = false;
    WordType t = classify_cuspidal_type(g.alphabet, w, &ok);
    if (!ok) return CuspidalClass::NotCuspidal;
    return t == WordType::Right ? CuspidalClass::Right : CuspidalClass::Left;
}

// A maximal parabolic family: all cuspidal words with a fixed first letter
// and type. The letter sequence is periodic; the full cycle is a parabolic
// element, so long words factor through its closed form.
struct CuspidalFamily {
    Letter a0 = 0;
    WordType type = WordType::Left;
    std::vector<Letter> cycle;      // the p letters of one period
    DiscMoebius F_cycle;            // parabolic fixing xi_W
    ParabolicData cycle_parabolic;  // closed-form data for powers
    cplx xi_W;                      // shared endpoint of the nested cylinders
    int cusp_index = 0;
    RealMoebius chart;              // sends the vertex to infinity
    double tau = 0;                 // signed translation of the conjugated cycle
    // per residue r: prefix data for words of length k*p + r + 1
    std::vector<DiscMoebius> F_prefix;    // F over the first r+1 letters
    std::vector<RealMoebius> G_map;       // half-plane product over the first r letters
    std::vector<double> offset;           // |W|(k, r) = |k*tau + offset[r]|
};

inline double hp_real_part(const RealMoebius& G, const ExtendedPoint& p) {
    ExtendedPoint q = apply(G, p);
    if (q.infinite) throw std::runtime_error("chart image at infinity");
    return q.z.real();
}

inline CuspidalFamily make_family(const GroupPresentation& g, Letter a0, WordType type) {
    if (type == WordType::Singleton) throw std::invalid_argument("singleton has no family");
    CuspidalFamily fam;
    fam.a0 = a0;
    fam.type = type;
    fam.xi_W = (type == WordType::Right) ? g.arc[a0].right : g.arc[a0].left;

    // one period of the forced letter sequence
    Letter cur = a0;
    do {
        fam.cycle.push_back(cur);
        cur = cuspidal_next(g.alphabet, cur, type);
    } while (cur != a0);
    const int p = int(fam.cycle.size());

    DiscMoebius Fc = DiscMoebius::identity();
    RealMoebius Gc = RealMoebius::identity();
    for (Letter a : fam.cycle) {
        Fc = Fc * g.gen_d[a];
        Gc = Gc * g.gen_h[a];
    }
    fam.F_cycle = Fc;
    fam.cycle_parabolic = parabolic_data(Fc);
    // the closed form reproduces the fixed vertex; align to the stored one
    if (std::abs(fam.cycle_parabolic.fixed_point - fam.xi_W) > 1e-8)
        throw std::runtime_error("cuspidal cycle does not fix the expected vertex");
    fam.cycle_parabolic.fixed_point = fam.xi_W;

    const VertexData* v = g.find_vertex(fam.xi_W);
    if (!v) throw std::runtime_error("cuspidal vertex not in polygon data");
    fam.cusp_index = v->cusp;
    fam.chart = (v->B * g.cusps[v->cusp].rep).inverse();

    {  // chart-conjugated cycle must be a horizontal translation
        RealMoebius t = fam.chart * Gc * fam.chart.inverse();
        t.renormalize();
        if (std::abs(std::abs(t.a) - 1.0) > 1e-8 || std::abs(t.c) > 1e-8)
            throw std::runtime_error("cycle is not parabolic in the chart");
        fam.tau = t.b / t.a;
    }

    // far endpoint of the side below [a]: the arc endpoint that is not xi_W
    auto far_end = [&](Letter a) {
        cplx e = (type == WordType::Right) ? g.arc[a].left : g.arc[a].right;
        return cayley_inverse(ExtendedPoint::disc(e));
    };

    const double x0 = hp_real_part(fam.chart, far_end(a0));
    DiscMoebius Fp = DiscMoebius::identity();
    RealMoebius Gp = RealMoebius::identity();
    for (int r = 0; r < p; ++r) {
        fam.G_map.push_back(Gp);            // r letters
        Fp = Fp * g.gen_d[fam.cycle[r]];
        fam.F_prefix.push_back(Fp);         // r+1 letters
        RealMoebius MG = fam.chart * Gp;
        fam.offset.push_back(hp_real_part(MG, far_end(fam.cycle[r])) - x0);
        Gp = Gp * g.gen_h[fam.cycle[r]];
    }
    return fam;
}

// compressed cuspidal word: everything is regenerated from (a0, type, n)
struct CuspidalWord {
    Letter a0 = 0;
    WordType type = WordType::Singleton;
    int n = 0;          // combinatorial length is n+1 letters
    Letter last = 0;
    DiscMoebius F;      // F over all n+1 letters
    cplx xi_W;
    double length = 0;  // geometric length |W|
    int family = -1;    // index into the family table; -1 for singletons
    int k = 0, r = 0;   // n = k*p + r for typed words
};

inline Word letters_of(const GroupPresentation& g, const CuspidalWord& W) {
    Word w{W.a0};
    for (int j = 0; j < W.n; ++j) w.push_back(cuspidal_next(g.alphabet, w.back(), W.type));
    return w;
}

// Families are built once per presentation and shared.
class CuspidalSystem {
public:
    explicit CuspidalSystem(const GroupPresentation& g) : g_(&g) {
        for (Letter a = 0; a < g.alphabet.size(); ++a) {
            family_index_[{a, WordType::Left}] = int(families_.size());
            families_.push_back(make_family(g, a, WordType::Left));
            family_index_[{a, WordType::Right}] = int(families_.size());
            families_.push_back(make_family(g, a, WordType::Right));
        }
    }

    const GroupPresentation& group() const { return *g_; }
    const std::vector<CuspidalFamily>& families() const { return families_; }
    const CuspidalFamily& family(Letter a0, WordType t) const {
        return families_[family_index_.at({a0, t})];
    }
    int family_id(Letter a0, WordType t) const { return family_index_.at({a0, t}); }

    CuspidalWord singleton(Letter a0) const {
        CuspidalWord W;
        W.a0 = W.last = a0;
        W.type = WordType::Singleton;
        W.n = 0;
        W.F = g_->gen_d[a0];
        W.xi_W = g_->arc[a0].right;  // convention for singletons
        W.length = 0;
        return W;
    }

    CuspidalWord word(Letter a0, WordType t, int n) const {
        if (t == WordType::Singleton || n == 0) {
            if (n != 0) throw std::invalid_argument("singleton words have n = 0");
            return singleton(a0);
        }
        const CuspidalFamily& fam = family(a0, t);
        const int p = int(fam.cycle.size());
        CuspidalWord W;
        W.a0 = a0;
        W.type = t;
        W.n = n;
        W.family = family_id(a0, t);
        W.k = n / p;
        W.r = n % p;
        W.last = fam.cycle[W.r];
        W.xi_W = fam.xi_W;
        W.length = std::abs(W.k * fam.tau + fam.offset[W.r]);
        W.F = parabolic_power(fam.cycle_parabolic, W.k) * fam.F_prefix[W.r];
        return W;
    }

    double geometric_length(Letter a0, WordType t, int n) const {
        if (t == WordType::Singleton || n == 0) return 0.0;
        const CuspidalFamily& fam = family(a0, t);
        const int p = int(fam.cycle.size());
        return std::abs((n / p) * fam.tau + fam.offset[n % p]);
    }

private:
    const GroupPresentation* g_;
    std::vector<CuspidalFamily> families_;
    std::map<std::pair<Letter, WordType>, int> family_index_;
};

// Direct evaluation of the geometric length from its definition: chart the
// shared vertex to infinity and take the gap between the two vertical sides.
// Used as an independent cross-check of the family formula.
inline double geometric_length_direct(const GroupPresentation& g, const Word& w) {
    if (w.size() < 2) return 0.0;
    bool ok = false;
    WordType t = classify_cuspidal_type(g.alphabet, w, &ok);
    if (!ok) throw std::invalid_argument("word is not cuspidal");
    cplx xi_W = (t == WordType::Right) ? g.arc[w[0]].right : g.arc[w[0]].left;
    const VertexData* v = g.find_vertex(xi_W);
    if (!v) throw std::runtime_error("vertex not found");
    RealMoebius M = (v->B * g.cusps[v->cusp].rep).inverse();
    RealProduct map;
    for (std::size_t j = 0; j + 1 < w.size(); ++j) map.push(g.gen_h[w[j]]);
    auto far_end = [&](Letter a) {
        cplx e = (t == WordType::Right) ? g.arc[a].left : g.arc[a].right;
        return cayley_inverse(ExtendedPoint::disc(e));
    };
    double x0 = hp_real_part(M, far_end(w[0]));
    double x1 = hp_real_part(M * map.value, far_end(w.back()));
    return std::abs(x1 - x0);
}

// ---------------------------------------------------------------------------
// transitions and the accelerated alphabet

// letters excluded from domain(W), as order differences from hat(last letter)
inline bool domain_contains(const Alphabet& A, const CuspidalWord& W, Letter chi) {
    int diff = A.order_diff(chi, A.hat[W.last]);
    if (diff == 0) return false;
    switch (W.type) {
        case WordType::Singleton: return diff != 1 && diff != -1;
        case WordType::Left: return diff != 1;
        case WordType::Right: return diff != -1;
    }
    return false;
}

inline std::vector<Letter> domain_letters(const GroupPresentation& g, const CuspidalWord& W) {
    std::vector<Letter> out;
    for (Letter chi = 0; chi < g.alphabet.size(); ++chi)
        if (domain_contains(g.alphabet, W, chi)) out.push_back(chi);
    return out;
}

// transition W -> W': allowed iff W * W' is admissible and W * (first letter
// of W') is not a cuspidal extension of W
inline int transition(const GroupPresentation& g, const CuspidalWord& W, const CuspidalWord& Wp) {
    return domain_contains(g.alphabet, W, Wp.a0) ? 1 : 0;
}

struct TransitionMatrix {
    std::vector<CuspidalWord> words;
    std::vector<std::uint8_t> m;  // row major 0/1

    std::uint8_t at(std::size_t i, std::size_t j) const { return m[i * words.size() + j]; }
};

struct AperiodicityResult {
    bool aperiodic = false;
    std::ptrdiff_t witness_i = -1, witness_j = -1;  // failing pair if any
};

inline AperiodicityResult check_aperiodicity(const TransitionMatrix& M) {
    const std::size_t n = M.words.size();
    const std::size_t stride = (n + 63) / 64;
    std::vector<std::uint64_t> rows(n * stride, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (M.at(i, j)) rows[i * stride + j / 64] |= (std::uint64_t(1) << (j % 64));
    AperiodicityResult res;
    std::vector<std::uint64_t> acc(stride);
    std::vector<std::uint64_t> full(stride, ~std::uint64_t(0));
    if (n % 64) full[stride - 1] = (std::uint64_t(1) << (n % 64)) - 1;
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t l = 0; l < n; ++l)
            if (M.at(i, l))
                for (std::size_t q = 0; q < stride; ++q) acc[q] |= rows[l * stride + q];
        for (std::size_t q = 0; q < stride; ++q) {
            std::uint64_t missing = full[q] & ~acc[q];
            if (missing) {
                res.witness_i = std::ptrdiff_t(i);
                res.witness_j = std::ptrdiff_t(q * 64 + std::size_t(__builtin_ctzll(missing)));
                return res;
            }
        }
    }
    res.aperiodic = true;
    return res;
}

// tail family descriptor: all words of one (first letter, type, residue)
// family with k strictly above the enumeration cutoff
struct TailFamily {
    int family = 0;
    int r = 0;
    int k_min = 0;  // first excluded k
};

struct CuspidalAlphabet {
    double T = 0;
    std::vector<CuspidalWord> words;           // all |W| <= T
    std::vector<TailFamily> tails;             // the complement of words in W
    // words[i] may follow letter a iff compat[i*2d + a]
    std::vector<std::uint8_t> compat;
    int nletters = 0;

    bool compatible(std::size_t i, Letter a) const { return compat[i * nletters + a] != 0; }
};

inline CuspidalAlphabet enumerate_alphabet(const CuspidalSystem& sys, double T) {
    if (!(T > 0)) throw std::invalid_argument("enumeration bound must be positive");
    const GroupPresentation& g = sys.group();
    CuspidalAlphabet out;
    out.T = T;
    out.nletters = g.alphabet.size();

    for (Letter a = 0; a < g.alphabet.size(); ++a) out.words.push_back(sys.singleton(a));

    for (int f = 0; f < int(sys.families().size()); ++f) {
        const CuspidalFamily& fam = sys.families()[f];
        const int p = int(fam.cycle.size());
        for (int r = 0; r < p; ++r) {
            int k = (r == 0) ? 1 : 0;  // n = k*p + r >= 1
            int misses = 0;
            int k_min_tail = k;
            while (misses < 3) {
                double len = std::abs(k * fam.tau + fam.offset[r]);
                if (len <= T) {
                    out.words.push_back(sys.word(fam.a0, fam.type, k * p + r));
                    k_min_tail = k + 1;
                    misses = 0;
                } else {
                    ++misses;
                }
                ++k;
            }
            // lengths are eventually monotone; make sure nothing beyond the
            // cutoff sneaks back under the bound
            for (int kk = k_min_tail; kk < k_min_tail + 2; ++kk)
                if (std::abs(kk * fam.tau + fam.offset[r]) <= T)
                    throw std::runtime_error("alphabet enumeration: non-monotone tail");
            out.tails.push_back({f, r, k_min_tail});
        }
    }

    std::sort(out.words.begin(), out.words.end(), [](const CuspidalWord& x, const CuspidalWord& y) {
        if (x.n != y.n) return x.n < y.n;
        if (x.a0 != y.a0) return x.a0 < y.a0;
        return int(x.type) < int(y.type);
    });

    out.compat.assign(out.words.size() * out.nletters, 0);
    for (std::size_t i = 0; i < out.words.size(); ++i)
        for (Letter a = 0; a < out.nletters; ++a)
            out.compat[i * out.nletters + a] = domain_contains(g.alphabet, out.words[i], a) ? 1 : 0;
    return out;
}

inline TransitionMatrix transition_matrix(const GroupPresentation& g, const CuspidalAlphabet& A) {
    TransitionMatrix M;
    M.words = A.words;
    const std::size_t n = A.words.size();
    M.m.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            M.m[i * n + j] = A.compatible(i, A.words[j].a0) ? 1 : 0;
    (void)g;
    return M;
}

// smallest enumeration bound at which the two-step connectivity holds
inline double aperiodicity_threshold(const CuspidalSystem& sys, double T_max = 32.0) {
    std::vector<double> candidates;
    CuspidalAlphabet big = enumerate_alphabet(sys, T_max);
    for (const auto& w : big.words)
        if (w.length > 0) candidates.push_back(w.length);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                     candidates.end());
    for (double T : candidates) {
        CuspidalAlphabet A = enumerate_alphabet(sys, T + 1e-9);
        if (check_aperiodicity(transition_matrix(sys.group(), A)).aperiodic) return T;
    }
    throw std::runtime_error("no aperiodic threshold below T_max");
}

// ---------------------------------------------------------------------------
// cuspidal decomposition (the accelerated expansion)

struct Decomposition {
    std::vector<CuspidalWord> blocks;
    bool truncated = false;  // input ended inside a cuspidal run
};

inline Decomposition cuspidal_decompose(const CuspidalSystem& sys, const Word& w) {
    const GroupPresentation& g = sys.group();
    if (!admissible(g.alphabet, w)) throw backtracking_word();
    Decomposition out;
    std::size_t pos = 0;
    while (pos < w.size()) {
        Letter a0 = w[pos];
        std::size_t len = 1;
        if (pos + 1 < w.size()) {
            int d1 = g.alphabet.order_diff(w[pos + 1], g.alphabet.hat[a0]);
            WordType t = (d1 == -1) ? WordType::Right : (d1 == 1 ? WordType::Left : WordType::Singleton);
            if (t != WordType::Singleton) {
                Letter cur = a0;
                while (pos + len < w.size() && w[pos + len] == cuspidal_next(g.alphabet, cur, t)) {
                    cur = w[pos + len];
                    ++len;
                }
                out.blocks.push_back(sys.word(a0, t, int(len) - 1));
                if (pos + len == w.size()) out.truncated = true;
                pos += len;
                continue;
            }
        }
        out.blocks.push_back(sys.singleton(a0));
        if (pos + 1 == w.size()) out.truncated = true;
        pos += 1;
    }
    // consecutive blocks must be allowed by the transition predicate
    for (std::size_t i = 0; i + 1 < out.blocks.size(); ++i)
        if (!transition(g, out.blocks[i], out.blocks[i + 1]))
            throw std::runtime_error("cuspidal decomposition produced a forbidden transition");
    return out;
}

// boundary point with a prescribed accelerated expansion (periodically
// repeated); converges geometrically in the block count
inline cplx decode(const CuspidalSystem& sys, const std::vector<CuspidalWord>& blocks, int repeats = 40) {
    const GroupPresentation& g = sys.group();
    if (blocks.empty()) throw std::invalid_argument("decode: empty block list");
    DiscMoebius F = DiscMoebius::identity();
    int count = 0;
    for (int rep = 0; rep < repeats; ++rep) {
        for (const auto& b : blocks) {
            F = F * b.F;
            if (++count % 8 == 0) F.renormalize();
        }
        if (!transition(g, blocks.back(), blocks.front())) break;  // cannot repeat
    }
    const CuspidalWord& last = blocks.back();
    cplx seed = g.arc[domain_letters(g, last).front()].midpoint();
    return apply_boundary(F, seed);
}

}  // namespace cuspdim
