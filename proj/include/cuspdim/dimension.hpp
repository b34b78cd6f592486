#pragma once

#include "transfer.hpp"

// Bowen-equation solver for the bounded-type sets, the finite-depth
// cylinder-pressure oracle, and the first-order coefficient pipeline
// (delta, beta, Theta).

namespace cuspdim {

struct BowenResult {
    double s = 0;
    double lambda_residual = 0;  // |lambda(s) - 1|
    int grid = 0;
};

struct SolveOptions {
    double tol_s = 1e-8;
    double eigen_tol = 1e-12;
};

// dimension of the bounded-type set at parameter T: the unique s with
// lambda(s, T) = 1; monotone bisection on a verified bracket
inline BowenResult solve_bowen(const CuspidalSystem& sys, const ArcGrid& grid, double T,
                               const SolveOptions& o = {}) {
    PreparedOperator P = prepare_operator(sys, grid, -1.0, T);
    auto lambda_at = [&](double s) {
        DenseMatrix M = assemble(P, s);
        return leading_eigen(M, o.eigen_tol).value;
    };
    double hi = 1.0;
    double lo = 0.9;
    while (lambda_at(lo) <= 1.0) {
        lo -= 0.1;
        if (lo < 0.51)
            throw bracket_failure("no Bowen bracket above s = 1/2; T below the aperiodicity "
                                  "threshold or grid too coarse");
    }
    double s = bisect_decreasing([&](double x) { return lambda_at(x) - 1.0; }, lo, hi, o.tol_s);
    BowenResult r;
    r.s = s;
    r.lambda_residual = std::abs(lambda_at(s) - 1.0);
    r.grid = grid.per_arc;
    return r;
}

// ---------------------------------------------------------------------------
// independent cylinder-pressure oracle

struct PressureBracket {
    double s_lo = 0;  // root of the inf-derivative variant
    double s_hi = 0;  // root of the sup-derivative variant
    std::size_t blocks = 0;
};

struct combinatorial_guard : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite-depth pressure roots: solve sum over admissible depth-n blocks of
// (sup |D F_block|)^s = 1 (and the inf variant). The two roots bracket the
// transfer-operator dimension.
inline PressureBracket cylinder_pressure_dim(const CuspidalSystem& sys, double T, int depth,
                                             int samples_per_arc = 8) {
    const GroupPresentation& g = sys.group();
    CuspidalAlphabet A = enumerate_alphabet(sys, T);
    const std::size_t nw = A.words.size();
    {
        double est = 1;
        for (int i = 0; i < depth; ++i) {
            est *= double(nw);
            if (est > 1e7) throw combinatorial_guard("cylinder-pressure block count exceeds 1e7");
        }
    }

    // fixed sample points per arc for the sup/inf of |D F| over domain(W)
    std::vector<std::vector<cplx>> samples(g.alphabet.size());
    for (Letter a = 0; a < g.alphabet.size(); ++a)
        for (int j = 0; j < samples_per_arc; ++j) {
            double t = g.arc[a].theta_right + g.arc[a].width * (j + 0.001) / (samples_per_arc - 0.998);
            samples[a].push_back(cplx(std::cos(t), std::sin(t)));
        }

    std::vector<double> sup_list, inf_list;
    std::function<void(const DiscMoebius&, std::size_t, int)> rec =
        [&](const DiscMoebius& F, std::size_t w, int level) {
            DiscMoebius Fw = F * A.words[w].F;
            if (level == depth) {
                double hi = 0, lo = 1e300;
                for (Letter a = 0; a < g.alphabet.size(); ++a) {
                    if (!A.compatible(w, a)) continue;
                    for (cplx xi : samples[a]) {
                        double D = derivative_modulus(Fw, xi);
                        hi = std::max(hi, D);
                        lo = std::min(lo, D);
                    }
                }
                sup_list.push_back(hi);
                inf_list.push_back(lo);
                return;
            }
            for (std::size_t v = 0; v < nw; ++v)
                if (A.compatible(w, A.words[v].a0)) rec(Fw, v, level + 1);
        };
    for (std::size_t w = 0; w < nw; ++w) rec(DiscMoebius::identity(), w, 1);

    auto root = [&](const std::vector<double>& vals) {
        auto f = [&](double s) {
            double sum = 0;
            for (double D : vals) sum += std::pow(D, s);
            return std::log(sum);
        };
        return bisect_decreasing(f, 0.05, 3.0, 1e-10);
    };
    PressureBracket b;
    b.s_hi = root(sup_list);
    b.s_lo = root(inf_list);
    b.blocks = sup_list.size();
    return b;
}

// ---------------------------------------------------------------------------
// first-order coefficients

struct sign_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// delta = int A g_{(1,inf)} dmu_{(1,inf)} < 0, the s-slope of the leading
// eigenvalue at (1, inf)
inline double compute_delta(const PreparedOperator& Pinf, const EigenData& eig) {
    DenseMatrix Amat = assemble(Pinf, 1.0, WeightKind::LogDerivative);
    std::vector<double> Ag;
    Amat.matvec(eig.g.values, Ag);
    double delta = eig.integrate(Ag);
    if (!(delta < 0)) throw sign_violation("delta must be strictly negative");
    return delta;
}

// one-sided limit of the eigenfunction at the parabolic vertex of a family,
// approached from inside the arc of the first letter
inline double eigenfunction_limit_at_vertex(const ArcGrid& grid, const ArcFunction& g,
                                            Letter a0, WordType type) {
    int m = grid.per_arc;
    int b = grid.base(a0);
    if (type == WordType::Right)  // vertex at the clockwise end, nodes 0,1
        return 1.5 * g.values[b] - 0.5 * g.values[b + 1];
    return 1.5 * g.values[b + m - 1] - 0.5 * g.values[b + m - 2];
}

// beta by the closed form: for each parabolic family (P, V) and boundary
// point xi compatible with it,
//   |P| * |D_xi F_V| * g(xi_P, side) / (mu(P)^2 |F_V(xi) - xi_P|^2)
// where |P| is the geometric-length increment per cycle and mu(P) half the
// intrinsic translation length of the cycle.
inline double compute_beta_closed_form(const CuspidalSystem& sys, const ArcGrid& grid,
                                       const EigenData& eig) {
    const GroupPresentation& g = sys.group();
    double beta = 0;
    for (const CuspidalFamily& fam : sys.families()) {
        const int p = int(fam.cycle.size());
        const double cycle_gap = std::abs(fam.tau);
        const double mu_half = 0.5 * std::abs(fam.cycle_parabolic.translation);
        const double g_limit = eigenfunction_limit_at_vertex(grid, eig.g, fam.a0, fam.type);
        for (int r = 0; r < p; ++r) {
            CuspidalWord probe;
            probe.type = fam.type;
            probe.last = fam.cycle[r];
            const DiscMoebius& FV = fam.F_prefix[r];
            for (int i = 0; i < grid.size(); ++i) {
                if (!domain_contains(g.alphabet, probe, grid.arc_of(i))) continue;
                cplx xi = grid.node[i];
                double Dv = derivative_modulus(FV, xi);
                double dist2 = std::norm(apply_boundary(FV, xi) - fam.xi_W);
                beta += eig.mu[i] * cycle_gap * Dv * g_limit / (mu_half * mu_half * dist2);
            }
        }
    }
    if (!(beta > 0)) throw sign_violation("beta must be strictly positive");
    return beta;
}

struct BetaLimitResult {
    std::vector<double> T;
    std::vector<double> scaled;  // T * int Delta_(1,T) g dmu
    double extrapolated = 0;
};

// beta by its defining limit T * int Delta_{(1,T)} g dmu, extrapolated in 1/T
inline BetaLimitResult compute_beta_limit(const CuspidalSystem& sys, const ArcGrid& grid,
                                          const EigenData& eig, const std::vector<double>& Ts) {
    BetaLimitResult out;
    for (double T : Ts) {
        PreparedOperator D = prepare_operator(sys, grid, T, kInfiniteT);
        DenseMatrix Dm = assemble(D, 1.0);
        std::vector<double> Dg;
        Dm.matvec(eig.g.values, Dg);
        out.T.push_back(T);
        out.scaled.push_back(T * eig.integrate(Dg));
    }
    std::vector<double> x;
    for (double T : Ts) x.push_back(1.0 / T);
    out.extrapolated = fit_line(x, out.scaled).intercept;
    if (!(out.extrapolated > 0)) throw sign_violation("beta must be strictly positive");
    return out;
}

inline double theta_spectral(double delta, double beta) {
    if (!(delta < 0)) throw sign_violation("theta requires delta < 0");
    if (!(beta > 0)) throw sign_violation("theta requires beta > 0");
    return beta / (-delta);
}

struct RegressionResult {
    double theta = 0;
    double slope = 0;
    double max_residual = 0;
    std::vector<double> T;
    std::vector<double> s_T;
};

// fit T (1 - s_T) against 1/T; the intercept is the first-order coefficient
inline RegressionResult theta_regression(const std::vector<double>& T,
                                         const std::vector<double>& s_T) {
    if (T.size() < 4) throw std::invalid_argument("need at least 4 values of T");
    double span = *std::max_element(T.begin(), T.end()) / *std::min_element(T.begin(), T.end());
    if (span < 8.0) throw std::invalid_argument("T values must span a factor of at least 8");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < T.size(); ++i) {
        x.push_back(1.0 / T[i]);
        y.push_back(T[i] * (1.0 - s_T[i]));
    }
    LinearFit f = fit_line(x, y);
    RegressionResult r;
    r.theta = f.intercept;
    r.slope = f.slope;
    r.max_residual = f.max_residual;
    r.T = T;
    r.s_T = s_T;
    if (!(r.theta > 0)) throw sign_violation("regression intercept must be positive");
    return r;
}

// ---------------------------------------------------------------------------
// full report

struct DimensionReport {
    std::string group;
    std::vector<double> T;
    std::vector<double> s_T;
    std::vector<double> residual;
    int grid = 0;
    double delta = 0;
    double beta_closed = 0;
    double beta_limit = 0;
    double theta_spectral = 0;
    double theta_regression = 0;
    double regression_slope = 0;
    // diagnostics
    double theta_contraction = 0;  // measured uniform contraction factor
    double aperiodicity_T0 = 0;
    double cone_constant = 0;
    double lambda_1_inf = 0;
};

struct ReportOptions {
    std::vector<double> T_list{25, 50, 100, 200};
    std::vector<double> beta_T_list{100, 200, 400, 800};
    int grid = 256;
    double tol = 1e-8;
};

inline DimensionReport dimension_report(const CuspidalSystem& sys, const ReportOptions& opt = {}) {
    const GroupPresentation& g = sys.group();
    DimensionReport rep;
    rep.group = g.name;
    rep.grid = opt.grid;
    ArcGrid grid(g, opt.grid);

    for (double T : opt.T_list) {
        SolveOptions so;
        so.tol_s = opt.tol;
        BowenResult r = solve_bowen(sys, grid, T, so);
        rep.T.push_back(T);
        rep.s_T.push_back(r.s);
        rep.residual.push_back(r.lambda_residual);
    }

    PreparedOperator Pinf = prepare_operator(sys, grid, -1.0, kInfiniteT);
    DenseMatrix Linf = assemble(Pinf, 1.0);
    EigenData eig = leading_eigendata(grid, Linf);
    rep.lambda_1_inf = eig.lambda;
    rep.delta = compute_delta(Pinf, eig);
    rep.beta_closed = compute_beta_closed_form(sys, grid, eig);
    rep.beta_limit = compute_beta_limit(sys, grid, eig, opt.beta_T_list).extrapolated;
    rep.theta_spectral = theta_spectral(rep.delta, rep.beta_closed);
    RegressionResult rr = theta_regression(rep.T, rep.s_T);
    rep.theta_regression = rr.theta;
    rep.regression_slope = rr.slope;

    CuspidalAlphabet A = enumerate_alphabet(sys, 50.0);
    rep.theta_contraction = contraction_factor(sys, A, grid);
    rep.aperiodicity_T0 = aperiodicity_threshold(sys);
    double kappa = log_derivative_lipschitz(sys, A, grid);
    rep.cone_constant = kappa / (1.0 - rep.theta_contraction);
    return rep;
}

}  // namespace cuspdim
