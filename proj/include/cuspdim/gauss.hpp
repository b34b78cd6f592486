#pragma once

#include "linalg.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

// Classical continued-fraction pipeline on [0,1]: transfer operators for the
// branch maps x -> 1/(k+x), dimensions of the bounded-quotient sets, and the
// first-order constant 6/pi^2. Serves as the externally checkable oracle for
// the spectral machinery; it runs through the same eigensolver and root
// finder as the Fuchsian pipeline.

namespace cuspdim::gauss {

constexpr double kInfiniteBranches = std::numeric_limits<double>::infinity();

struct Grid {
    int m = 0;
    std::vector<double> x;

    // clustered nodes: branch images crowd near 0, so use a cosine profile
    explicit Grid(int m_) : m(m_) {
        x.resize(m);
        for (int i = 0; i < m; ++i) x[i] = 0.5 * (1.0 - std::cos(kPi * (i + 0.5) / m));
    }

    struct Stencil {
        int j1 = 0, j2 = 0;
        double w1 = 1, w2 = 0;
    };

    Stencil stencil(double t) const {
        Stencil s;
        if (t <= x.front()) { s.j1 = s.j2 = 0; return s; }
        if (t >= x.back()) { s.j1 = s.j2 = m - 1; return s; }
        int lo = 0, hi = m - 1;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (x[mid] <= t ? lo : hi) = mid;
        }
        s.j1 = lo;
        s.j2 = hi;
        s.w2 = (t - x[lo]) / (x[hi] - x[lo]);
        s.w1 = 1.0 - s.w2;
        return s;
    }

private:
    static constexpr double kPi = 3.14159265358979323846;
};

// Sum_{k > K} (k+x)^(-m) by Euler-Maclaurin
inline double shifted_zeta_tail(double m, int K, double x) {
    double s = 0;
    double N = K + 1;
    for (int i = 0; i < 24; ++i) { s += std::pow(N + x, -m); N += 1.0; }
    double z = N + x;
    double t = std::pow(z, 1.0 - m) / (m - 1.0);
    t += 0.5 * std::pow(z, -m);
    t += m * std::pow(z, -m - 1.0) / 12.0;
    t -= m * (m + 1.0) * (m + 2.0) * std::pow(z, -m - 3.0) / 720.0;
    return s + t;
}

// collocation matrix of f -> sum_k (k+x)^(-2s) f(1/(k+x)); N may be infinite
inline DenseMatrix gauss_operator(double s, double N, const Grid& grid, int K_explicit = 512) {
    const bool infinite = std::isinf(N);
    if (infinite && !(s > 0.5)) throw std::invalid_argument("need s > 1/2 for infinitely many branches");
    const int K = infinite ? K_explicit : int(N);
    DenseMatrix M(grid.m);
    for (int i = 0; i < grid.m; ++i) {
        const double xi = grid.x[i];
        for (int k = 1; k <= K; ++k) {
            double w = std::pow(k + xi, -2.0 * s);
            auto st = grid.stencil(1.0 / (k + xi));
            M(i, st.j1) += w * st.w1;
            M(i, st.j2) += w * st.w2;
        }
        if (infinite) {
            // remaining branches: total mass at their weighted mean image
            double S0 = shifted_zeta_tail(2 * s, K, xi);
            double S1 = shifted_zeta_tail(2 * s + 1, K, xi);
            auto st = grid.stencil(S1 / S0);
            M(i, st.j1) += S0 * st.w1;
            M(i, st.j2) += S0 * st.w2;
        }
    }
    return M;
}

// operator applied to a smooth function at a point, without any grid; the
// infinite tail uses a second-order expansion of f at 0
inline double apply_to_function(double s, double N, const std::function<double(double)>& f,
                                double x, int K_explicit = 500) {
    const bool infinite = std::isinf(N);
    const int K = infinite ? K_explicit : int(N);
    double sum = 0;
    for (int k = 1; k <= K; ++k) sum += std::pow(k + x, -2.0 * s) * f(1.0 / (k + x));
    if (infinite) {
        const double e = 1e-3;
        double f0 = f(0.0), fe = f(e), f2e = f(2 * e);
        double f1 = (-3 * f0 + 4 * fe - f2e) / (2 * e);
        double f2 = (f0 - 2 * fe + f2e) / (e * e);
        sum += f0 * shifted_zeta_tail(2 * s, K, x);
        sum += f1 * shifted_zeta_tail(2 * s + 1, K, x);
        sum += 0.5 * f2 * shifted_zeta_tail(2 * s + 2, K, x);
    }
    return sum;
}

inline double leading_eigenvalue(double s, double N, const Grid& grid, double tol = 1e-12) {
    return leading_eigen(gauss_operator(s, N, grid), tol).value;
}

// Hausdorff dimension of the set of continued fractions with quotients <= N
inline double gauss_dim(int N, int grid_size = 256, double tol = 1e-10) {
    if (N < 1) throw std::invalid_argument("branch bound must be >= 1");
    if (N == 1) return 0.0;  // a single point by convention
    Grid grid(grid_size);
    auto f = [&](double s) { return std::log(leading_eigenvalue(s, double(N), grid)); };
    return bisect_decreasing(f, 0.2, 1.0, tol);
}

// finite-depth cylinder-pressure bracket over branch blocks (k_1..k_n)
struct PressureBracket {
    double s_lo = 0, s_hi = 0;
    std::size_t blocks = 0;
};

inline PressureBracket cylinder_pressure_dim(int N, int depth) {
    if (std::pow(double(N), depth) > 1e7) throw std::runtime_error("too many blocks");
    struct Frac { double a = 0, b = 1, c = 1, d = 0; };  // x -> (a x + b)/(c x + d)
    std::vector<double> sup_list, inf_list;
    std::function<void(Frac, int)> rec = [&](Frac F, int level) {
        for (int k = 1; k <= N; ++k) {
            // compose with x -> 1/(k+x)
            Frac G{F.b, F.a + double(k) * F.b, F.d, F.c + double(k) * F.d};
            if (level == depth) {
                double d0 = 1.0 / ((G.c * 0 + G.d) * (G.c * 0 + G.d));
                double d1 = 1.0 / ((G.c * 1 + G.d) * (G.c * 1 + G.d));
                sup_list.push_back(std::max(d0, d1));
                inf_list.push_back(std::min(d0, d1));
            } else {
                rec(G, level + 1);
            }
        }
    };
    rec(Frac{}, 1);
    auto root = [&](const std::vector<double>& vals) {
        auto f = [&](double s) {
            double sum = 0;
            for (double D : vals) sum += std::pow(D, s);
            return std::log(sum);
        };
        return bisect_decreasing(f, 0.05, 2.0, 1e-12);
    };
    PressureBracket b;
    b.s_hi = root(sup_list);
    b.s_lo = root(inf_list);
    b.blocks = sup_list.size();
    return b;
}

struct HensleyFit {
    std::vector<int> N;
    std::vector<double> dim;
    std::vector<double> scaled;  // N (1 - dim)
    double constant = 0;         // extrapolated limit of N (1 - dim)
    double slope = 0;            // coefficient of the log(N)/N correction
};

// extrapolate N (1 - dim E_N) -> 6/pi^2, removing the log(N)/N correction
inline HensleyFit hensley_fit(const std::vector<int>& Ns, int grid_size = 192) {
    if (Ns.size() < 2) throw std::invalid_argument("need at least two branch bounds");
    double span = double(*std::max_element(Ns.begin(), Ns.end())) /
                  double(*std::min_element(Ns.begin(), Ns.end()));
    if (span < 5.0) throw std::invalid_argument("branch bounds must span a factor of at least 5");
    HensleyFit out;
    out.N = Ns;
    for (int N : Ns) {
        double d = gauss_dim(N, grid_size);
        out.dim.push_back(d);
        out.scaled.push_back(N * (1.0 - d));
    }
    // least squares on the basis {1, log(N)/N}
    double sxx = 0, sx = 0, sxy = 0, sy = 0;
    const double n = double(Ns.size());
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        double xi = std::log(double(Ns[i])) / double(Ns[i]);
        sx += xi; sxx += xi * xi; sy += out.scaled[i]; sxy += xi * out.scaled[i];
    }
    double det = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / det;
    out.constant = (sy * sxx - sx * sxy) / det;
    return out;
}

}  // namespace cuspdim::gauss
