#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

// Dense row-major matrices, power iteration for the leading eigenpair and
// a bracketed bisection root finder. Shared by every operator in the
// library so the classical oracle exercises the same code paths as the
// Fuchsian pipeline.

namespace cuspdim {

struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // row major

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    void matvec(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = a.data() + i * n;
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
            y[i] = s;
        }
    }

    void matvec_transpose(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            const double* row = a.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) y[j] += row[j] * xi;
        }
    }
};

inline double sup_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double dot(const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

struct EigenPair {
    double value = 0;
    std::vector<double> right;  // strictly positive, sup norm 1 before rescaling
    std::vector<double> left;   // nonnegative
    double residual = 0;        // ||A g - lambda g||_inf after convergence
    int iterations = 0;
};

struct eigen_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Power iteration with sup-norm renormalization. The operators here are
// entrywise nonnegative and positivity improving, so the iteration is
// guaranteed; a nonpositive iterate signals an assembly bug upstream.
inline EigenPair leading_eigen(const DenseMatrix& A, double tol = 1e-12, int max_iter = 5000) {
    const std::size_t n = A.n;
    if (n == 0) throw eigen_failure("empty matrix");
    EigenPair out;
    std::vector<double> g(n, 1.0), h(n), w(n, 1.0), wh(n);
    double lambda = 0, lambda_prev = -1;
    int it = 0;
    for (; it < max_iter; ++it) {
        A.matvec(g, h);
        lambda = sup_norm(h);
        if (!(lambda > 0)) throw eigen_failure("power iteration collapsed to zero");
        for (std::size_t i = 0; i < n; ++i) {
            h[i] /= lambda;
            if (h[i] < 0) throw eigen_failure("nonpositive iterate in power iteration");
        }
        g.swap(h);
        if (std::abs(lambda - lambda_prev) < tol * lambda && it > 4) break;
        lambda_prev = lambda;
    }
    if (it == max_iter) throw eigen_failure("power iteration did not converge");

    // a few extra sweeps tighten the eigenvector beyond the eigenvalue stop
    for (int k = 0; k < 30; ++k) {
        A.matvec(g, h);
        double m = sup_norm(h);
        for (std::size_t i = 0; i < n; ++i) h[i] /= m;
        g.swap(h);
        lambda = m;
    }

    for (int k = 0; k < 200; ++k) {
        A.matvec_transpose(w, wh);
        double m = sup_norm(wh);
        if (!(m > 0)) throw eigen_failure("left power iteration collapsed");
        for (std::size_t i = 0; i < n; ++i) wh[i] /= m;
        double diff = 0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(wh[i] - w[i]));
        w.swap(wh);
        if (diff < tol && k > 4) break;
    }

    A.matvec(g, h);
    double res = 0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(h[i] - lambda * g[i]));

    out.value = lambda;
    out.right = std::move(g);
    out.left = std::move(w);
    out.residual = res;
    out.iterations = it;
    return out;
}

// Modulus of the subdominant eigenvalue, estimated by power iteration on the
// complement of the leading spectral projector (one-step deflation against
// the left eigenvector).
inline double subdominant_modulus(const DenseMatrix& A, const EigenPair& e, int iters = 300) {
    const std::size_t n = A.n;
    std::vector<double> v(n), h(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = ((i % 2) ? 1.0 : -1.0) + 1e-3 * std::sin(7.0 * double(i));
    const double wg = dot(e.left, e.right);
    auto deflate = [&](std::vector<double>& x) {
        double c = dot(e.left, x) / wg;
        for (std::size_t i = 0; i < n; ++i) x[i] -= c * e.right[i];
    };
    deflate(v);
    double m = sup_norm(v);
    for (std::size_t i = 0; i < n; ++i) v[i] /= m;
    double growth = 0;
    for (int k = 0; k < iters; ++k) {
        A.matvec(v, h);
        deflate(h);
        growth = sup_norm(h);
        if (!(growth > 0)) return 0.0;
        for (std::size_t i = 0; i < n; ++i) h[i] /= growth;
        v.swap(h);
    }
    return growth;
}

struct bracket_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bisection for a strictly decreasing function: f(lo) > 0 > f(hi).
// Monotonicity of the pressure makes this robust; speed is irrelevant at
// these sizes.
inline double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                double tol, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (!(flo > 0.0) || !(fhi < 0.0))
        throw bracket_failure("bisection bracket not verified: f(lo)=" + std::to_string(flo) +
                              " f(hi)=" + std::to_string(fhi));
    for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Sum_{k >= n} k^(-m) by Euler-Maclaurin, m > 1.
inline double zeta_tail(double m, double n) {
    double s = 0;
    double N = n;
    while (N < n + 32) { s += std::pow(N, -m); N += 1.0; }
    double t = std::pow(N, 1.0 - m) / (m - 1.0);
    t += 0.5 * std::pow(N, -m);
    t += m * std::pow(N, -m - 1.0) / 12.0;
    t -= m * (m + 1.0) * (m + 2.0) * std::pow(N, -m - 3.0) / 720.0;
    return s + t;
}

struct LinearFit {
    double intercept = 0;
    double slope = 0;
    double max_residual = 0;
};

// least squares y ~ intercept + slope * x
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw std::invalid_argument("ill-conditioned fit");
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy * sxx - sx * sxy) / det;
    for (std::size_t i = 0; i < n; ++i)
        f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
    return f;
}

}  // namespace cuspdim
