#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

// Moebius arithmetic in the upper half plane (SL(2,R)) and in the unit
// disc model (SU(1,1)), with isometric circles, boundary derivatives,
// cusp denominators and horoballs.

namespace cuspdim {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// ad - bc evaluated with Kahan's compensation; exact cancellation is the
// normal case here, the naive formula loses all digits for large entries
inline double det2x2(double a, double b, double c, double d) {
    double w = b * c;
    double e = std::fma(-b, c, w);
    double f = std::fma(a, d, -w);
    return f + e;
}

// z -> (az+b)/(cz+d) with real entries, det = 1.
struct RealMoebius {
    double a = 1, b = 0, c = 0, d = 1;

    constexpr RealMoebius() = default;
    constexpr RealMoebius(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    double det() const { return det2x2(a, b, c, d); }
    double trace() const { return a + d; }

    RealMoebius inverse() const { return {d, -b, -c, a}; }

    // divide by sqrt(det); keeps long products on the det=1 sheet. Skipped
    // when the measured determinant is outside its trust region (for very
    // large entries det-1 sits below representability and rescaling would
    // only inject noise).
    void renormalize() {
        double dt = det();
        if (!(dt > 0.25 && dt < 4.0)) return;
        double s = std::sqrt(dt);
        a /= s; b /= s; c /= s; d /= s;
    }

    static constexpr RealMoebius identity() { return {}; }
};

inline RealMoebius operator*(const RealMoebius& A, const RealMoebius& B) {
    return {A.a * B.a + A.b * B.c, A.a * B.b + A.b * B.d,
            A.c * B.a + A.d * B.c, A.c * B.b + A.d * B.d};
}

// Accumulates products of unimodular matrices, renormalizing every 16
// factors so determinant drift stays near machine precision.
struct RealProduct {
    RealMoebius value;
    int count = 0;

    void push(const RealMoebius& g) {
        value = value * g;
        if (++count % 16 == 0) value.renormalize();
    }
};

// [[alpha, conj(beta)], [beta, conj(alpha)]] with |alpha|^2-|beta|^2 = 1,
// acting on the closed unit disc. Defined up to overall sign.
struct DiscMoebius {
    cplx alpha{1.0, 0.0};
    cplx beta{0.0, 0.0};

    DiscMoebius() = default;
    DiscMoebius(cplx al, cplx be) : alpha(al), beta(be) {}

    double unitarity_defect() const { return std::norm(alpha) - std::norm(beta) - 1.0; }

    DiscMoebius inverse() const { return {std::conj(alpha), -beta}; }

    void renormalize() {
        double s = std::sqrt(std::norm(alpha) - std::norm(beta));
        alpha /= s; beta /= s;
    }

    bool is_rotation(double tol = 1e-14) const { return std::abs(beta) < tol; }

    // pole of the map, -conj(alpha)/beta; lies strictly outside the closed disc
    cplx pole() const { return -std::conj(alpha) / beta; }

    static DiscMoebius identity() { return {}; }
};

inline DiscMoebius operator*(const DiscMoebius& A, const DiscMoebius& B) {
    return {A.alpha * B.alpha + std::conj(A.beta) * B.beta,
            A.beta * B.alpha + std::conj(A.alpha) * B.beta};
}

// equality modulo the overall sign ambiguity of SU(1,1) lifts
inline bool same_up_to_sign(const DiscMoebius& F, const DiscMoebius& G, double tol = 1e-10) {
    double plus = std::abs(F.alpha - G.alpha) + std::abs(F.beta - G.beta);
    double minus = std::abs(F.alpha + G.alpha) + std::abs(F.beta + G.beta);
    return std::min(plus, minus) < tol;
}

enum class Model { HalfPlane, Disc };

// A boundary (or interior) point of one of the two models. Infinity is kept
// as an explicit tag, never as an IEEE infinity inside arithmetic.
struct ExtendedPoint {
    Model model = Model::HalfPlane;
    bool infinite = false;
    cplx z{0.0, 0.0};

    static ExtendedPoint half_plane(cplx z) { return {Model::HalfPlane, false, z}; }
    static ExtendedPoint half_plane(double x) { return {Model::HalfPlane, false, cplx(x, 0.0)}; }
    static ExtendedPoint infinity() { return {Model::HalfPlane, true, cplx(0.0, 0.0)}; }
    static ExtendedPoint disc(cplx z) { return {Model::Disc, false, z}; }
    // unit-modulus boundary point of the disc, renormalized
    static ExtendedPoint disc_boundary(cplx z) { return {Model::Disc, false, z / std::abs(z)}; }
};

struct model_mismatch : std::runtime_error {
    model_mismatch() : std::runtime_error("disc/half-plane model mismatch") {}
};

inline ExtendedPoint apply(const RealMoebius& G, const ExtendedPoint& p) {
    if (p.model != Model::HalfPlane) throw model_mismatch();
    if (p.infinite) {
        if (G.c == 0.0) return ExtendedPoint::infinity();
        return ExtendedPoint::half_plane(cplx(G.a / G.c, 0.0));
    }
    cplx den = G.c * p.z + G.d;
    if (std::abs(den) == 0.0) return ExtendedPoint::infinity();
    return ExtendedPoint::half_plane((G.a * p.z + G.b) / den);
}

inline ExtendedPoint apply(const DiscMoebius& F, const ExtendedPoint& p) {
    if (p.model != Model::Disc) throw model_mismatch();
    cplx w = (F.alpha * p.z + std::conj(F.beta)) / (F.beta * p.z + std::conj(F.alpha));
    // boundary stays on the boundary; renormalize to keep |w| = 1 exactly
    if (std::abs(std::abs(p.z) - 1.0) < 1e-9) w /= std::abs(w);
    return ExtendedPoint::disc(w);
}

// boundary action on a unit complex number directly
inline cplx apply_boundary(const DiscMoebius& F, cplx xi) {
    cplx w = (F.alpha * xi + std::conj(F.beta)) / (F.beta * xi + std::conj(F.alpha));
    return w / std::abs(w);
}

// Cayley transform z -> (z-i)/(z+i) from the half plane to the disc
inline cplx cayley(cplx z) { return (z - cplx(0, 1)) / (z + cplx(0, 1)); }
inline ExtendedPoint cayley(const ExtendedPoint& p) {
    if (p.model != Model::HalfPlane) throw model_mismatch();
    if (p.infinite) return ExtendedPoint::disc(cplx(1.0, 0.0));
    return ExtendedPoint::disc(cayley(p.z));
}
// inverse Cayley: w -> i(1+w)/(1-w)
inline ExtendedPoint cayley_inverse(const ExtendedPoint& p) {
    if (p.model != Model::Disc) throw model_mismatch();
    cplx den = 1.0 - p.z;
    if (std::abs(den) < 1e-14) return ExtendedPoint::infinity();
    return ExtendedPoint::half_plane(cplx(0, 1) * (1.0 + p.z) / den);
}

// conjugation of SL(2,R) into SU(1,1) by the Cayley transform
inline DiscMoebius to_disc(const RealMoebius& G) {
    cplx alpha(0.5 * (G.a + G.d), 0.5 * (G.b - G.c));
    cplx beta(0.5 * (G.a - G.d), 0.5 * (G.b + G.c));
    return {alpha, beta};
}

// |D_xi F| for xi on the unit circle; rotations give exactly 1
inline double derivative_modulus(const DiscMoebius& F, cplx xi) {
    if (F.is_rotation()) return 1.0;
    cplx omega = F.pole();
    double dist2 = std::norm(xi - omega);
    if (dist2 == 0.0) throw std::domain_error("derivative at the pole");
    return 1.0 / (std::norm(F.beta) * dist2);
}

inline double derivative_modulus(const DiscMoebius& F, const ExtendedPoint& p) {
    if (p.model != Model::Disc) throw model_mismatch();
    return derivative_modulus(F, p.z);
}

struct IsometricCircle {
    cplx center;
    double radius;
};

struct no_isometric_circle : std::runtime_error {
    no_isometric_circle() : std::runtime_error("rotation has no isometric circle") {}
};

inline IsometricCircle isometric_circle(const DiscMoebius& F) {
    if (F.is_rotation()) throw no_isometric_circle();
    return {F.pole(), 1.0 / std::abs(F.beta)};
}

// denominator of the parabolic point G*z_k, with z_k = A_k * infinity
inline double denominator(const RealMoebius& G, std::size_t k, const std::vector<RealMoebius>& cusp_reps) {
    if (k >= cusp_reps.size()) throw std::out_of_range("cusp index");
    RealMoebius GA = G * cusp_reps[k];
    return std::abs(GA.c);
}

// tangency point and euclidean diameter of a translated horoball
struct Horoball {
    bool half_plane_marker = false;  // image when c(G)=0: a horizontal half plane
    ExtendedPoint tangency = ExtendedPoint::infinity();
    double diameter = 0;
};

inline Horoball horoball_image(const RealMoebius& G, double T) {
    Horoball h;
    if (G.c == 0.0) {
        h.half_plane_marker = true;
        return h;
    }
    h.tangency = ExtendedPoint::half_plane(cplx(G.a / G.c, 0.0));
    h.diameter = 1.0 / (T * G.c * G.c);
    return h;
}

// Parabolic elements of SU(1,1).
//
// A parabolic F fixing xi0 on the unit circle, conjugate to z -> z + t in the
// half plane, has alpha = 1 + i t/2 and beta = conj(xi0) * i t/2 (after
// normalizing the sign of the lift so Re(alpha) = +1).
inline DiscMoebius parabolic_about(cplx xi0, double t) {
    cplx it2(0.0, 0.5 * t);
    return {cplx(1.0, 0.0) + it2, std::conj(xi0) * it2};
}

struct ParabolicData {
    cplx fixed_point;    // on the unit circle
    double translation;  // signed half-plane translation length t
};

inline bool is_parabolic(const DiscMoebius& F, double tol = 1e-9) {
    double tr = 2.0 * F.alpha.real();
    return std::abs(std::abs(tr) - 2.0) < tol && !F.is_rotation();
}

inline ParabolicData parabolic_data(const DiscMoebius& F_in) {
    DiscMoebius F = F_in;
    if (F.alpha.real() < 0) { F.alpha = -F.alpha; F.beta = -F.beta; }
    if (!is_parabolic(F)) throw std::domain_error("not parabolic");
    double t = 2.0 * F.alpha.imag();
    cplx xi0 = std::conj(F.beta / cplx(0.0, 0.5 * t));
    return {xi0 / std::abs(xi0), t};
}

// k-th power of a parabolic via the closed form; exact for any k
inline DiscMoebius parabolic_power(const ParabolicData& p, double k) {
    return parabolic_about(p.fixed_point, k * p.translation);
}

}  // namespace cuspdim
