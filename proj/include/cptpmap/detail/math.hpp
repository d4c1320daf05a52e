#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

namespace cptpmap::detail {

inline constexpr double kPi = 3.14159265358979323846;

/// Binary entropy in bits, with 0 log 0 = 0.
inline double binary_entropy(double x) {
    double h = 0.0;
    for (double v : {x, 1.0 - x}) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

/// Shannon entropy (bits) of a two-outcome distribution given as eigenvalues.
/// Small negatives from rounding are clamped to zero.
inline double entropy_bits(double lambda1, double lambda2) {
    double h = 0.0;
    for (double v : {lambda1, lambda2}) {
        if (v > 1e-15) h -= v * std::log2(v);
    }
    return h;
}

struct QuadraticRoots {
    int count = 0;  // 0, 1 (double or linear), or 2
    double r1 = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
};

/// Real roots of a*t^2 + b*t + c, stable against cancellation.
/// A vanishing leading coefficient degrades to the linear case.
inline QuadraticRoots solve_quadratic(double a, double b, double c,
                                      double a_scale = 1.0) {
    QuadraticRoots out;
    if (std::abs(a) <= 1e-14 * std::max(1.0, a_scale)) {
        if (std::abs(b) <= 1e-14 * std::max(1.0, a_scale)) return out;
        out.count = 1;
        out.r1 = out.r2 = -c / b;
        return out;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return out;
    const double sq = std::sqrt(disc);
    const double q = (b >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
    double r1, r2;
    if (q != 0.0) {
        r1 = q / a;
        r2 = c / q;
    } else {
        r1 = 0.0;
        r2 = -b / a;
    }
    if (r1 > r2) std::swap(r1, r2);
    out.count = (disc == 0.0) ? 1 : 2;
    out.r1 = r1;
    out.r2 = r2;
    return out;
}

/// Locate the flip of a monotone boolean predicate on [lo, hi].
/// Returns the midpoint of the final bracket.
template <class Pred>
double bisect_flip(Pred&& pred, double lo, double hi, int iters = 100) {
    const bool at_lo = pred(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid) == at_lo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Sign-change bisection for a continuous function. Caller guarantees
/// f(lo) and f(hi) have opposite signs.
template <class F>
double bisect_root(F&& f, double lo, double hi, double xtol, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters && (hi - lo) > xtol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimization on [a, b] to parameter tolerance xtol.
template <class F>
double golden_minimize(F&& f, double a, double b, double xtol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while ((b - a) > xtol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

/// Deterministic uniform generator (splitmix64 core). Identical sequences on
/// every platform for a given seed, unlike std:: distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Small fixed-size complex matrices. Enough linear algebra for 2x2 state
// operators and the 4x4 two-qubit network; no external solver needed.
// ---------------------------------------------------------------------------

using cxd = std::complex<double>;

struct Mat2 {
    std::array<cxd, 4> a{};  // row-major

    cxd& operator()(int i, int j) { return a[2 * i + j]; }
    const cxd& operator()(int i, int j) const { return a[2 * i + j]; }

    static Mat2 zero() { return {}; }
    static Mat2 identity() {
        Mat2 m;
        m(0, 0) = m(1, 1) = 1.0;
        return m;
    }

    Mat2 operator+(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 4; ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    Mat2 operator-(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 4; ++i) r.a[i] = a[i] - o.a[i];
        return r;
    }
    Mat2 operator*(const Mat2& o) const {
        Mat2 r;
        r(0, 0) = (*this)(0, 0) * o(0, 0) + (*this)(0, 1) * o(1, 0);
        r(0, 1) = (*this)(0, 0) * o(0, 1) + (*this)(0, 1) * o(1, 1);
        r(1, 0) = (*this)(1, 0) * o(0, 0) + (*this)(1, 1) * o(1, 0);
        r(1, 1) = (*this)(1, 0) * o(0, 1) + (*this)(1, 1) * o(1, 1);
        return r;
    }
    friend Mat2 operator*(double s, const Mat2& m) {
        Mat2 r;
        for (int i = 0; i < 4; ++i) r.a[i] = s * m.a[i];
        return r;
    }

    Mat2 adjoint() const {
        Mat2 r;
        r(0, 0) = std::conj((*this)(0, 0));
        r(0, 1) = std::conj((*this)(1, 0));
        r(1, 0) = std::conj((*this)(0, 1));
        r(1, 1) = std::conj((*this)(1, 1));
        return r;
    }

    cxd trace() const { return a[0] + a[3]; }
    cxd det() const { return a[0] * a[3] - a[1] * a[2]; }

    double hermiticity_defect() const {
        double d = 0.0;
        d = std::max(d, std::abs((*this)(0, 0) - std::conj((*this)(0, 0))));
        d = std::max(d, std::abs((*this)(1, 1) - std::conj((*this)(1, 1))));
        d = std::max(d, std::abs((*this)(0, 1) - std::conj((*this)(1, 0))));
        return d;
    }

    /// Eigenvalues of a Hermitian 2x2, ascending. Uses only the real diagonal
    /// and the off-diagonal magnitude, so tiny Hermiticity defects are ignored.
    std::array<double, 2> hermitian_eigenvalues() const {
        const double p = (*this)(0, 0).real();
        const double r = (*this)(1, 1).real();
        const double off = 0.5 * (std::abs((*this)(0, 1)) + std::abs((*this)(1, 0)));
        const double mid = 0.5 * (p + r);
        const double rad = std::hypot(0.5 * (p - r), off);
        return {mid - rad, mid + rad};
    }
};

struct Mat4 {
    std::array<cxd, 16> a{};

    cxd& operator()(int i, int j) { return a[4 * i + j]; }
    const cxd& operator()(int i, int j) const { return a[4 * i + j]; }

    static Mat4 identity() {
        Mat4 m;
        for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
        return m;
    }

    Mat4 operator*(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                const cxd v = (*this)(i, k);
                if (v == cxd{}) continue;
                for (int j = 0; j < 4; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }
    Mat4 operator+(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 16; ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    friend Mat4 operator*(double s, const Mat4& m) {
        Mat4 r;
        for (int i = 0; i < 16; ++i) r.a[i] = s * m.a[i];
        return r;
    }

    Mat4 adjoint() const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Matrix exponential by scaling-and-squaring with a Taylor core. The
/// generators used here have norm below pi, so convergence is rapid.
inline Mat4 expm(const Mat4& g) {
    int squarings = 0;
    double norm = 0.0;
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += std::abs(g(i, j));
        norm = std::max(norm, row);
    }
    while (norm > 0.25 && squarings < 40) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    Mat4 x = scale * g;
    Mat4 term = Mat4::identity();
    Mat4 sum = Mat4::identity();
    for (int k = 1; k <= 16; ++k) {
        term = (1.0 / k) * (term * x);
        sum = sum + term;
        if (term.max_abs() < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

}  // namespace cptpmap::detail
