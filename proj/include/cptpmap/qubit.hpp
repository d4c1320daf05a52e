#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cptpmap/detail/math.hpp"
#include "cptpmap/errors.hpp"

namespace cptpmap {

using detail::Mat2;
using detail::cxd;

/// A qubit state as a point in the Bloch ball. |r| <= 1, with |r| = 1 for
/// pure states.
struct BlochState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double radius() const { return std::sqrt(x * x + y * y + z * z); }

    double dot(const BlochState& o) const { return x * o.x + y * o.y + z * o.z; }
};

/// Validated 2x2 density operator: Hermitian, unit trace, positive
/// semidefinite (all within construction tolerances).
class DensityMatrix2 {
public:
    static constexpr double kConstructTol = 1e-12;

    explicit DensityMatrix2(const Mat2& m) : m_(m) {
        if (m.hermiticity_defect() > kConstructTol)
            throw std::invalid_argument("DensityMatrix2: not Hermitian");
        if (std::abs(m.trace() - cxd{1.0, 0.0}) > kConstructTol)
            throw std::invalid_argument("DensityMatrix2: trace != 1");
        const auto ev = m.hermitian_eigenvalues();
        if (ev[0] < -kConstructTol)
            throw std::invalid_argument("DensityMatrix2: negative eigenvalue");
    }

    const Mat2& matrix() const { return m_; }
    std::array<double, 2> eigenvalues() const { return m_.hermitian_eigenvalues(); }

private:
    Mat2 m_;
};

/// rho = (I + r . sigma)/2
inline DensityMatrix2 density_of(const BlochState& b) {
    if (b.radius() > 1.0 + 1e-12)
        throw std::invalid_argument("density_of: Bloch vector outside the unit ball");
    Mat2 m;
    m(0, 0) = 0.5 * (1.0 + b.z);
    m(0, 1) = 0.5 * cxd{b.x, -b.y};
    m(1, 0) = 0.5 * cxd{b.x, b.y};
    m(1, 1) = 0.5 * (1.0 - b.z);
    return DensityMatrix2(m);
}

inline BlochState bloch_of(const DensityMatrix2& rho) {
    const Mat2& m = rho.matrix();
    return BlochState{2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
                      m(0, 0).real() - m(1, 1).real()};
}

/// <alpha|-alpha> = exp(-2 a^2) for a real, non-negative amplitude.
inline double coherent_overlap(double a) {
    if (a < 0.0) throw std::invalid_argument("coherent_overlap: negative amplitude");
    return std::exp(-2.0 * a * a);
}

/// Trace norm distance between two Hermitian 2x2 operators:
/// sum of the absolute eigenvalues of A - B. Trace-scaled operators such as
/// t*rho are allowed.
inline double trace_norm_distance(const Mat2& a, const Mat2& b) {
    if (a.hermiticity_defect() > 1e-10 || b.hermiticity_defect() > 1e-10)
        throw std::invalid_argument("trace_norm_distance: non-Hermitian input");
    const Mat2 d = a - b;
    const auto ev = d.hermitian_eigenvalues();
    return std::abs(ev[0]) + std::abs(ev[1]);
}

inline double trace_norm_distance(const DensityMatrix2& a, const DensityMatrix2& b) {
    return trace_norm_distance(a.matrix(), b.matrix());
}

/// Square-root fidelity F = Tr sqrt(sqrt(rho) sigma sqrt(rho)). For qubits
/// this reduces to sqrt(Tr(rho sigma) + 2 sqrt(det rho det sigma)); for pure
/// states it equals |<psi|chi>|.
inline double fidelity(const DensityMatrix2& rho, const DensityMatrix2& sigma) {
    const double t = (rho.matrix() * sigma.matrix()).trace().real();
    const double dr = std::max(rho.matrix().det().real(), 0.0);
    const double ds = std::max(sigma.matrix().det().real(), 0.0);
    const double f2 = t + 2.0 * std::sqrt(dr * ds);
    return std::sqrt(std::max(f2, 0.0));
}

/// Von Neumann entropy in bits.
inline double von_neumann_entropy(const DensityMatrix2& rho) {
    const auto ev = rho.eigenvalues();
    return detail::entropy_bits(std::max(ev[0], 0.0), std::max(ev[1], 0.0));
}

/// Half-angle parameterization of an (input pair, template pair) geometry:
/// both Bloch vectors of a pair share the length (f resp. g) and subtend the
/// angle 2*phi (resp. 2*theta), i.e. 2 sin^2 phi = 1 - f1.f2/f^2.
struct StatePairAngles {
    double f = 1.0;      // input purity radius, (0, 1]
    double g = 1.0;      // template purity radius, (0, 1]
    double phi = 0.0;    // input half-angle, [0, pi]
    double theta = 0.0;  // template half-angle, [0, pi]
};

namespace detail {
inline double half_angle_of(const BlochState& v1, const BlochState& v2, double r) {
    // 2 sin^2 phi = 1 - v1.v2 / r^2  =>  cos(2 phi) = v1.v2 / r^2
    const double c = std::clamp(v1.dot(v2) / (r * r), -1.0, 1.0);
    return 0.5 * std::acos(c);
}
}  // namespace detail

/// Builds the angle parameterization from two equal-length Bloch pairs.
inline StatePairAngles state_pair_angles(const BlochState& f1, const BlochState& f2,
                                         const BlochState& g1, const BlochState& g2) {
    const double f = f1.radius();
    const double g = g1.radius();
    if (std::abs(f - f2.radius()) > 1e-10 || std::abs(g - g2.radius()) > 1e-10)
        throw std::invalid_argument("state_pair_angles: pair radii differ");
    if (f <= 0.0 || g <= 0.0)
        throw std::invalid_argument("state_pair_angles: zero-length Bloch vector");
    return StatePairAngles{f, g, detail::half_angle_of(f1, f2, f),
                           detail::half_angle_of(g1, g2, g)};
}

/// The canonical embedding of a pair geometry into the x-z plane:
/// vectors of length r at +-phi from the z axis.
inline std::array<BlochState, 2> bloch_pair(double r, double half_angle) {
    const double s = r * std::sin(half_angle);
    const double c = r * std::cos(half_angle);
    return {BlochState{s, 0.0, c}, BlochState{-s, 0.0, c}};
}

}  // namespace cptpmap
