#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "cptpmap/detail/math.hpp"
#include "cptpmap/errors.hpp"
#include "cptpmap/qubit.hpp"

namespace cptpmap {

/// The (R, X, Y0) triple that fully parameterizes the mapping-existence
/// problem between two equal-length state pairs:
///   R  = f^2 sin^2 phi / (g^2 sin^2 theta)   >= 0
///   X  = (1 - f^2) / (f^2 sin^2 phi)         >= 0
///   Y0 = 1 + (1 - g^2) / (g^2 sin^2 theta)   >= 1
struct AUParameters {
    double R = 0.0;
    double X = 0.0;
    double Y0 = 1.0;

    AUParameters(double R_, double X_, double Y0_) : R(R_), X(X_), Y0(Y0_) {
        if (R < 0.0 || X < 0.0 || Y0 < 1.0 - 1e-12)
            throw std::invalid_argument("AUParameters: need R >= 0, X >= 0, Y0 >= 1");
    }

    /// Y_{nX} = Y0 - (n + X) R
    double y_nx(int n) const { return Y0 - (n + X) * R; }
};

inline AUParameters au_parameters(const StatePairAngles& pair) {
    const double sp = std::sin(pair.phi);
    const double st = std::sin(pair.theta);
    if (pair.f <= 0.0 || pair.f > 1.0 + 1e-12 || pair.g <= 0.0 || pair.g > 1.0 + 1e-12)
        throw std::invalid_argument("au_parameters: purity radii must lie in (0, 1]");
    if (std::abs(sp) < 1e-12 || std::abs(st) < 1e-12)
        throw degenerate_geometry_error(
            "au_parameters: parallel or antiparallel Bloch pair");
    const double fs = pair.f * pair.f * sp * sp;
    const double gs = pair.g * pair.g * st * st;
    return AUParameters(fs / gs, (1.0 - pair.f * pair.f) / fs,
                        1.0 + (1.0 - pair.g * pair.g) / gs);
}

/// Output mixing weights (p, q) in [0,1]^2 with centered coordinates
/// phat = p - 1/2, qhat = q - 1/2.
struct MixtureWeights {
    double p = 0.5;
    double q = 0.5;

    MixtureWeights(double p_, double q_) : p(p_), q(q_) {
        if (p < -1e-12 || p > 1.0 + 1e-12 || q < -1e-12 || q > 1.0 + 1e-12)
            throw std::invalid_argument("MixtureWeights: (p, q) outside [0,1]^2");
    }

    double phat() const { return p - 0.5; }
    double qhat() const { return q - 0.5; }
};

/// Real zeros of one of the parabolic h functions. `degenerate` marks a
/// collapsed (linear) leading coefficient.
struct ParabolaRoots {
    std::optional<double> lower;
    std::optional<double> upper;
    bool degenerate = false;
};

struct HValues {
    double h_a = 0.0;
    double h_b = 0.0;
    double h = 0.0;
};

/// h^A(t) = X - 2(2+X) t + X t^2
/// h^B(t) = (Y0 - 4 phat^2) - 2(Y0 + 4 phat qhat) t + (Y0 - 4 qhat^2) t^2
/// h      = h^B - |h^B| - R (h^A - |h^A|)
inline HValues h_functions(const MixtureWeights& w, const AUParameters& par, double t) {
    if (t < 0.0) throw std::invalid_argument("h_functions: t must be non-negative");
    const double ph = w.phat(), qh = w.qhat();
    HValues v;
    v.h_a = par.X - 2.0 * (2.0 + par.X) * t + par.X * t * t;
    v.h_b = (par.Y0 - 4.0 * ph * ph) - 2.0 * (par.Y0 + 4.0 * ph * qh) * t +
            (par.Y0 - 4.0 * qh * qh) * t * t;
    v.h = v.h_b - std::abs(v.h_b) - par.R * (v.h_a - std::abs(v.h_a));
    return v;
}

/// Zeros of h^A: [(2+X) +- 2 sqrt(1+X)] / X for X > 0. The product of the
/// roots is 1, which gives the small root without cancellation. X = 0
/// degenerates to the line -4t with its zero at t = 0.
inline ParabolaRoots roots_A(const AUParameters& par) {
    ParabolaRoots r;
    if (par.X <= 1e-14) {
        r.degenerate = true;
        r.lower = r.upper = 0.0;
        return r;
    }
    const double big = ((2.0 + par.X) + 2.0 * std::sqrt(1.0 + par.X)) / par.X;
    r.lower = 1.0 / big;
    r.upper = big;
    return r;
}

/// Zeros of h^B as a quadratic in t. Handles the degenerate leading
/// coefficient (qhat^2 = Y0/4) and reports complex roots as absent.
inline ParabolaRoots roots_B(const MixtureWeights& w, const AUParameters& par) {
    const double ph = w.phat(), qh = w.qhat();
    const double c2 = par.Y0 - 4.0 * qh * qh;
    const double c1 = -2.0 * (par.Y0 + 4.0 * ph * qh);
    const double c0 = par.Y0 - 4.0 * ph * ph;
    ParabolaRoots r;
    const auto q = detail::solve_quadratic(c2, c1, c0, par.Y0);
    r.degenerate = std::abs(c2) <= 1e-14 * std::max(1.0, par.Y0);
    if (q.count == 0) return r;
    r.lower = q.r1;
    r.upper = q.r2;
    return r;
}

namespace detail {

/// Minimum slack of the quadratic H = h^B - R h^A over [t_lo, t_hi], scaled so a
/// relative tolerance can be applied. H = h^B - R h^A with coefficients
/// (Y0X - 4 phat^2), -2 [Y2X + 4 phat qhat], (Y0X - 4 qhat^2).
inline bool h_condition_holds(double ph, double qh, const AUParameters& par,
                              double t_lo, double t_hi, double tol) {
    const double a = par.y_nx(0) - 4.0 * qh * qh;
    const double b = -2.0 * (par.y_nx(2) + 4.0 * ph * qh);
    const double c = par.y_nx(0) - 4.0 * ph * ph;
    const double tmax = std::max({std::abs(t_lo), std::abs(t_hi), 1.0});
    const double scale =
        std::max({1.0, std::abs(a) * tmax * tmax, std::abs(b) * tmax, std::abs(c)});
    const auto H = [&](double t) { return (a * t + b) * t + c; };
    if (H(t_lo) < -tol * scale || H(t_hi) < -tol * scale) return false;
    if (a > 0.0) {
        const double tv = -b / (2.0 * a);
        if (tv > t_lo && tv < t_hi && H(tv) < -tol * scale) return false;
    }
    return true;
}

}  // namespace detail

/// Mapping-existence decision via the root constraints (delta t+-) and the
/// interval condition on H. Degenerate parabolas are treated as explicit
/// linear cases; when h^B has no real roots its negative set is empty and the
/// condition holds vacuously.
inline bool au_feasible(const MixtureWeights& w, const AUParameters& par,
                        double tol = 1e-9) {
    const double ph = w.phat(), qh = w.qhat();
    const double c2 = par.Y0 - 4.0 * qh * qh;
    const double c1 = -2.0 * (par.Y0 + 4.0 * ph * qh);
    const double c0 = par.Y0 - 4.0 * ph * ph;
    const double yscale = std::max(1.0, par.Y0);

    const bool a_degenerate = par.X <= 1e-14;  // h^A = -4t, negative on (0, inf)

    // Degenerate h^B: at most linear in t.
    if (std::abs(c2) <= 1e-14 * yscale) {
        if (std::abs(c1) <= 1e-14 * yscale) return true;  // constant c0 >= 0
        // h^B = c0 + c1 t with c1 < 0: negative on (t0, inf).
        const double t0 = -c0 / c1;
        if (!a_degenerate) return false;  // h^A >= 0 beyond its larger root
        // X = 0: H is linear; require slope >= 0 and H(t0) >= 0.
        const double slope = c1 + 4.0 * par.R;
        const double h0 = c0 + slope * t0;
        const double scale = std::max({1.0, std::abs(c0), std::abs(slope)});
        return slope >= -tol && h0 >= -tol * scale;
    }

    const auto qb = detail::solve_quadratic(c2, c1, c0, par.Y0);
    if (qb.count == 0) return true;  // h^B has a single sign; c2 > 0 makes it >= 0
    const double t_lo = std::max(qb.r1, 0.0);
    const double t_hi = std::max(qb.r2, 0.0);

    if (!a_degenerate) {
        const double tpa = ((2.0 + par.X) + 2.0 * std::sqrt(1.0 + par.X)) / par.X;
        const double tma = 1.0 / tpa;
        if (tpa - t_hi < -tol || t_lo - tma < -tol) return false;
    }
    return detail::h_condition_holds(ph, qh, par, t_lo, t_hi, tol);
}

/// Grid specification for the trace-norm oracle.
struct OracleGrid {
    int points = 10000;
    double t_min = 1e-6;
    double t_max = 1e6;
    int refine = 8;        // local minimizations around the worst grid margins
    double tol = 1e-9;     // allowed violation of the margin
};

/// Minimum of the trace-norm margin
///   d_tr(f1, t f2) - d_tr(rho1, t rho2)
/// over t > 0, estimated on a log-spaced grid refined by golden-section
/// minimization around its smallest samples. Both sides converge as t -> 0
/// and t -> inf, so the finite grid plus refinement decides the sign.
inline double au_oracle_margin(const DensityMatrix2& f1, const DensityMatrix2& f2,
                               const DensityMatrix2& rho1, const DensityMatrix2& rho2,
                               const OracleGrid& grid = {}) {
    const Mat2 &F1 = f1.matrix(), &F2 = f2.matrix();
    const Mat2 &R1 = rho1.matrix(), &R2 = rho2.matrix();
    const auto margin = [&](double t) {
        return trace_norm_distance(F1, t * F2) - trace_norm_distance(R1, t * R2);
    };

    const int n = std::max(grid.points, 16);
    const double log_lo = std::log(grid.t_min);
    const double log_hi = std::log(grid.t_max);
    std::vector<double> ts(n), ms(n);
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        ts[i] = std::exp(log_lo + (log_hi - log_lo) * i / (n - 1));
        ms[i] = margin(ts[i]);
        worst = std::min(worst, ms[i]);
    }

    // Refine around the smallest margins (locally in log t).
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::partial_sort(idx.begin(), idx.begin() + std::min(grid.refine, n), idx.end(),
                      [&](int a, int b) { return ms[a] < ms[b]; });
    for (int k = 0; k < std::min(grid.refine, n); ++k) {
        const int i = idx[k];
        const double lo = std::log(ts[std::max(i - 1, 0)]);
        const double hi = std::log(ts[std::min(i + 1, n - 1)]);
        const double lt = detail::golden_minimize(
            [&](double u) { return margin(std::exp(u)); }, lo, hi, 1e-12);
        worst = std::min(worst, margin(std::exp(lt)));
    }
    return worst;
}

/// Mapping-existence decision directly from the trace-norm condition:
/// feasible iff the margin never drops below -tol.
inline bool au_oracle(const DensityMatrix2& f1, const DensityMatrix2& f2,
                      const DensityMatrix2& rho1, const DensityMatrix2& rho2,
                      const OracleGrid& grid = {}) {
    return au_oracle_margin(f1, f2, rho1, rho2, grid) >= -grid.tol;
}

/// The four density operators of a concrete mapping instance, in the
/// canonical x-z plane embedding: inputs (f1, f2) and mixed template outputs
/// rho1 = p g1 + (1-p) g2, rho2 = q g2 + (1-q) g1.
struct AUInstance {
    DensityMatrix2 f1, f2, rho1, rho2;
};

inline AUInstance au_instance_states(const StatePairAngles& pair,
                                     const MixtureWeights& w) {
    const auto [fv1, fv2] = bloch_pair(pair.f, pair.phi);
    const auto [gv1, gv2] = bloch_pair(pair.g, pair.theta);
    const auto mix = [](double wt, const BlochState& a, const BlochState& b) {
        return BlochState{wt * a.x + (1.0 - wt) * b.x, wt * a.y + (1.0 - wt) * b.y,
                          wt * a.z + (1.0 - wt) * b.z};
    };
    return AUInstance{density_of(fv1), density_of(fv2),
                      density_of(mix(w.p, gv1, gv2)), density_of(mix(w.q, gv2, gv1))};
}

}  // namespace cptpmap
