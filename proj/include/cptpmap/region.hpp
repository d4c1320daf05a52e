#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cptpmap/au.hpp"
#include "cptpmap/detail/math.hpp"
#include "cptpmap/errors.hpp"

namespace cptpmap {

enum class CurveKind {
    Line1Plus,
    Line1Minus,
    Line2Plus,
    Line2Minus,
    HorizontalPlus,
    HorizontalMinus,
    Conic,
    SquareEdge,
};

inline const char* curve_kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::Line1Plus: return "line1+";
        case CurveKind::Line1Minus: return "line1-";
        case CurveKind::Line2Plus: return "line2+";
        case CurveKind::Line2Minus: return "line2-";
        case CurveKind::HorizontalPlus: return "horizontal+";
        case CurveKind::HorizontalMinus: return "horizontal-";
        case CurveKind::Conic: return "conic";
        case CurveKind::SquareEdge: return "edge";
    }
    return "?";
}

/// One boundary curve in centered coordinates (phat, qhat) = (p, q) - 1/2.
///  - lines/horizontals: np*phat + nq*qhat + c0 = 0 with np^2 + nq^2 = 1
///  - conic: a*(phat^2 + qhat^2) + 2b*phat*qhat + c0 = 0
///  - square edge: the border of [-1/2, 1/2]^2
struct BoundaryCurve {
    CurveKind kind = CurveKind::SquareEdge;
    double np = 0.0;
    double nq = 0.0;
    double a = 0.0;
    double b = 0.0;
    double c0 = 0.0;

    /// Residual of the defining equation.
    double value(double phat, double qhat) const {
        switch (kind) {
            case CurveKind::Conic:
                return a * (phat * phat + qhat * qhat) + 2.0 * b * phat * qhat + c0;
            case CurveKind::SquareEdge:
                return distance(phat, qhat);
            default:
                return np * phat + nq * qhat + c0;
        }
    }

    /// Approximate geometric distance from a point to the curve.
    double distance(double phat, double qhat) const {
        switch (kind) {
            case CurveKind::Conic: {
                const double v = value(phat, qhat);
                const double gx = 2.0 * a * phat + 2.0 * b * qhat;
                const double gy = 2.0 * a * qhat + 2.0 * b * phat;
                const double g = std::hypot(gx, gy);
                return g > 1e-12 ? std::abs(v) / g : std::abs(v);
            }
            case CurveKind::SquareEdge:
                return std::min(std::min(std::abs(phat - 0.5), std::abs(phat + 0.5)),
                                std::min(std::abs(qhat - 0.5), std::abs(qhat + 0.5)));
            default:
                return std::abs(np * phat + nq * qhat + c0);
        }
    }
};

/// Delta_M(phat, qhat) = Y0X (phat^2 + qhat^2) + 2 Y2X phat qhat - R Y1X.
/// At (Y0, X) = (1, 0) this is identically the pure-case Delta(p, q).
inline double conic_value(const MixtureWeights& w, const AUParameters& par) {
    const double ph = w.phat(), qh = w.qhat();
    return par.y_nx(0) * (ph * ph + qh * qh) + 2.0 * par.y_nx(2) * ph * qh -
           par.R * par.y_nx(1);
}

/// The analytic boundary curves for a parameter triple:
///   q1+-(phat) = -(a+-/X)(sqrt(Y0) + a+- phat)
///   q2+-(phat) =  (a+-/X)(sqrt(Y0) - a+- phat)     (omitted when X = 0)
///   q3+- = +- sqrt(Y0X)/2                          (omitted when Y0X < 0)
/// and the conic Delta_M (an ellipse for R < Y0/(1+X)).
inline std::vector<BoundaryCurve> boundary_curves(const AUParameters& par) {
    std::vector<BoundaryCurve> out;
    const double sy = std::sqrt(par.Y0);
    if (par.X > 1e-14) {
        const double w = std::sqrt(1.0 + par.X);
        const struct {
            CurveKind kind;
            double aa;
            double sign;  // +1: q1 family, -1: q2 family
        } line_defs[] = {
            {CurveKind::Line1Plus, 1.0 + w, +1.0},
            {CurveKind::Line1Minus, 1.0 - w, +1.0},
            {CurveKind::Line2Plus, 1.0 + w, -1.0},
            {CurveKind::Line2Minus, 1.0 - w, -1.0},
        };
        for (const auto& d : line_defs) {
            // q1: qhat + (aa^2/X) phat + (aa/X) sy = 0
            // q2: qhat + (aa^2/X) phat - (aa/X) sy = 0
            const double slope = d.aa * d.aa / par.X;
            const double off = d.sign * (d.aa / par.X) * sy;
            const double norm = std::hypot(slope, 1.0);
            BoundaryCurve c;
            c.kind = d.kind;
            c.np = slope / norm;
            c.nq = 1.0 / norm;
            c.c0 = off / norm;
            out.push_back(c);
        }
    }
    const double y0x = par.y_nx(0);
    if (y0x >= 0.0) {
        const double level = std::sqrt(y0x) / 2.0;
        for (double s : {+1.0, -1.0}) {
            BoundaryCurve c;
            c.kind = s > 0 ? CurveKind::HorizontalPlus : CurveKind::HorizontalMinus;
            c.np = 0.0;
            c.nq = 1.0;
            c.c0 = -s * level;
            out.push_back(c);
        }
    }
    BoundaryCurve conic;
    conic.kind = CurveKind::Conic;
    conic.a = y0x;
    conic.b = par.y_nx(2);
    conic.c0 = -par.R * par.y_nx(1);
    out.push_back(conic);
    return out;
}

struct CurveMatch {
    CurveKind kind = CurveKind::SquareEdge;
    double distance = 0.0;
};

/// Nearest curve (including the unit-square edge) to a point given in plain
/// (p, q) coordinates.
inline CurveMatch match_boundary_point(double p, double q,
                                       const std::vector<BoundaryCurve>& curves) {
    const double ph = p - 0.5, qh = q - 0.5;
    BoundaryCurve edge;
    edge.kind = CurveKind::SquareEdge;
    CurveMatch best{CurveKind::SquareEdge, edge.distance(ph, qh)};
    for (const auto& c : curves) {
        const double d = c.distance(ph, qh);
        if (d < best.distance) best = CurveMatch{c.kind, d};
    }
    return best;
}

// ---------------------------------------------------------------------------
// Numeric thresholds X0 and R0(X).
//
// The horizontal lines q3+- and the steep line pair (a+ = 1 + sqrt(1+X))
// intersect at phat = sqrt(Y0)/a+ -+ X sqrt(Y0X) / (2 a+^2) (and mirror
// images). R0(X) is the R at which these intersection points cross the unit
// square edge |phat| = 1/2; the in-box intersection count changes there,
// which is the topology switch between the catalogued presentations (the
// horizontal segments either reach the square edge, or terminate on the
// lines). X0 is where the case-7 band (R0, Y0/(1+X)) opens: R0(X0) =
// Y0/(1+X0). Both are located by bisection.
// ---------------------------------------------------------------------------

namespace detail {

inline int steep_line_horizontal_inbox_count(double y0, double x, double r) {
    const double y0x = y0 - x * r;
    if (y0x < 0.0 || y0x > 1.0) return 0;  // horizontal lines outside the box
    const double ap = 1.0 + std::sqrt(1.0 + x);
    const double u = std::sqrt(y0) / ap;
    const double v = x * std::sqrt(y0x) / (2.0 * ap * ap);
    int n = 0;
    if (std::abs(u - v) <= 0.5) n += 2;
    if (std::abs(u + v) <= 0.5) n += 2;
    return n;
}

}  // namespace detail

/// R0(X): the change point of the in-box intersection count on
/// ((Y0-1)/X, Y0/X), located by bisection. The transition can sit very close
/// to either end of the bracket, so the scan adds geometric probes toward
/// both endpoints. Throws numeric_failure_error when no transition exists.
inline double r0_threshold(double y0, double x) {
    if (y0 <= 1.0 || x <= y0 - 1.0)
        throw numeric_failure_error("r0_threshold: requires Y0 > 1 and X > Y0 - 1");
    const double lo = (y0 - 1.0) / x;
    const double hi = y0 / x;
    const double span = hi - lo;

    std::vector<double> probes;
    probes.reserve(512 + 2 * 48);
    for (int i = 1; i < 512; ++i) probes.push_back(lo + span * i / 512.0);
    for (int k = 10; k < 58; ++k) {
        const double off = span * std::ldexp(1.0, -k);
        probes.push_back(lo + off);
        probes.push_back(hi - off);
    }
    std::sort(probes.begin(), probes.end());

    double bracket_lo = 0.0, bracket_hi = 0.0;
    bool found = false;
    int prev = detail::steep_line_horizontal_inbox_count(y0, x, probes.front());
    double prev_r = probes.front();
    for (double r : probes) {
        const int c = detail::steep_line_horizontal_inbox_count(y0, x, r);
        if (c != prev) {  // keep the transition nearest the degenerate end
            bracket_lo = prev_r;
            bracket_hi = r;
            found = true;
        }
        prev = c;
        prev_r = r;
    }
    if (!found)
        throw numeric_failure_error("r0_threshold: no topology transition found");
    const int ref = detail::steep_line_horizontal_inbox_count(y0, x, bracket_lo);
    return detail::bisect_flip(
        [&](double r) {
            return detail::steep_line_horizontal_inbox_count(y0, x, r) == ref;
        },
        bracket_lo, bracket_hi, 200);
}

/// X0: the X at which the band (R0(X), Y0/(1+X)) opens, i.e. the root of
/// R0(X) - Y0/(1+X), located by bisection over a log-spaced scan.
inline double x0_threshold(double y0) {
    if (y0 <= 1.0) throw numeric_failure_error("x0_threshold: requires Y0 > 1");
    const double sy = std::sqrt(y0);
    const double x_min = std::max(y0 - 1.0, 4.0 * sy * (sy - 1.0)) * 1.0001 + 1e-6;
    const auto gap = [&](double x) { return r0_threshold(y0, x) - y0 / (1.0 + x); };
    double prev_x = 0.0;
    double prev_g = 0.0;
    bool have_prev = false;
    const int scan = 200;
    for (int i = 0; i <= scan; ++i) {
        const double x = x_min * std::pow(1000.0, static_cast<double>(i) / scan);
        double g;
        try {
            g = gap(x);
        } catch (const numeric_failure_error&) {
            continue;
        }
        if (have_prev && (prev_g > 0.0) != (g > 0.0)) {
            return detail::bisect_root(gap, prev_x, x, 1e-10, 200);
        }
        prev_x = x;
        prev_g = g;
        have_prev = true;
    }
    throw numeric_failure_error("x0_threshold: no sign change found");
}

struct X0R0Result {
    double x0 = 0.0;
    std::vector<std::pair<double, double>> r0_table;  // (X, R0(X))
};

/// Numerically determined thresholds for a given Y0, with R0 sampled on a
/// log-spaced X grid covering the case-2c through case-7 ranges.
inline X0R0Result x0_r0(double y0, int table_points = 33) {
    X0R0Result out;
    out.x0 = x0_threshold(y0);
    const double x_lo = (y0 - 1.0) * 1.05;
    const double x_hi = std::max(4.0 * out.x0, x_lo * 8.0);
    for (int i = 0; i < table_points; ++i) {
        const double x =
            x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (table_points - 1));
        try {
            out.r0_table.emplace_back(x, r0_threshold(y0, x));
        } catch (const numeric_failure_error&) {
            // outside the transition's domain; skip the sample
        }
    }
    return out;
}

/// Matching parameter-set labels from the case catalog. The sets overlap (1a, 2a,
/// 3a are identical) and do not partition the parameter space; all matches
/// are reported.
struct CaseLabel {
    std::vector<std::string> labels;

    bool contains(const std::string& l) const {
        return std::find(labels.begin(), labels.end(), l) != labels.end();
    }
};

inline CaseLabel classify_case(const AUParameters& par) {
    const double R = par.R, X = par.X, Y0 = par.Y0;
    const double sy = std::sqrt(Y0);
    const double w = std::sqrt(1.0 + X);
    CaseLabel out;
    const auto add = [&](const char* l, bool cond) {
        if (cond) out.labels.emplace_back(l);
    };
    const bool set_a = Y0 > 2.0 && 0.0 < X && X < Y0 - 2.0 && 0.0 < R && R < 1.0;
    add("1a", set_a);
    add("1b", std::max(Y0 - 2.0, 0.0) < X && X < Y0 - 1.0 && 0.0 < R &&
                  R < Y0 / (2.0 + X));
    add("1c", Y0 - 1.0 < X && X < sy * (sy + 2.0) && 0.0 < R &&
                  R < (Y0 - 1.0) / (1.0 + X));
    add("1d", X > sy * (sy + 2.0) && 0.0 < R && R < sy * (sy - 1.0) / (w * (w - 1.0)));
    add("2a", set_a);
    add("2b", std::max(Y0 - 2.0, 0.0) < X && X < Y0 - 1.0 && (Y0 - 1.0) / X < R &&
                  R < Y0 / X);
    const auto r0_or_nan = [&](double xx) {
        try {
            return r0_threshold(Y0, xx);
        } catch (const numeric_failure_error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    if (Y0 - 1.0 < X && X < 4.0 * sy * (sy - 1.0) && R < Y0 / X) {
        const double r0 = r0_or_nan(X);
        add("2c", !std::isnan(r0) && r0 < R);
    }
    add("3a", set_a);
    add("3b", std::max(Y0 - 2.0, 0.0) < X && X < Y0 - 1.0 && 1.0 < R &&
                  R < (Y0 - 1.0) / X);
    add("4", X > Y0 - 1.0 && sy * (sy - 1.0) / (w * (w - 1.0)) < R &&
                 R < (Y0 - 1.0) / X);
    const auto x0_or_nan = [&]() {
        try {
            return x0_threshold(Y0);
        } catch (const numeric_failure_error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    if (X > Y0 - 1.0 && (Y0 - 1.0) / X < R && R < Y0 / (1.0 + X)) {
        const double x0 = x0_or_nan();
        add("5", !std::isnan(x0) && X < x0);
    }
    add("6", X > 4.0 * sy * (sy - 1.0) && Y0 / (1.0 + X) < R && R < Y0 / X);
    if (X > Y0 - 1.0 && R < Y0 / (1.0 + X)) {
        const double x0 = x0_or_nan();
        if (!std::isnan(x0) && X > x0) {
            const double r0 = r0_or_nan(X);
            add("7", !std::isnan(r0) && r0 < R);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pure-input region (fidelity criterion) and its closed-form boundary.
// ---------------------------------------------------------------------------

/// Pure-case region parameter R = (1 - kappa^2)/(1 - K^2) < 1.
struct PureRegion {
    double R;

    explicit PureRegion(double r) : R(r) {
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("PureRegion: R must lie in (0, 1)");
    }
};

/// Membership in the pure-input feasible region:
///   pq + (1-p)(1-q) - R <= 2 sqrt(p(1-p)q(1-q))
/// evaluated as: lhs < 0 (hyperbola branches), otherwise
/// Delta(p,q) = (p+q+R-1)^2 - 4Rpq <= tol.
inline bool pure_region_contains(double p, double q, double R, double tol = 1e-12) {
    if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
        throw std::invalid_argument("pure_region_contains: (p, q) outside [0,1]^2");
    if (!(R > 0.0 && R < 1.0))
        throw std::invalid_argument("pure_region_contains: R outside (0, 1)");
    const double lhs = p * q + (1.0 - p) * (1.0 - q) - R;
    if (lhs < 0.0) return true;
    const double delta = (p + q + R - 1.0) * (p + q + R - 1.0) - 4.0 * R * p * q;
    return delta <= tol;
}

/// Pure-case Delta(p, q) of the boundary conic.
inline double pure_delta(double p, double q, double R) {
    return (p + q + R - 1.0) * (p + q + R - 1.0) - 4.0 * R * p * q;
}

struct PQPoint {
    double p = 0.0;
    double q = 0.0;
};

struct PureBoundary {
    std::vector<PQPoint> upper;
    std::vector<PQPoint> lower;
};

/// q on the upper (sign = +1) or lower (sign = -1) boundary curve of the
/// pure region: 1 - R - (1-2R) p +- 2 sqrt(R(1-R) p(1-p)).
inline double pure_boundary_curve(double p, double R, int sign) {
    const double root = std::sqrt(std::max(R * (1.0 - R) * p * (1.0 - p), 0.0));
    return 1.0 - R - (1.0 - 2.0 * R) * p + 2.0 * sign * root;
}

/// Closed-form boundary polylines of the pure-input region:
/// upper: q = 1 on [0, R]; the curve on [R, 1]; the segment 0 <= q <= R at
/// p = 1. Lower: the segment 1-R <= q <= 1 at p = 0; the curve on [0, 1-R];
/// q = 0 on [1-R, 1].
inline PureBoundary pure_boundary(double R, int resolution = 256) {
    PureRegion checked(R);
    (void)checked;
    const int n = std::max(resolution, 8);
    const int n_side = std::max(n / 8, 2);
    PureBoundary out;
    for (int i = 0; i <= n_side; ++i)
        out.upper.push_back({R * i / n_side, 1.0});
    for (int i = 1; i <= n; ++i) {
        const double p = R + (1.0 - R) * i / n;
        out.upper.push_back({p, pure_boundary_curve(p, R, +1)});
    }
    for (int i = 1; i <= n_side; ++i)
        out.upper.push_back({1.0, R * (1.0 - static_cast<double>(i) / n_side)});

    for (int i = 0; i <= n_side; ++i)
        out.lower.push_back({0.0, 1.0 - R * i / n_side});
    for (int i = 1; i <= n; ++i) {
        const double p = (1.0 - R) * i / n;
        out.lower.push_back({p, pure_boundary_curve(p, R, -1)});
    }
    for (int i = 1; i <= n_side; ++i)
        out.lower.push_back({1.0 - R + R * i / n_side, 0.0});
    return out;
}

/// Transition points of au_feasible along q for each p-grid column, bisected
/// to 1e-9. Every point lies on one of the analytic curves or a square edge.
inline std::vector<PQPoint> boundary_trace(const AUParameters& par, int resolution = 512) {
    if (resolution < 16)
        throw std::invalid_argument("boundary_trace: resolution must be >= 16");
    std::vector<PQPoint> out;
    const int cols = resolution;
    const int scan = resolution;
    std::vector<char> feas(scan + 1);
    for (int i = 0; i <= cols; ++i) {
        const double p = static_cast<double>(i) / cols;
        for (int j = 0; j <= scan; ++j)
            feas[j] = au_feasible(MixtureWeights(p, static_cast<double>(j) / scan), par);
        for (int j = 0; j < scan; ++j) {
            if (feas[j] == feas[j + 1]) continue;
            double lo = static_cast<double>(j) / scan;
            double hi = static_cast<double>(j + 1) / scan;
            const bool flo = feas[j];
            while (hi - lo > 1e-9) {
                const double mid = 0.5 * (lo + hi);
                if (au_feasible(MixtureWeights(p, mid), par) == flo)
                    lo = mid;
                else
                    hi = mid;
            }
            out.push_back({p, 0.5 * (lo + hi)});
        }
    }
    return out;
}

}  // namespace cptpmap
