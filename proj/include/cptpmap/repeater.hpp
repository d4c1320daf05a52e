#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "cptpmap/au.hpp"
#include "cptpmap/detail/math.hpp"
#include "cptpmap/errors.hpp"
#include "cptpmap/qubit.hpp"
#include "cptpmap/region.hpp"

namespace cptpmap {

/// Coherent-state repeater instance: inputs |+-alpha>, templates |+-beta>
/// with |beta| > |alpha|, second-hop transmissivity eta, prior xi for the
/// second input.
struct RepeaterProblem {
    double alpha, beta, eta, xi;
    double kappa, K;         // <alpha|-alpha>, <beta|-beta>
    double kappa_p, K_p;     // post-loss overlaps kappa^(eta^2), K^(eta^2)
    double R;                // (1 - kappa^2) / (1 - K^2)

    RepeaterProblem(double alpha_, double beta_, double eta_, double xi_)
        : alpha(alpha_), beta(beta_), eta(eta_), xi(xi_) {
        if (alpha < 0.0) throw std::invalid_argument("RepeaterProblem: alpha < 0");
        if (!(beta > alpha)) throw std::invalid_argument("RepeaterProblem: need beta > alpha");
        if (!(eta > 0.0 && eta < 1.0))
            throw std::invalid_argument("RepeaterProblem: eta outside (0, 1)");
        if (!(xi > 0.0 && xi < 1.0))
            throw std::invalid_argument("RepeaterProblem: xi outside (0, 1)");
        kappa = coherent_overlap(alpha);
        K = coherent_overlap(beta);
        kappa_p = coherent_overlap(eta * alpha);
        K_p = coherent_overlap(eta * beta);
        R = (1.0 - kappa * kappa) / (1.0 - K * K);
    }

    /// Problem specified by the input overlap and template ratio instead of
    /// amplitudes: kappa = <alpha|-alpha>, beta = ratio * alpha.
    static RepeaterProblem from_overlap(double kappa, double ratio, double eta,
                                        double xi) {
        if (!(kappa > 0.0 && kappa < 1.0))
            throw std::invalid_argument("RepeaterProblem: kappa outside (0, 1)");
        if (!(ratio > 1.0))
            throw std::invalid_argument("RepeaterProblem: need |beta/alpha| > 1");
        const double alpha = std::sqrt(-0.5 * std::log(kappa));
        return RepeaterProblem(alpha, ratio * alpha, eta, xi);
    }
};

/// Amplitude transformation of the lossy channel: |gamma> -> |eta gamma>.
inline double lossy_map(double gamma, double eta) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("lossy_map: eta outside [0, 1]");
    return eta * gamma;
}

/// Projectors |b><b| and |-b><-b| for templates with real overlap K, in the
/// Gram-Schmidt orthonormal basis {|b>, (|-b> - K |b>)/sqrt(1-K^2)}.
/// All resulting matrices are real symmetric.
inline std::array<Mat2, 2> template_projectors(double K) {
    const double s2 = std::max(1.0 - K * K, 0.0);
    const double s = std::sqrt(s2);
    Mat2 pb, pm;
    pb(0, 0) = 1.0;
    pm(0, 0) = K * K;
    pm(0, 1) = pm(1, 0) = K * s;
    pm(1, 1) = s2;
    return {pb, pm};
}

/// Binary ensemble of template mixtures with priors (1 - xi, xi):
///   rho1 = p |b><b| + (1-p) |-b><-b|,  rho2 = q |-b><-b| + (1-q) |b><b|.
struct OutputEnsemble {
    DensityMatrix2 rho1, rho2;
    double xi;
};

inline OutputEnsemble output_ensemble(double p, double q, double overlap, double xi) {
    const auto [pb, pm] = template_projectors(overlap);
    return OutputEnsemble{DensityMatrix2(p * pb + (1.0 - p) * pm),
                          DensityMatrix2(q * pm + (1.0 - q) * pb), xi};
}

/// Minimum error probability of the projective discrimination strategy
/// Pi_1 = |lambda_-><lambda_-| on Lambda = xi rho2 - (1-xi) rho1:
/// P_e = 1 - xi + lambda_min(Lambda). This equals the unrestricted Helstrom
/// minimum whenever Lambda has eigenvalues of both signs (det <= 0); for
/// nearly identical mixed states with skewed priors the unrestricted optimum
/// instead saturates at min(xi, 1-xi) by always guessing the likelier state.
inline double helstrom_min_error(const DensityMatrix2& rho1, const DensityMatrix2& rho2,
                                 double xi) {
    if (xi < 0.0 || xi > 1.0)
        throw std::invalid_argument("helstrom_min_error: xi outside [0, 1]");
    const Mat2 lambda = xi * rho2.matrix() + (-(1.0 - xi)) * rho1.matrix();
    const auto ev = lambda.hermitian_eigenvalues();
    return 1.0 - xi + ev[0];
}

/// Closed-form minimum error after the lossy channel:
/// 1/2 {1 - sqrt[(2xi-1)^2 K'^2 + (2xi q + 2(1-xi) p - 1)^2 (1 - K'^2)]}.
inline double pe_min_closed(double p, double q, const RepeaterProblem& prob) {
    if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
        throw std::invalid_argument("pe_min_closed: (p, q) outside [0,1]^2");
    const double a = (2.0 * prob.xi - 1.0) * prob.K_p;
    const double b = 2.0 * prob.xi * q + 2.0 * (1.0 - prob.xi) * p - 1.0;
    const double inner = a * a + b * b * (1.0 - prob.K_p * prob.K_p);
    return 0.5 * (1.0 - std::sqrt(std::max(inner, 0.0)));
}

/// Lagrange-optimal mixing pair on the pure-region boundary:
///   p = [1 + c-/sqrt(c)]/2, q = [1 + c+/sqrt(c)]/2,
///   c+- = R +- (2xi-1)(1-R), c = 1 - 4xi(1-xi)(1-R).
inline MixtureWeights optimal_pq(double R, double xi) {
    if (!(R > 0.0 && R <= 1.0))
        throw std::invalid_argument("optimal_pq: R outside (0, 1]");
    if (!(xi > 0.0 && xi < 1.0))
        throw std::invalid_argument("optimal_pq: xi outside (0, 1)");
    const double cm = R - (2.0 * xi - 1.0) * (1.0 - R);
    const double cp = R + (2.0 * xi - 1.0) * (1.0 - R);
    const double c = 1.0 - 4.0 * xi * (1.0 - xi) * (1.0 - R);
    const double rc = std::sqrt(c);
    return MixtureWeights(std::clamp(0.5 * (1.0 + cm / rc), 0.0, 1.0),
                          std::clamp(0.5 * (1.0 + cp / rc), 0.0, 1.0));
}

/// Optimal CPTP repeater error:
/// 1/2 {1 - sqrt(1 - 4xi(1-xi)[1 - (1-K'^2) R])}.
inline double pe_cptp_min(const RepeaterProblem& prob) {
    const double inner =
        1.0 - 4.0 * prob.xi * (1.0 - prob.xi) *
                  (1.0 - (1.0 - prob.K_p * prob.K_p) * prob.R);
    return 0.5 * (1.0 - std::sqrt(std::max(inner, 0.0)));
}

/// Error with no repeater action (final states |+-eta alpha>):
/// [1 - sqrt(1 - 4xi(1-xi) kappa'^2)]/2.
inline double pe_noact(const RepeaterProblem& prob) {
    const double inner =
        1.0 - 4.0 * prob.xi * (1.0 - prob.xi) * prob.kappa_p * prob.kappa_p;
    return 0.5 * (1.0 - std::sqrt(std::max(inner, 0.0)));
}

/// Holevo quantity chi(E) = S(rho_bar) - sum_k xi_k S(rho_k), in bits.
inline double holevo_chi(const OutputEnsemble& e) {
    const Mat2 avg =
        (1.0 - e.xi) * e.rho1.matrix() + e.xi * e.rho2.matrix();
    const double s_avg = von_neumann_entropy(DensityMatrix2(avg));
    return s_avg - (1.0 - e.xi) * von_neumann_entropy(e.rho1) -
           e.xi * von_neumann_entropy(e.rho2);
}

/// The same quantity via sum_k xi_k D(rho_k || rho_bar); used as the
/// cross-check route. D is computed from simultaneous eigenbases of each
/// rho_k against rho_bar (2x2 closed form via Bloch vectors).
inline double holevo_chi_relative_entropy(const OutputEnsemble& e) {
    const Mat2 avg = (1.0 - e.xi) * e.rho1.matrix() + e.xi * e.rho2.matrix();
    const auto rel_entropy = [&](const DensityMatrix2& rho) {
        // D(rho||sigma) = -S(rho) - Tr(rho log2 sigma)
        const DensityMatrix2 sigma(avg);
        const auto evs = sigma.eigenvalues();
        // log2(sigma) in sigma's eigenbasis; build via projectors.
        const BlochState bs = bloch_of(sigma);
        const double r = bs.radius();
        Mat2 log_sigma;
        if (r < 1e-14) {
            const double l = std::log2(std::max(evs[0], 1e-300));
            log_sigma(0, 0) = log_sigma(1, 1) = l;
        } else {
            const BlochState unit{bs.x / r, bs.y / r, bs.z / r};
            const double lp = std::log2(std::max(evs[1], 1e-300));
            const double lm = std::log2(std::max(evs[0], 1e-300));
            // log sigma = (lp + lm)/2 I + (lp - lm)/2 (n . sigma_vec)
            const double c0 = 0.5 * (lp + lm), c1 = 0.5 * (lp - lm);
            log_sigma(0, 0) = c0 + c1 * unit.z;
            log_sigma(1, 1) = c0 - c1 * unit.z;
            log_sigma(0, 1) = c1 * cxd{unit.x, -unit.y};
            log_sigma(1, 0) = c1 * cxd{unit.x, unit.y};
        }
        const double cross = (rho.matrix() * log_sigma).trace().real();
        return -von_neumann_entropy(rho) - cross;
    };
    return (1.0 - e.xi) * rel_entropy(e.rho1) + e.xi * rel_entropy(e.rho2);
}

/// chi of the post-loss ensemble at mixing weights (p, q).
inline double chi_at(double p, double q, const RepeaterProblem& prob) {
    return holevo_chi(output_ensemble(p, q, prob.K_p, prob.xi));
}

struct ChiOptimum {
    double p = 0.0;
    double q = 0.0;
    double chi = 0.0;
};

namespace detail {

/// Point on the closed pure-region boundary loop, parameterized by
/// u in [0, 1). Segments: top flat, upper curve, right vertical, bottom
/// flat, lower curve, left vertical.
inline void pure_boundary_loop_point(double R, double u, double& p, double& q) {
    u -= std::floor(u);
    // segment lengths (Euclidean estimates; exact for flats/verticals)
    const double len_curve = std::sqrt(2.0) * (1.0 - R);  // coarse but adequate
    const std::array<double, 6> lens = {R, len_curve, R, R, len_curve, R};
    double total = 0.0;
    for (double l : lens) total += l;
    double s = u * total;
    int seg = 0;
    while (seg < 5 && s > lens[seg]) {
        s -= lens[seg];
        ++seg;
    }
    const double frac = lens[seg] > 0.0 ? s / lens[seg] : 0.0;
    switch (seg) {
        case 0: p = R * frac; q = 1.0; break;
        case 1: p = R + (1.0 - R) * frac; q = pure_boundary_curve(p, R, +1); break;
        case 2: p = 1.0; q = R * (1.0 - frac); break;
        case 3: p = 1.0 - R * frac; q = 0.0; break;
        case 4: p = (1.0 - R) * (1.0 - frac); q = pure_boundary_curve(p, R, -1); break;
        default: p = 0.0; q = 1.0 - R * (1.0 - frac); break;
    }
    p = std::clamp(p, 0.0, 1.0);
    q = std::clamp(q, 0.0, 1.0);
}

}  // namespace detail

/// Maximizes the Holevo quantity of the post-loss ensemble over the boundary
/// of the pure-input feasible region: coarse arc-length sampling followed by
/// golden-section refinement of the boundary parameter.
inline ChiOptimum maximize_chi(const RepeaterProblem& prob, int resolution = 512) {
    if (resolution < 8) throw std::invalid_argument("maximize_chi: resolution < 8");
    const double R = prob.R;
    const auto chi_of_u = [&](double u) {
        double p, q;
        detail::pure_boundary_loop_point(R, u, p, q);
        return chi_at(p, q, prob);
    };
    double best_u = 0.0, best_chi = -1.0;
    for (int i = 0; i < resolution; ++i) {
        const double u = static_cast<double>(i) / resolution;
        const double c = chi_of_u(u);
        if (c > best_chi) {
            best_chi = c;
            best_u = u;
        }
    }
    const double du = 1.0 / resolution;
    const double u_star = detail::golden_minimize(
        [&](double u) { return -chi_of_u(u); }, best_u - du, best_u + du, 1e-10);
    ChiOptimum out;
    detail::pure_boundary_loop_point(R, u_star, out.p, out.q);
    out.chi = chi_of_u(u_star);
    if (!(out.chi >= 0.0) || !std::isfinite(out.chi))
        throw numeric_failure_error("maximize_chi: optimization failed");
    // chi is invariant under relabeling both templates, (p, q) -> (1-p, 1-q);
    // report the representative with p + q >= 1.
    if (out.p + out.q < 1.0) {
        out.p = 1.0 - out.p;
        out.q = 1.0 - out.q;
    }
    return out;
}

struct ChiBaselines {
    double chi_noact = 0.0;  // binary entropy of (1 + kappa')/2: no repeater action
    double chi_input = 0.0;  // binary entropy of (1 + kappa)/2: bound at the repeater
};

/// Baseline Holevo quantities. chi_NOACT belongs to the post-loss inputs
/// |+-eta alpha> (overlap kappa'); chi_INPUT to the repeater's inputs
/// |+-alpha> (overlap kappa).
inline ChiBaselines chi_baselines(const RepeaterProblem& prob) {
    return ChiBaselines{detail::binary_entropy(0.5 * (1.0 + prob.kappa_p)),
                        detail::binary_entropy(0.5 * (1.0 + prob.kappa))};
}

/// Crossing point kappa0 of chi_CPTP(kappa) and chi_NOACT(kappa) for a fixed
/// template ratio |beta/alpha|, eta and xi. Returns nullopt when the curves
/// do not cross on (eps, 1 - eps).
inline std::optional<double> kappa0(double ratio, double eta, double xi,
                                    double tol = 1e-8, int chi_resolution = 257) {
    const double eps = 1e-4;
    const auto diff = [&](double kappa) {
        const RepeaterProblem prob = RepeaterProblem::from_overlap(kappa, ratio, eta, xi);
        const double chi_cptp = maximize_chi(prob, chi_resolution).chi;
        return chi_cptp - chi_baselines(prob).chi_noact;
    };
    const int scan = 200;
    double prev_k = eps, prev_d = diff(eps);
    for (int i = 1; i <= scan; ++i) {
        const double k = eps + (1.0 - 2.0 * eps) * i / scan;
        const double d = diff(k);
        if ((prev_d > 0.0) != (d > 0.0)) {
            return detail::bisect_root(diff, prev_k, k, tol);
        }
        prev_k = k;
        prev_d = d;
    }
    return std::nullopt;
}

struct IRResult {
    double p = 0.0;
    double q = 0.0;
    double pe = 0.0;
};

/// Intercept-resend strategy at xi = 1/2: measure optimally, resend the
/// matching template. p = q = (1 + sqrt(1 - kappa^2))/2 and
/// P_e = 1/2 {1 - sqrt[(1 - kappa^2)(1 - K'^2)]}.
inline IRResult ir_strategy(const RepeaterProblem& prob) {
    if (std::abs(prob.xi - 0.5) > 1e-12)
        throw unsupported_configuration_error("ir_strategy: defined for xi = 1/2 only");
    const double s = std::sqrt(1.0 - prob.kappa * prob.kappa);
    IRResult out;
    out.p = out.q = 0.5 * (1.0 + s);
    out.pe = 0.5 * (1.0 - std::sqrt((1.0 - prob.kappa * prob.kappa) *
                                    (1.0 - prob.K_p * prob.K_p)));
    return out;
}

struct NetworkAngles {
    double theta_plus = 0.0;
    double theta_minus = 0.0;
};

inline NetworkAngles network_angles(double kappa, double K) {
    if (!(K > 0.0 && K <= kappa && kappa <= 1.0))
        throw std::invalid_argument("network_angles: need 0 < K <= kappa <= 1");
    const double a = std::asin(std::min(K / kappa, 1.0));
    return NetworkAngles{0.5 * (a + 0.5 * detail::kPi), 0.5 * (a - 0.5 * detail::kPi)};
}

struct NetworkOutput {
    NetworkAngles angles;
    DensityMatrix2 rho_out_1, rho_out_2;  // mode-b reduced states
    double unitarity_error = 0.0;
};

/// Simulates the abstract two-qubit network: U = exp(G) with
/// G = |0>_a<1| (x) [theta- |0>_b<1| + theta+ |1>_b<0|] - h.c., applied to
/// |f_i>_a |0>_b with |f_i> written in the even/odd coherent basis. Returns
/// the mode-b reduced states.
inline NetworkOutput network_simulate(double kappa, double K) {
    const NetworkAngles ang = network_angles(kappa, K);
    detail::Mat4 g;
    // basis ordering |a b>: 00, 01, 10, 11; |0>_a<1| acts on the first qubit.
    // B = theta- |0>_b<1| + theta+ |1>_b<0|
    g(0, 3) = ang.theta_minus;  // <0b| B |1b> block of |0a><1a|
    g(1, 2) = ang.theta_plus;
    g(3, 0) = -ang.theta_minus;  // minus hermitian conjugate
    g(2, 1) = -ang.theta_plus;
    const detail::Mat4 u = detail::expm(g);

    double uerr = 0.0;
    {
        const detail::Mat4 gram = u * u.adjoint();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                uerr = std::max(uerr,
                                std::abs(gram(i, j) - (i == j ? cxd{1.0, 0.0} : cxd{})));
    }

    const double ae = std::sqrt(0.5 * (1.0 + kappa));  // <even|alpha>
    const double ao = std::sqrt(0.5 * (1.0 - kappa));  // <odd|alpha>
    const auto reduced_b = [&](double sign) {
        // |psi> = U (|f>_a (x) |0>_b), |f> = ae |0> + sign * ao |1>
        std::array<cxd, 4> in{};
        in[0] = ae;        // |0a 0b>
        in[2] = sign * ao; // |1a 0b>
        std::array<cxd, 4> psi{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) psi[i] += u(i, j) * in[j];
        Mat2 rho;
        for (int b1 = 0; b1 < 2; ++b1)
            for (int b2 = 0; b2 < 2; ++b2)
                for (int a = 0; a < 2; ++a)
                    rho(b1, b2) += psi[2 * a + b1] * std::conj(psi[2 * a + b2]);
        return DensityMatrix2(rho);
    };
    return NetworkOutput{ang, reduced_b(+1.0), reduced_b(-1.0), uerr};
}

struct NetworkReport {
    NetworkOutput output;
    double fidelity_1 = 0.0;  // vs. the optimal-mixture target for rho1
    double fidelity_2 = 0.0;
    double p_target = 0.0;
};

/// Runs the network at (kappa, K) and reports the fidelities of the mode-b
/// outputs against the optimal template mixtures at p = q = (1 + sqrt(R))/2,
/// expressed in the even/odd basis of the template mode.
inline NetworkReport network_report(double kappa, double K) {
    NetworkReport rep{network_simulate(kappa, K), 0.0, 0.0, 0.0};
    const double R = (1.0 - kappa * kappa) / (1.0 - K * K);
    const double p = 0.5 * (1.0 + std::sqrt(R));
    rep.p_target = p;
    const double be = std::sqrt(0.5 * (1.0 + K));
    const double bo = std::sqrt(0.5 * (1.0 - K));
    const auto template_mix = [&](double w) {
        // w |b><b| + (1-w) |-b><-b| in the even/odd basis of beta
        Mat2 m;
        m(0, 0) = be * be;
        m(1, 1) = bo * bo;
        m(0, 1) = m(1, 0) = (2.0 * w - 1.0) * be * bo;
        return DensityMatrix2(m);
    };
    rep.fidelity_1 = fidelity(rep.output.rho_out_1, template_mix(p));
    rep.fidelity_2 = fidelity(rep.output.rho_out_2, template_mix(1.0 - p));
    return rep;
}

}  // namespace cptpmap
