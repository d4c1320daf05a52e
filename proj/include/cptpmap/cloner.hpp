#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "cptpmap/detail/math.hpp"
#include "cptpmap/errors.hpp"
#include "cptpmap/qubit.hpp"
#include "cptpmap/repeater.hpp"

namespace cptpmap {

/// Copy count that supports M = infinity as a first-class value.
class Copies {
public:
    explicit Copies(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("Copies: count must be >= 1");
    }
    static Copies infinity() {
        Copies c;
        c.infinite_ = true;
        return c;
    }

    bool is_infinite() const { return infinite_; }
    int count() const {
        if (infinite_) throw std::logic_error("Copies: infinite count");
        return n_;
    }

    /// Z^M; 0 for the infinite count when Z < 1, 1 at Z = 1.
    double pow_z(double z) const {
        if (infinite_) return z < 1.0 ? 0.0 : 1.0;
        return std::pow(z, n_);
    }

    bool operator>=(int n) const { return infinite_ || n_ >= n; }

private:
    Copies() = default;
    int n_ = 1;
    bool infinite_ = false;
};

/// N -> M cloning restricted to classical mixtures of perfect template
/// clones. Z = cos^2 phi is the squared single-copy overlap.
struct CloneProblem {
    int N;
    Copies M;
    double xi;
    double Z;

    CloneProblem(int n, Copies m, double xi_, double z)
        : N(n), M(m), xi(xi_), Z(z) {
        if (n < 1) throw std::invalid_argument("CloneProblem: N must be >= 1");
        if (!m.is_infinite() && m.count() < n)
            throw std::invalid_argument("CloneProblem: M must be >= N");
        if (xi_ < 0.0 || xi_ > 1.0)
            throw std::invalid_argument("CloneProblem: xi outside [0, 1]");
        if (z < 0.0 || z > 1.0)
            throw std::invalid_argument("CloneProblem: Z outside [0, 1]");
    }
};

/// N -> K + L anti-cloning: K copies plus L spin-flipped copies.
struct AnticloneProblem {
    int N, K, L;
    double xi;
    double Z;

    AnticloneProblem(int n, int k, int l, double xi_, double z)
        : N(n), K(k), L(l), xi(xi_), Z(z) {
        if (n < 1 || k < 0 || l < 0)
            throw std::invalid_argument("AnticloneProblem: invalid counts");
        if (k + l < n)
            throw std::invalid_argument("AnticloneProblem: need K + L >= N");
        if (xi_ < 0.0 || xi_ > 1.0)
            throw std::invalid_argument("AnticloneProblem: xi outside [0, 1]");
        if (z < 0.0 || z > 1.0)
            throw std::invalid_argument("AnticloneProblem: Z outside [0, 1]");
    }

    /// Every fidelity and information quantity reuses the cloning formulas
    /// under the substitution M -> K + L.
    CloneProblem as_clone() const { return CloneProblem(N, Copies(K + L), xi, Z); }
};

/// R = (1 - Z^N) / (1 - Z^M), in [N/M, 1]. The Z -> 1 limit is N/M and must
/// be requested explicitly.
inline double clone_R(const CloneProblem& prob, bool z_one_limit = false) {
    if (prob.Z >= 1.0) {
        if (!z_one_limit)
            throw degenerate_input_error("clone_R: Z = 1 requires the limit flag");
        return prob.M.is_infinite()
                   ? 0.0
                   : static_cast<double>(prob.N) / prob.M.count();
    }
    const double zn = std::pow(prob.Z, prob.N);
    const double zm = prob.M.pow_z(prob.Z);
    return (1.0 - zn) / (1.0 - zm);
}

inline double anticlone_R(const AnticloneProblem& prob, bool z_one_limit = false) {
    return clone_R(prob.as_clone(), z_one_limit);
}

/// Global fidelity at mixing weights (p, q):
/// F_G = Z^M + (1 - Z^M) [(1-xi) p + xi q].
inline double global_fidelity(double p, double q, const CloneProblem& prob) {
    if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
        throw std::invalid_argument("global_fidelity: (p, q) outside [0,1]^2");
    const double zm = prob.M.pow_z(prob.Z);
    return zm + (1.0 - zm) * ((1.0 - prob.xi) * p + prob.xi * q);
}

/// Optimal global fidelity:
/// 1 - (1 - Z^M)/2 [1 - sqrt(1 - 4xi(1-xi)(Z^N - Z^M)/(1 - Z^M))].
inline double global_fidelity_opt(const CloneProblem& prob) {
    const double zn = std::pow(prob.Z, prob.N);
    const double zm = prob.M.pow_z(prob.Z);
    if (1.0 - zm <= 0.0) return 1.0;  // Z -> 1 or M = N with Z = 1
    const double inner =
        1.0 - 4.0 * prob.xi * (1.0 - prob.xi) * (zn - zm) / (1.0 - zm);
    return 1.0 - 0.5 * (1.0 - zm) * (1.0 - std::sqrt(std::max(inner, 0.0)));
}

/// Local (single-copy) fidelity at mixing weights (p, q):
/// F_L = Z + (1 - Z) [(1-xi) p + xi q].
inline double local_fidelity(double p, double q, const CloneProblem& prob) {
    if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
        throw std::invalid_argument("local_fidelity: (p, q) outside [0,1]^2");
    return prob.Z + (1.0 - prob.Z) * ((1.0 - prob.xi) * p + prob.xi * q);
}

/// Optimal local fidelity, evaluated at the same optimal mixing pair as the
/// global score. Satisfies (1 - Z^M)(1 - F_L_opt) = (1 - Z)(1 - F_G_opt).
inline double local_fidelity_opt(const CloneProblem& prob) {
    if (prob.Z >= 1.0) return 1.0;
    const double r = clone_R(prob);
    if (r >= 1.0) {  // Z = 0 or M = N: perfect cloning of the restricted set
        const auto w = optimal_pq(1.0, std::clamp(prob.xi, 1e-15, 1.0 - 1e-15));
        return local_fidelity(w.p, w.q, prob);
    }
    const double xi = std::clamp(prob.xi, 1e-15, 1.0 - 1e-15);
    const auto w = optimal_pq(r, xi);
    return local_fidelity(w.p, w.q, prob);
}

/// Helstrom discrimination bound expressed as a fidelity:
/// [1 + sqrt(1 - 4xi(1-xi) Z^N)]/2, with Z^N the squared N-copy overlap.
inline double helstrom_bound_clone(const CloneProblem& prob) {
    const double zn = std::pow(prob.Z, prob.N);
    const double inner = 1.0 - 4.0 * prob.xi * (1.0 - prob.xi) * zn;
    return 0.5 * (1.0 + std::sqrt(std::max(inner, 0.0)));
}

/// Holevo bound on the copied information for the single-copy outputs at the
/// optimal point, from the closed-form eigenvalue pairs:
///   2 lambda^1_+- = 1 +- sqrt[(c-^2 + 4 xi^2 R(1-R) Z)/c]
///   2 lambda^2_+- = 1 +- sqrt[(c+^2 + 4 (1-xi)^2 R(1-R) Z)/c]
///   2 lambda^3_+- = 1 +- sqrt[((1-2xi)^2 + 4 xi(1-xi) R Z)/c]
/// I_H = sum_i P_i sum_a lambda^i_a log2 lambda^i_a with P = (1-xi, xi, -1).
inline double holevo_copied_info(const CloneProblem& prob) {
    if (prob.xi <= 0.0 || prob.xi >= 1.0)
        throw std::invalid_argument("holevo_copied_info: xi outside (0, 1)");
    if (prob.Z >= 1.0)
        throw std::invalid_argument("holevo_copied_info: Z outside [0, 1)");
    const double r = clone_R(prob);
    const double xi = prob.xi;
    const double cm = r - (2.0 * xi - 1.0) * (1.0 - r);
    const double cp = r + (2.0 * xi - 1.0) * (1.0 - r);
    const double c = 1.0 - 4.0 * xi * (1.0 - xi) * (1.0 - r);
    const double z = prob.Z;
    const auto pair_plogp = [](double radicand) {
        const double s = std::sqrt(std::clamp(radicand, 0.0, 1.0));
        return -detail::entropy_bits(0.5 * (1.0 + s), 0.5 * (1.0 - s));
    };
    const double t1 = pair_plogp((cm * cm + 4.0 * xi * xi * r * (1.0 - r) * z) / c);
    const double t2 =
        pair_plogp((cp * cp + 4.0 * (1.0 - xi) * (1.0 - xi) * r * (1.0 - r) * z) / c);
    const double t3 =
        pair_plogp(((1.0 - 2.0 * xi) * (1.0 - 2.0 * xi) + 4.0 * xi * (1.0 - xi) * r * z) / c);
    return (1.0 - xi) * t1 + xi * t2 - t3;
}

/// Maximum information extractable from the originals:
/// 2 lambda^in_+- = 1 +- sqrt[(1-2xi)^2 + 4 xi(1-xi) Z],
/// I_H^in = -sum lambda log2 lambda.
inline double ih_input(double z, double xi) {
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("ih_input: Z outside [0, 1]");
    if (xi < 0.0 || xi > 1.0) throw std::invalid_argument("ih_input: xi outside [0, 1]");
    const double s = std::sqrt(
        std::clamp((1.0 - 2.0 * xi) * (1.0 - 2.0 * xi) + 4.0 * xi * (1.0 - xi) * z, 0.0,
                   1.0));
    return detail::entropy_bits(0.5 * (1.0 + s), 0.5 * (1.0 - s));
}

/// Overlap parameter for coherent-state inputs: Z_coh = exp(-4 a^2), the
/// square of the coherent overlap.
inline double coherent_Z(double alpha) {
    const double k = coherent_overlap(alpha);
    return k * k;
}

struct LocalFidelityMinimum {
    double z = 0.0;
    double fidelity = 1.0;
};

/// Interior minimum of F_L_opt over Z in (0, 1), by golden section.
inline LocalFidelityMinimum min_local_fidelity(int n, Copies m, double xi,
                                               double ztol = 1e-10) {
    const auto f = [&](double z) {
        return local_fidelity_opt(CloneProblem(n, m, xi, z));
    };
    const double z = detail::golden_minimize(f, 1e-12, 1.0 - 1e-12, ztol);
    return LocalFidelityMinimum{z, f(z)};
}

}  // namespace cptpmap
