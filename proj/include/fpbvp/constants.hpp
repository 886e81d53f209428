#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fpbvp/fracops.hpp"
#include "fpbvp/linalg.hpp"
#include "fpbvp/problem.hpp"

namespace fpbvp {

/// xi(t) from the boundedness lemma, assembled from the I1/I2/J bounds:
///   Gamma(gamma) t^alpha / Gamma(gamma+alpha)
///   + ((1-gamma)/alpha - 1) (t^zeta T^{alpha-zeta} / Gamma(alpha)) B_{t/T}(gamma, zeta)
///   + (zeta t^zeta T^{alpha-zeta} / Gamma(alpha+1)) B_{1-t/T}(zeta, gamma)
double xi_of_t(const MapParams& p, double t);

/// Xi = sup over (0, T] of xi(t); dense log-spaced scan plus golden-section
/// refinement to 1e-10 relative.
double xi_sup(const MapParams& p, int grid_points = 4096);

/// Theta_eps = eps^alpha/Gamma(alpha) B(gamma, alpha)
///           + zeta T^alpha/Gamma(alpha+1) B_{eps/T}(gamma, zeta);  O(eps^alpha).
double theta_eps(const MapParams& p);

/// Weighted modulus-of-continuity bound of the eps-shifted map image:
/// Omega(t, t') for eps <= t < t' <= T.
double omega(const MapParams& p, double t, double t_prime);

/// Omega_A^q = (5/4) max over knots of Omega at the worst admissible pair,
/// which is (t_i, t_i + h_i/sqrt(q)): Omega increases in the gap and, at
/// fixed gap, in the ratio t'/t as t decreases.
double omega_spline(const KnotCollection& knots, int q, const MapParams& p);

/// Dense-pair verification of the closed-form corner choice (testing aid).
double omega_spline_dense(const KnotCollection& knots, int q, const MapParams& p,
                          int pairs_per_knot = 64);

/// Spectral radius of an entrywise-nonnegative matrix (power iteration on
/// M + I from a positive start; relative tolerance 1e-12).
double spectral_radius(const Mat& m);

struct ConvergenceConstants {
    double Xi = 0.0;
    double Theta_eps = 0.0;
    double Omega_Aq = 0.0;
    Mat Q;       // Xi K
    Mat Q_star;  // (Xi + Omega_Aq) K
    double rho_Q = 0.0;
    double rho_Q_star = 0.0;
    bool have_K = false;
};

ConvergenceConstants compute_constants(const ProblemSpec& problem, const SolverConfig& cfg,
                                       const KnotCollection& knots);

enum class Verdict { Pass, Fail, NotCheckable };

struct AssumptionCheck {
    Verdict verdict = Verdict::NotCheckable;
    std::string witness;  // human-readable evidence (radii, spectral values, provenance)
};

struct AssumptionReport {
    ConvergenceConstants constants;
    AssumptionCheck a1, a2, a3;     // analytic chain
    AssumptionCheck a1s, a2s, a3s;  // numerical (starred) chain
    bool all_checkable_pass() const;
    std::string to_text() const;
    std::vector<std::pair<std::string, std::string>> key_values() const;
};

/// Verifies A.1/A.1* by box arithmetic on the weighted ball around
/// x0_tilde/Gamma(gamma), A.3/A.3* by spectral radii; A.2/A.2* are recorded
/// as user-certified (m and K are inputs). Missing m or K yields
/// NotCheckable, never a silent pass.
AssumptionReport check_assumptions(const ProblemSpec& problem, const SolverConfig& cfg);

/// A-priori bound Q^m (I - Q)^{-1} Xi m after `iterations` iterations.
/// Throws if rho(Q) >= 1 (bound unavailable).
Vec apriori_error_bound(const ConvergenceConstants& constants, const Vec& m, int iterations);

}  // namespace fpbvp
