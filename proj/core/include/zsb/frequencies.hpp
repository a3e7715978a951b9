#ifndef ZSB_FREQUENCIES_HPP
#define ZSB_FREQUENCIES_HPP

#include "zsb/abelian.hpp"
#include "zsb/potential.hpp"
#include "zsb/seq.hpp"

namespace zsb {

/// Action integral evaluated by both available routes.
struct ActionResult {
    cx value;          ///< (1/pi) oint lambda dDelta/sqrt_c dlambda
    cx alt_value;      ///< -(1/pi) oint F_n dlambda (integration by parts)
    double discrepancy = 0;
};

ActionResult action(const AbelianIntegral& ai, int n);

/**
 * Root system of the entire function psi_n: sigma covers the full window
 * (collapsed gaps pinned at tau_k, the n-th entry holding lambda_n^* by
 * convention), and scale renormalizes the n-th circuit integral to 2 pi.
 */
struct PsiSystem {
    int n = 0;
    BiSequence sigma;
    cx scale = 1;
    double max_residual = 0; ///< off-circuit residual after solving, doubled nodes
    int newton_iters = 0;
};

/**
 * Solves the circuit conditions oint_{Gamma_k} psi_n / sqrt_c = 0 for the
 * open-gap roots sigma_k^n (k != n, |k| <= K) by damped Newton seeded at
 * tau_k, then fixes the scale from the n-th circuit. Collapsed gaps never
 * enter the system.
 */
PsiSystem solve_psi(const AbelianIntegral& ai, int n, int K, double tol);

/// Value of psi_n / sqrt_c at lambda from a solved system.
cx psi_quotient(const RootContext& ctx, const PsiSystem& psi, cx lambda);

/**
 * Moment Omega_nk^(m) = oint_{Gamma_k} F_k^m psi_n / sqrt_c dlambda.
 * Exactly zero when gamma_k = 0 and m >= 1.
 */
cx moment(const AbelianIntegral& ai, const PsiSystem& psi, int k, int m);

struct FrequencySpectrum {
    int N = 0;
    bool has_omega = false;      ///< unrenormalized frequencies only on E_r
    double h1 = 0;               ///< value of H1 used for the omega assembly
    std::vector<cx> I;           ///< actions
    std::vector<cx> omega_star;  ///< -12 sum_k k Omega_nk^(2)
    std::vector<cx> omega_sharp; ///< (2 n pi)^3 + omega_star
    std::vector<cx> omega;       ///< (2 n pi)^3 + 12 n pi H1 + omega_star (E_r)
    std::vector<double> trunc_err;

    int idx(int n) const { return n + N; }
};

/**
 * Assembles actions, second moments and the renormalized frequencies on
 * [-N, N]. Only open gaps contribute to the frequency sum; truncated
 * potentials are finite gap up to the collapse tolerance, making the sum
 * finite without further approximation.
 */
FrequencySpectrum frequency_spectrum(const AbelianIntegral& ai, const Potential& phi,
                                     int N, double tol);

/// Sequence (omega_star_n + 12 n pi I_n)/n for decay-exponent fitting.
BiSequence freq_asymptotics_report(const FrequencySpectrum& fs);

} // namespace zsb

#endif
