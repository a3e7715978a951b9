#ifndef ZSB_SEQ_HPP
#define ZSB_SEQ_HPP

#include <vector>

#include "zsb/mathutil.hpp"

namespace zsb {

/// Finite window of a bi-infinite sequence, indices n in [-N, N].
struct BiSequence {
    int N = 0;
    std::vector<cx> v; // size 2N+1, index n+N

    BiSequence() = default;
    explicit BiSequence(int N) : N(N), v(2 * N + 1, cx(0)) {}

    int size() const { return 2 * N + 1; }
    cx& at(int n) { return v[n + N]; }
    cx at(int n) const { return v[n + N]; }
    bool in_window(int n) const { return n >= -N && n <= N; }
};

/// Weighted norm (sum over the window of (<n>^s |x_n|)^q)^(1/q), <n> = 1+|n|.
double weighted_norm(const BiSequence& x, double s, double q);

/// Discrete Hilbert transform (Hx)_n = sum_{m != n} x_m / (m - n), windowed.
BiSequence hilbert(const BiSequence& x);

/**
 * Modified transform (Ax)_n = pi * sum_{m != n} x_m / (rho_m - sigma_n).
 * Requires the separation |rho_m - sigma_n| >= C^{-1} |m-n| on the window;
 * a violation raises a domain error naming the offending (m, n).
 */
BiSequence modified_transform(const BiSequence& x, const BiSequence& rho,
                              const BiSequence& sigma, double C = 1e6);

struct DecayFit {
    double alpha = 0;        ///< fitted decay exponent: |x_n| ~ |n|^{-alpha}
    double residual = 0;     ///< rms residual of the log-log fit
    bool super_polynomial = false;
    int points = 0;
};

/**
 * Log-log regression of |x_n| against |n| over |n| in [N/4, N] (window
 * edges excluded from any wider use by the caller). Entries below the
 * relative floor are skipped; fewer than 4 usable points is an error.
 * A claim "(x_n) in ell^q" is operationalized as alpha * q > 1 with margin.
 */
DecayFit decay_exponent(const BiSequence& x);

/// Same fit on an explicit index range [n_lo, n_hi] (positive side + mirror).
DecayFit decay_exponent_range(const BiSequence& x, int n_lo, int n_hi);

} // namespace zsb

#endif
