#ifndef ZSB_ROOTS_HPP
#define ZSB_ROOTS_HPP

#include <optional>
#include <vector>

#include "zsb/spectrum.hpp"

namespace zsb {

/// Which side of an open gap a boundary evaluation refers to.
enum class Side { plus, minus };

/**
 * Immutable evaluation context for the standard roots w_n, the canonical
 * root of Delta^2 - 4, and the analytic product quotients built from them.
 * Products run over |m| <= M with the tail beyond M summed in closed form
 * through the sine product identity, so the only truncation left is the
 * window of located spectral data itself.
 */
struct RootContext {
    SpectralData sd;
    int M = 0;                 ///< product tail index, >= sd.N
    std::vector<int> open;     ///< open-gap indices, ascending
    double sign_check = 0;     ///< i * sqrt_c at the real-type anchor interval

    int idx(int n) const { return sd.idx(n); }
};

RootContext make_root_context(SpectralData sd, int M = -1);

/**
 * Standard root w_n(lambda) on the principal branch,
 * (tau_n - lambda) sqrt(1 - gamma_n^2 / 4(tau_n - lambda)^2); collapsed gaps
 * reduce to tau_n - lambda, and indices beyond the window use n pi - lambda.
 * On an open gap the one-sided limits require an explicit side tag.
 */
cx standard_root(const RootContext& ctx, int n, cx lambda,
                 std::optional<Side> side = std::nullopt);

/// Canonical root of Delta^2 - 4 as the tail-corrected standard-root product.
cx canonical_root(const RootContext& ctx, cx lambda,
                  std::optional<Side> side = std::nullopt);

/// The quotient dDelta / canonical root via its product representation.
cx quotient_w(const RootContext& ctx, cx lambda,
              std::optional<Side> side = std::nullopt);

/// chi_k(lambda) = prod_{m != k} (lambda_m^* - lambda) / w_m(lambda), analytic on U_k.
cx chi_factor(const RootContext& ctx, int k, cx lambda);

/// Same product with user-supplied roots sigma in place of lambda_m^*.
cx zeta_factor(const RootContext& ctx, int k, cx lambda, const BiSequence& sigma);

/**
 * Product-machinery self test for lambda in U_n: magnitude of
 * prod_{m != n, |m| <= M} (m pi - lambda)/w_m(lambda) - 1, which is the
 * sine-product form of the quotient estimate with the closed tail cancelled.
 */
double sine_product_check(const RootContext& ctx, int n, cx lambda);

} // namespace zsb

#endif
