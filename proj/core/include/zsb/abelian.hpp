#ifndef ZSB_ABELIAN_HPP
#define ZSB_ABELIAN_HPP

#include <map>
#include <mutex>

#include "zsb/potential.hpp"
#include "zsb/roots.hpp"
#include "zsb/zs.hpp"

namespace zsb {

struct QuadOptions {
    double tol = 1e-11;
    double corridor_height = 0.35;     ///< detour height of admissible polylines
    int contour_nodes = 64;            ///< initial trapezoid nodes per circuit
    int contour_nodes_max = 4096;
    bool laurent_guard_columns = true; ///< absorb smooth bias in the Laurent fit
};

/**
 * Evaluator of the primitives F_n of dDelta / sqrt_c(Delta^2 - 4), normalized
 * to vanish at the endpoints of gap n. Off-gap values are path integrals of
 * the product quotient along admissible polylines (never crossing an open
 * gap except at their endpoints); the inverse-square-root endpoint behavior
 * is absorbed by quadratic and Chebyshev substitutions. F without an index
 * means F_0; F_n = F_0 + i n pi.
 */
class AbelianIntegral {
public:
    AbelianIntegral(const RootContext& ctx, const TransferEngine& engine,
                    QuadOptions opt = {});

    /// F_n(lambda); points on the open gap G_n require a side tag.
    cx F(int n, cx lambda, std::optional<Side> side = std::nullopt) const;

    /// Closed form of F = F_0 on the real line between gaps (real type only).
    cx F_realline(double x) const;

    /// Circuit around G_k with cached F_k values at its trapezoid nodes.
    struct Contour {
        cx center;
        double radius = 0;
        std::vector<cx> nodes;   ///< counterclockwise from the leftmost point
        std::vector<cx> f_k;     ///< F_k at the nodes
        std::vector<cx> q;       ///< quotient values at the nodes
        double closure = 0;      ///< residual of the full-loop quotient integral
    };
    /// Returns the cached contour for gap k, rebuilt if fewer nodes are cached.
    const Contour& contour(int k, int min_nodes = 0) const;
    double contour_radius(int k) const;

    struct LaurentFit {
        HamiltonianValues h;     ///< coefficients extracted from the expansion
        double residual = 0;     ///< rms misfit of the expansion tail
        double cond = 0;         ///< condition number of the scaled LS system
        cx combo_contour = 0;    ///< H4 - 6 H1 H2 from the F^4 circle integral
    };
    /**
     * Least-squares extraction of H1..H4 from F evaluated at (j+1/2)pi,
     * j in [jmin, jmax], against inverse powers of 2 lambda. Requires a
     * real-type context and jmin at or beyond the window edge.
     */
    LaurentFit laurent_fit(int jmin, int jmax) const;

    const RootContext& context() const { return ctx_; }
    const TransferEngine& engine() const { return engine_; }
    const QuadOptions& options() const { return opt_; }

    /// Quotient evaluation convenience (product representation).
    cx quotient(cx lambda, std::optional<Side> side = std::nullopt) const {
        return quotient_w(ctx_, lambda, side);
    }

private:
    const RootContext& ctx_;
    const TransferEngine& engine_;
    QuadOptions opt_;
    // keyed by (gap index, node count); entries are immutable once inserted,
    // so references stay valid for concurrent readers
    mutable std::map<std::pair<int, int>, Contour> cache_;
    mutable std::mutex mtx_;

    cx path_integral(int n, cx lambda, std::optional<Side> side) const;
    cx gap_side_value(int n, cx lambda, Side side) const;
    Contour build_contour(int k, int nodes) const;
};

} // namespace zsb

#endif
