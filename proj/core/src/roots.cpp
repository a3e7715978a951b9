#include "zsb/roots.hpp"

#include <cmath>
#include <string>

#include "zsb/errors.hpp"

namespace zsb {

RootContext make_root_context(SpectralData sd, int M) {
    RootContext ctx;
    if (M < 0) M = sd.N;
    if (M < sd.N) throw DomainError("make_root_context: requires M >= window size");
    ctx.M = M;
    ctx.open = sd.open_gaps();
    ctx.sd = std::move(sd);
    // Sign convention check on the real-type anchor interval (lambda_0^+, lambda_1^-).
    if (ctx.sd.real_type && ctx.sd.N >= 1) {
        cx mid = 0.5 * (ctx.sd.lam_plus[ctx.idx(0)] + ctx.sd.lam_minus[ctx.idx(1)]);
        cx v = cx(0, 1) * canonical_root(ctx, mid);
        ctx.sign_check = v.real();
        if (!(ctx.sign_check > 0))
            throw DomainError("canonical root sign convention violated on anchor interval");
    }
    return ctx;
}

namespace {

void require_reach(const RootContext& ctx, cx lambda) {
    if (std::abs(lambda.real()) > (ctx.M - 1.5) * PI)
        throw AccuracyError("product evaluation outside the safe window |Re lambda| <= (M-1.5)pi");
}

// Gap-interior detection for the principal branch: points numerically on an
// open gap must carry a side tag, which is never inferred from Im lambda.
bool strictly_inside_gap(cx tau, cx gamma, cx lambda) {
    if (gamma == cx(0)) return false;
    cx t = 2.0 * (lambda - tau) / gamma;
    return std::abs(t.imag()) < 1e-12 * (1.0 + std::abs(t.real())) &&
           std::abs(t.real()) < 1.0 - 1e-12;
}

// The caller's side tag applies to the one factor whose gap lambda sits on.
std::optional<Side> side_for(const RootContext& ctx, int m, cx lambda,
                             const std::optional<Side>& side) {
    if (!side || !ctx.sd.in_window(m)) return std::nullopt;
    if (strictly_inside_gap(ctx.sd.tau[ctx.idx(m)], ctx.sd.gamma[ctx.idx(m)], lambda))
        return side;
    return std::nullopt;
}

} // namespace

cx standard_root(const RootContext& ctx, int n, cx lambda, std::optional<Side> side) {
    cx tau, gamma;
    if (ctx.sd.in_window(n)) {
        tau = ctx.sd.tau[ctx.idx(n)];
        gamma = ctx.sd.gamma[ctx.idx(n)];
    } else {
        tau = double(n) * PI;
        gamma = 0;
    }
    if (gamma == cx(0)) return tau - lambda;
    if (side) {
        cx t = 2.0 * (lambda - tau) / gamma;
        cx s = sqrt_plus(1.0 - t * t);
        return (*side == Side::plus ? cx(0, -1) : cx(0, 1)) * (gamma / 2.0) * s;
    }
    if (strictly_inside_gap(tau, gamma, lambda))
        throw DomainError("standard_root: lambda inside open gap n = " + std::to_string(n) +
                          " requires a side tag");
    cx d = tau - lambda;
    return d * sqrt_plus(1.0 - gamma * gamma / (4.0 * d * d));
}

cx canonical_root(const RootContext& ctx, cx lambda, std::optional<Side> side) {
    require_reach(ctx, lambda);
    // 2i sin-tail form: sqrt_c = 2i w_{m0} * [sin(lambda)/(lambda - m0 pi)]
    //                          * prod_{m != m0} w_m/(m pi - lambda)
    long m0 = std::lround(lambda.real() / PI);
    if (m0 > ctx.M) m0 = ctx.M;
    if (m0 < -ctx.M) m0 = -ctx.M;
    cx prod = cx(0, 2) * sin_over_offset(lambda, m0) *
              standard_root(ctx, int(m0), lambda, side_for(ctx, int(m0), lambda, side));
    for (int m = -ctx.M; m <= ctx.M; ++m) {
        if (m == m0) continue;
        prod *= standard_root(ctx, m, lambda, side_for(ctx, m, lambda, side)) /
                (double(m) * PI - lambda);
    }
    return prod;
}

cx quotient_w(const RootContext& ctx, cx lambda, std::optional<Side> side) {
    require_reach(ctx, lambda);
    // collapsed gaps contribute exactly 1, so only open indices enter
    cx prod = cx(0, -1);
    for (int m : ctx.open) {
        prod *= (ctx.sd.lam_dot[ctx.idx(m)] - lambda) /
                standard_root(ctx, m, lambda, side_for(ctx, m, lambda, side));
    }
    return prod;
}

cx chi_factor(const RootContext& ctx, int k, cx lambda) {
    require_reach(ctx, lambda);
    cx prod = 1;
    for (int m : ctx.open) {
        if (m == k) continue;
        prod *= (ctx.sd.lam_dot[ctx.idx(m)] - lambda) / standard_root(ctx, m, lambda);
    }
    return prod;
}

cx zeta_factor(const RootContext& ctx, int k, cx lambda, const BiSequence& sigma) {
    require_reach(ctx, lambda);
    cx prod = 1;
    for (int m : ctx.open) {
        if (m == k) continue;
        cx s = sigma.in_window(m) ? sigma.at(m) : ctx.sd.tau[ctx.idx(m)];
        prod *= (s - lambda) / standard_root(ctx, m, lambda);
    }
    return prod;
}

double sine_product_check(const RootContext& ctx, int n, cx lambda) {
    require_reach(ctx, lambda);
    cx prod = 1;
    for (int m = -ctx.M; m <= ctx.M; ++m) {
        if (m == n) continue;
        prod *= (double(m) * PI - lambda) / standard_root(ctx, m, lambda);
    }
    return std::abs(prod - 1.0);
}

} // namespace zsb
