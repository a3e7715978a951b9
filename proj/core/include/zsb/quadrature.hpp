#ifndef ZSB_QUADRATURE_HPP
#define ZSB_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "zsb/mathutil.hpp"

namespace zsb {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1,1].
struct GaussRule {
    std::vector<double> x, w;
};

/// Returns the (cached) n-point Gauss-Legendre rule.
const GaussRule& gauss_legendre(int n);

/// Integral of f over [a,b] (real parameter) with a fixed n-point rule.
cx gl_fixed(const std::function<cx(double)>& f, double a, double b, int n);

/**
 * Adaptive Gauss-Legendre integration of f over the real parameter
 * interval [a,b]. Panels are bisected until the 15- vs 31-point estimates
 * agree to abs_tol (plus a matching relative term on the running total).
 */
cx gl_adaptive(const std::function<cx(double)>& f, double a, double b,
               double abs_tol, int max_depth = 14);

/**
 * Contour integral of f over the circle center + r*e^{i theta} by the
 * trapezoid rule, doubling the node count from n0 until two consecutive
 * estimates agree to tol (absolute + relative). Spectrally accurate for
 * integrands analytic in an annulus around the circle.
 */
cx circle_integral(const std::function<cx(cx)>& f, cx center, double r,
                   double tol, int n0 = 64, int n_max = 1 << 15);

/// Uniform circle nodes center + r*e^{i(theta0 + 2 pi j / n)}, j = 0..n-1.
std::vector<cx> circle_nodes(cx center, double r, int n, double theta0 = PI);

/// Trapezoid value of \oint f dlambda from samples on circle_nodes(...).
cx circle_trapezoid(const std::vector<cx>& nodes, const std::vector<cx>& values,
                    cx center);

} // namespace zsb

#endif
