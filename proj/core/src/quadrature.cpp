#include "zsb/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "zsb/errors.hpp"

namespace zsb {

namespace {

// Newton iteration on Legendre polynomials; nodes are symmetric so only
// half of them are solved for.
GaussRule compute_gauss(int n) {
    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(PI * (i + 0.75) / (n + 0.5));
        double p0 = 0, p1 = 0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
    return it->second;
}

cx gl_fixed(const std::function<cx(double)>& f, double a, double b, int n) {
    const GaussRule& g = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cx sum = 0;
    for (int i = 0; i < n; ++i) sum += g.w[i] * f(mid + half * g.x[i]);
    return half * sum;
}

namespace {

cx gl_adaptive_rec(const std::function<cx(double)>& f, double a, double b,
                   double tol, int depth, int max_depth) {
    cx coarse = gl_fixed(f, a, b, 15);
    cx fine = gl_fixed(f, a, b, 31);
    double err = std::abs(fine - coarse);
    if (err < tol || depth >= max_depth) return fine;
    double m = 0.5 * (a + b);
    return gl_adaptive_rec(f, a, m, 0.5 * tol, depth + 1, max_depth) +
           gl_adaptive_rec(f, m, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

cx gl_adaptive(const std::function<cx(double)>& f, double a, double b,
               double abs_tol, int max_depth) {
    return gl_adaptive_rec(f, a, b, abs_tol, 0, max_depth);
}

std::vector<cx> circle_nodes(cx center, double r, int n, double theta0) {
    std::vector<cx> nodes(n);
    for (int j = 0; j < n; ++j) {
        double th = theta0 + 2.0 * PI * j / n;
        nodes[j] = center + r * cx(std::cos(th), std::sin(th));
    }
    return nodes;
}

cx circle_trapezoid(const std::vector<cx>& nodes, const std::vector<cx>& values,
                    cx center) {
    const int n = int(nodes.size());
    cx sum = 0;
    for (int j = 0; j < n; ++j) sum += values[j] * (nodes[j] - center);
    return sum * cx(0, 1) * (2.0 * PI / n);
}

cx circle_integral(const std::function<cx(cx)>& f, cx center, double r,
                   double tol, int n0, int n_max) {
    cx prev = 0;
    bool have_prev = false;
    for (int n = n0; n <= n_max; n *= 2) {
        auto nodes = circle_nodes(center, r, n);
        std::vector<cx> vals(n);
        for (int j = 0; j < n; ++j) vals[j] = f(nodes[j]);
        cx est = circle_trapezoid(nodes, vals, center);
        if (have_prev && std::abs(est - prev) <= tol * (1.0 + std::abs(est)))
            return est;
        prev = est;
        have_prev = true;
    }
    throw AccuracyError("circle_integral: trapezoid did not converge at n_max nodes");
}

} // namespace zsb
