#include "zsb/seq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zsb/errors.hpp"

namespace zsb {

double weighted_norm(const BiSequence& x, double s, double q) {
    if (!(q >= 1.0)) throw DomainError("weighted_norm: requires q >= 1");
    double sum = 0;
    for (int n = -x.N; n <= x.N; ++n)
        sum += std::pow(std::pow(1.0 + std::abs(n), s) * std::abs(x.at(n)), q);
    return std::pow(sum, 1.0 / q);
}

BiSequence hilbert(const BiSequence& x) {
    BiSequence y(x.N);
    for (int n = -x.N; n <= x.N; ++n) {
        cx sum = 0;
        for (int m = -x.N; m <= x.N; ++m) {
            if (m == n) continue;
            sum += x.at(m) / double(m - n);
        }
        y.at(n) = sum;
    }
    return y;
}

BiSequence modified_transform(const BiSequence& x, const BiSequence& rho,
                              const BiSequence& sigma, double C) {
    if (rho.N != x.N || sigma.N != x.N)
        throw DomainError("modified_transform: window mismatch");
    const double inv_c = 1.0 / C;
    for (int m = -x.N; m <= x.N; ++m)
        for (int n = -x.N; n <= x.N; ++n) {
            if (m == n) continue;
            if (std::abs(rho.at(m) - sigma.at(n)) < inv_c * std::abs(m - n))
                throw DomainError("modified_transform: separation violated at (m,n)=(" +
                                  std::to_string(m) + "," + std::to_string(n) + ")");
        }
    BiSequence y(x.N);
    for (int n = -x.N; n <= x.N; ++n) {
        cx sum = 0;
        for (int m = -x.N; m <= x.N; ++m) {
            if (m == n) continue;
            sum += x.at(m) / (rho.at(m) - sigma.at(n));
        }
        y.at(n) = PI * sum;
    }
    return y;
}

namespace {

DecayFit loglog_fit(const std::vector<double>& lg_n, const std::vector<double>& lg_x) {
    const int P = int(lg_n.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < P; ++i) {
        sx += lg_n[i];
        sy += lg_x[i];
        sxx += lg_n[i] * lg_n[i];
        sxy += lg_n[i] * lg_x[i];
    }
    double denom = P * sxx - sx * sx;
    DecayFit fit;
    fit.points = P;
    fit.alpha = -(P * sxy - sx * sy) / denom;
    double a = (sy * sxx - sx * sxy) / denom; // intercept
    double rss = 0;
    for (int i = 0; i < P; ++i) {
        double pred = a - fit.alpha * lg_n[i];
        rss += sqr(lg_x[i] - pred);
    }
    fit.residual = std::sqrt(rss / P);
    return fit;
}

} // namespace

DecayFit decay_exponent_range(const BiSequence& x, int n_lo, int n_hi) {
    double peak = 0;
    for (int n = -x.N; n <= x.N; ++n) peak = std::max(peak, std::abs(x.at(n)));
    if (peak == 0) throw DomainError("decay_exponent: all entries vanish");
    const double floor = 1e-14 * peak;

    std::vector<double> lg_n, lg_x;
    for (int n = n_lo; n <= n_hi; ++n) {
        for (int s : {+1, -1}) {
            int idx = s * n;
            if (!x.in_window(idx)) continue;
            double a = std::abs(x.at(idx));
            if (a > floor) {
                lg_n.push_back(std::log(double(n)));
                lg_x.push_back(std::log(a));
            }
        }
    }
    if (int(lg_n.size()) < 4)
        throw DomainError("decay_exponent: fewer than 4 usable entries in fit range");
    DecayFit fit = loglog_fit(lg_n, lg_x);

    // Curvature probe: split the range in half; a strongly steepening slope
    // (or an absurdly large one) marks faster-than-polynomial decay.
    int mid = (n_lo + n_hi) / 2;
    if (mid > n_lo + 1 && n_hi > mid + 1) {
        std::vector<double> a_n, a_x, b_n, b_x;
        for (size_t i = 0; i < lg_n.size(); ++i) {
            if (lg_n[i] <= std::log(double(mid))) {
                a_n.push_back(lg_n[i]);
                a_x.push_back(lg_x[i]);
            } else {
                b_n.push_back(lg_n[i]);
                b_x.push_back(lg_x[i]);
            }
        }
        if (a_n.size() >= 3 && b_n.size() >= 3) {
            double s1 = loglog_fit(a_n, a_x).alpha;
            double s2 = loglog_fit(b_n, b_x).alpha;
            if (s2 > s1 + 2.0 && s2 > 4.0) fit.super_polynomial = true;
        }
    }
    if (fit.alpha > 12.0) fit.super_polynomial = true;
    return fit;
}

DecayFit decay_exponent(const BiSequence& x) {
    int lo = std::max(2, x.N / 4);
    return decay_exponent_range(x, lo, x.N);
}

} // namespace zsb
