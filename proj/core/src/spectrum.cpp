#include "zsb/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zsb/errors.hpp"
#include "zsb/parallel.hpp"
#include "zsb/quadrature.hpp"

namespace zsb {

std::vector<int> SpectralData::open_gaps() const {
    std::vector<int> out;
    for (int n = -N; n <= N; ++n)
        if (is_open(n)) out.push_back(n);
    return out;
}

namespace {

struct Eval {
    const TransferEngine& eng;
    cx delta(cx z) const { return eng.discriminant(z).first; }
    cx ddelta(cx z) const { return eng.discriminant(z).second; }
};

// Secant iteration for a zero of dDelta; falls back to a bracketed bisection
// on the real line when the iteration wanders.
cx find_lam_dot(const Eval& ev, cx seed, bool realline, double tol) {
    cx x0 = seed, x1 = seed + 0.05;
    cx f0 = ev.ddelta(x0), f1 = ev.ddelta(x1);
    for (int it = 0; it < 60; ++it) {
        if (std::abs(f1 - f0) == 0.0) break;
        cx x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (std::abs(x2 - seed) > 0.75 * PI) break;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = ev.ddelta(x1);
        if (std::abs(x1 - x0) < tol * (1.0 + std::abs(x1))) return x1;
    }
    if (!realline)
        throw ConvergenceError("lambda_dot secant stagnated near Re lambda = " +
                                   std::to_string(seed.real()),
                               std::abs(f1));
    // bracketed rescue: scan outward for a sign change of dDelta
    double c = seed.real();
    double d = 0.1 * PI;
    double a = c, fa = ev.ddelta(cx(a, 0)).real();
    double b = a, fb = fa;
    bool found = false;
    for (int k = 1; k <= 14 && !found; ++k) {
        for (double sgn : {+1.0, -1.0}) {
            double x = c + sgn * k * d / 2.0;
            double fx = ev.ddelta(cx(x, 0)).real();
            if (fa * fx <= 0.0 && x != a) {
                b = x;
                fb = fx;
                found = true;
                break;
            }
            a = x;
            fa = fx;
        }
    }
    if (!found)
        throw ConvergenceError("no dDelta sign change near lambda = " + std::to_string(c), 0.0);
    if (a > b) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        double fm = ev.ddelta(cx(m, 0)).real();
        if (fa * fm <= 0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a < tol) break;
    }
    return cx(0.5 * (a + b), 0);
}

// Root of s*Delta - 2 on one side of lam_dot (real-type branch). The
// bracket endpoints keep Newton honest near the band edge.
double refine_edge_real(const Eval& ev, double lamdot, double step0, int dir,
                        double s, double tol) {
    double lo = lamdot; // f(lo) >= 0 inside the gap
    double d = std::max(step0, 4.0 * tol);
    double hi = 0;
    bool bracketed = false;
    for (int k = 0; k < 80; ++k) {
        hi = lamdot + dir * d;
        double f = s * ev.delta(cx(hi, 0)).first.real() - 2.0;
        if (f < 0) {
            bracketed = true;
            break;
        }
        lo = hi;
        d *= 1.4;
        if (d > 8.0 * PI)
            throw LocalizationError("eigenvalue bracket expansion failed near lambda = " +
                                    std::to_string(lamdot));
    }
    if (!bracketed)
        throw LocalizationError("no band edge found near lambda = " + std::to_string(lamdot));
    if (dir < 0) std::swap(lo, hi); // keep lo < hi
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 80; ++it) {
        auto [del, dd] = ev.eng.discriminant(cx(x, 0));
        double f = s * del.real() - 2.0;
        double fp = s * dd.real();
        // maintain the sign bracket: f >= 0 on the gap side
        if ((dir > 0) == (f >= 0))
            lo = std::max(std::min(lo, hi), std::min(x, std::max(lo, hi)));
        double xn = (fp != 0) ? x - f / fp : 0.5 * (lo + hi);
        if (!(xn > std::min(lo, hi) && xn < std::max(lo, hi)))
            xn = 0.5 * (lo + hi);
        if (f >= 0) {
            if (dir > 0) lo = x; else hi = x;
        } else {
            if (dir > 0) hi = x; else lo = x;
        }
        double prev = x;
        x = xn;
        if (std::abs(x - prev) < tol * (1.0 + std::abs(x))) return x;
        if (std::abs(hi - lo) < tol) return 0.5 * (lo + hi);
    }
    return x;
}

// Complex Newton polish of Delta - 2s = 0 from a quadratic-model seed.
cx refine_edge_complex(const Eval& ev, cx seed, double s, double tol) {
    cx x = seed;
    for (int it = 0; it < 60; ++it) {
        auto [del, dd] = ev.eng.discriminant(x);
        cx f = s * del - 2.0;
        if (std::abs(dd) == 0.0) break;
        cx step = f / (s * dd);
        x -= step;
        if (std::abs(step) < tol * (1.0 + std::abs(x))) return x;
    }
    throw ConvergenceError("complex band-edge Newton stagnated", 0.0);
}

bool lex_less(cx a, cx b) {
    double snap = 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
    if (std::abs(a.real() - b.real()) > snap) return a.real() < b.real();
    return a.imag() < b.imag();
}

double parity_sign(int n) { return (((n % 2) + 2) % 2 == 0) ? 1.0 : -1.0; }

} // namespace

SpectralData locate_spectrum(const TransferEngine& engine, int N,
                             const LocateOptions& opt) {
    Eval ev{engine};
    const bool realline = engine.potential().is_real_type();
    const double tol = opt.tol;
    const double collapse = 10.0 * tol;

    SpectralData sd;
    sd.N = N;
    sd.real_type = realline;
    sd.collapse_tol = collapse;
    const int W = 2 * N + 1;
    sd.lam_minus.resize(W);
    sd.lam_plus.resize(W);
    sd.tau.resize(W);
    sd.gamma.resize(W);
    sd.lam_dot.resize(W);
    sd.disc_center.resize(W);
    sd.disc_radius.resize(W);

    // Pass 1: zeros of dDelta, swept from the window edge with continuation
    // seeds (the comb can drift by O(1) for large potentials, but the edge
    // indices sit close to n pi).
    cx drift = 0;
    for (int n = -N; n <= N; ++n) {
        cx seed = double(n) * PI + drift;
        cx ld = find_lam_dot(ev, seed, realline, tol);
        sd.lam_dot[sd.idx(n)] = ld;
        drift = ld - double(n) * PI;
        if (n > -N && !lex_less(sd.lam_dot[sd.idx(n - 1)], ld))
            throw LocalizationError("dDelta zeros out of order at n = " + std::to_string(n));
    }

    // Pass 2 (parallel): the eigenvalue pair around each lambda_n^*.
    parallel_for(W, [&](int i) {
        int n = i - N;
        double s = parity_sign(n);
        cx ld = sd.lam_dot[i];
        auto [del0, dd0] = engine.discriminant(ld);
        cx g0 = s * del0 - 2.0;
        double h = 0.01;
        cx dd2 = s * (engine.discriminant(ld + h).second -
                      engine.discriminant(ld - h).second) / (2.0 * h);
        cx gam_sq = -2.0 * g0 / dd2; // (gamma/2)^2 from the local quadratic model
        double gam_est = 2.0 * std::sqrt(std::abs(gam_sq));
        if (gam_est < collapse || std::abs(g0) < 1e-15) {
            sd.lam_minus[i] = sd.lam_plus[i] = ld;
            return;
        }
        if (realline) {
            double lp = refine_edge_real(ev, ld.real(), 0.45 * gam_est, +1, s, tol);
            double lm = refine_edge_real(ev, ld.real(), 0.45 * gam_est, -1, s, tol);
            sd.lam_minus[i] = cx(lm, 0);
            sd.lam_plus[i] = cx(lp, 0);
        } else {
            cx half = std::sqrt(gam_sq);
            cx a = refine_edge_complex(ev, ld + half, s, tol);
            cx b = refine_edge_complex(ev, ld - half, s, tol);
            if (std::abs(a - b) < collapse) {
                sd.lam_minus[i] = sd.lam_plus[i] = ld;
                return;
            }
            if (lex_less(b, a)) std::swap(a, b);
            sd.lam_minus[i] = a;
            sd.lam_plus[i] = b;
        }
    });

    // Midpoints, collapse snapping, and a lambda_dot polish seeded at tau_n.
    parallel_for(W, [&](int i) {
        int n = i - N;
        cx t = 0.5 * (sd.lam_minus[i] + sd.lam_plus[i]);
        cx g = sd.lam_plus[i] - sd.lam_minus[i];
        if (std::abs(g) < collapse) {
            g = 0;
            sd.lam_minus[i] = sd.lam_plus[i] = sd.lam_dot[i] = t;
        } else {
            cx x0 = t, x1 = t + 0.1 * g;
            cx f0 = ev.ddelta(x0), f1 = ev.ddelta(x1);
            for (int it = 0; it < 40 && std::abs(f1 - f0) > 0; ++it) {
                cx x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = ev.ddelta(x1);
                if (std::abs(x1 - x0) < tol * (1.0 + std::abs(x1))) break;
            }
            sd.lam_dot[i] = x1;
            if (realline) {
                // keep everything exactly real for real-type data
                sd.lam_dot[i] = cx(sd.lam_dot[i].real(), 0);
                t = cx(t.real(), 0);
                g = cx(g.real(), 0);
            }
        }
        sd.tau[i] = t;
        sd.gamma[i] = g;
        (void)n;
    });

    // Ordering across the window.
    for (int n = -N; n < N; ++n)
        if (!lex_less(sd.lam_plus[sd.idx(n)], sd.lam_minus[sd.idx(n + 1)]))
            throw LocalizationError("lexicographic eigenvalue ordering violated at n = " +
                                    std::to_string(n));

    // Isolating discs: the default disc D_n (center n pi, radius pi/5)
    // whenever it comfortably contains the gap, otherwise a custom disc
    // centered at tau_n.
    const double R_DEF = PI / 5.0;
    for (int n = -N; n <= N; ++n) {
        int i = sd.idx(n);
        double need = 1.35 * std::max({std::abs(sd.gamma[i]) / 2.0,
                                       std::abs(sd.lam_dot[i] - sd.tau[i]), 0.02});
        double off = std::abs(sd.tau[i] - double(n) * PI);
        if (off + need <= 0.9 * R_DEF) {
            sd.disc_center[i] = double(n) * PI;
            sd.disc_radius[i] = R_DEF;
        } else {
            sd.disc_center[i] = sd.tau[i];
            sd.disc_radius[i] = need;
        }
    }
    // shrink custom discs pairwise until disjoint
    for (int pass = 0; pass < 4; ++pass) {
        bool ok = true;
        for (int n = -N; n < N; ++n) {
            int i = sd.idx(n), j = sd.idx(n + 1);
            double gap = std::abs(sd.disc_center[j] - sd.disc_center[i]);
            double slack = gap - sd.disc_radius[i] - sd.disc_radius[j];
            if (slack <= 0.02 * gap) {
                ok = false;
                double scale = 0.95 * gap / (sd.disc_radius[i] + sd.disc_radius[j]);
                sd.disc_radius[i] *= scale;
                sd.disc_radius[j] *= scale;
            }
        }
        if (ok) break;
    }
    for (int n = -N; n <= N; ++n) {
        int i = sd.idx(n);
        double need = std::max({std::abs(sd.gamma[i]) / 2.0,
                                std::abs(sd.lam_dot[i] - sd.disc_center[i])});
        if (sd.disc_radius[i] <= 1.02 * need)
            throw LocalizationError("isolating disc at n = " + std::to_string(n) +
                                    " cannot be certified");
    }

    // (S2) separation constant and (S3) default-disc threshold.
    double c = 1.0;
    for (int n = -N; n <= N; ++n)
        for (int m = n + 1; m <= N; ++m) {
            double dist = std::abs(sd.disc_center[sd.idx(m)] - sd.disc_center[sd.idx(n)]) -
                          sd.disc_radius[sd.idx(m)] - sd.disc_radius[sd.idx(n)];
            if (dist <= 0)
                throw LocalizationError("isolating discs overlap: n = " + std::to_string(n) +
                                        ", m = " + std::to_string(m));
            double q = std::abs(m - n);
            c = std::max({c, q / dist, dist / q});
        }
    sd.sep_constant = c;
    sd.n_phi = 0;
    for (int n = N; n >= -N; --n) {
        int i = sd.idx(n);
        bool is_default = sd.disc_center[i] == cx(double(n) * PI, 0) &&
                          sd.disc_radius[i] == R_DEF;
        if (!is_default) {
            sd.n_phi = std::abs(n) + 1;
            break;
        }
    }

    // Winding certification: Delta^2 - 4 must have exactly two zeros in U_n.
    if (opt.winding_stride > 0) {
        std::vector<int> check;
        for (int n = -N; n <= N; ++n)
            if (n % opt.winding_stride == 0 || std::abs(n) < 3 || std::abs(n) > N - 2)
                check.push_back(n);
        parallel_for(int(check.size()), [&](int k) {
            int n = check[k];
            int i = sd.idx(n);
            auto f = [&](cx z) {
                auto [del, dd] = engine.discriminant(z);
                return 2.0 * del * dd / (del * del - 4.0);
            };
            double w = 0;
            bool stable = false;
            for (int nodes = 32; nodes <= opt.max_winding_nodes && !stable; nodes *= 2) {
                auto pts = circle_nodes(sd.disc_center[i], sd.disc_radius[i], nodes);
                std::vector<cx> vals(nodes);
                for (int j = 0; j < nodes; ++j) vals[j] = f(pts[j]);
                cx integral = circle_trapezoid(pts, vals, sd.disc_center[i]);
                double west = (integral / cx(0, 2.0 * PI)).real();
                if (std::abs(west - std::round(west)) < 0.08 &&
                    (nodes > 32 && std::abs(west - w) < 0.05))
                    stable = true;
                w = west;
            }
            if (std::lround(w) != 2)
                throw LocalizationError("winding count " + std::to_string(std::lround(w)) +
                                        " != 2 in disc n = " + std::to_string(n));
        });
    }
    return sd;
}

SpectralData locate_spectrum(const Potential& phi, int N, double tol) {
    TransferEngine eng(phi);
    LocateOptions opt;
    opt.tol = tol;
    opt.winding_stride = (N <= 64) ? 1 : 8;
    return locate_spectrum(eng, N, opt);
}

GapCheckReport gap_check(const SpectralData& sd) {
    GapCheckReport rep;
    rep.eig_offset = BiSequence(sd.N);
    for (int n = -sd.N; n <= sd.N; ++n) {
        int i = sd.idx(n);
        rep.eig_offset.at(n) = std::max(std::abs(sd.lam_minus[i] - double(n) * PI),
                                        std::abs(sd.lam_plus[i] - double(n) * PI));
        if (sd.is_open(n)) {
            rep.open_indices.push_back(n);
            rep.lam_dot_rel.push_back((sd.lam_dot[i] - sd.tau[i]) /
                                      (sd.gamma[i] * sd.gamma[i]));
        }
    }
    return rep;
}

} // namespace zsb
