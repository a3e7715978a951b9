#include "zsb/frequencies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "zsb/errors.hpp"
#include "zsb/parallel.hpp"
#include "zsb/quadrature.hpp"

namespace zsb {

ActionResult action(const AbelianIntegral& ai, int n) {
    const RootContext& ctx = ai.context();
    if (!ctx.sd.in_window(n)) throw DomainError("action: index outside window");
    const auto& c = ai.contour(n);
    const int K = int(c.nodes.size());
    cx r1 = 0, r2 = 0;
    for (int j = 0; j < K; ++j) {
        cx dl = (c.nodes[j] - c.center); // trapezoid weight i dl 2pi/K
        r1 += c.nodes[j] * c.q[j] * dl;
        r2 += c.f_k[j] * dl;
    }
    cx w = cx(0, 1) * (2.0 * PI / K);
    ActionResult out;
    out.value = r1 * w / PI;
    out.alt_value = -r2 * w / PI;
    out.discrepancy = std::abs(out.value - out.alt_value);
    return out;
}

cx psi_quotient(const RootContext& ctx, const PsiSystem& psi, cx lambda) {
    cx prod = cx(0, 1);
    for (int m : ctx.open) {
        if (m == psi.n) continue;
        prod *= (psi.sigma.at(m) - lambda) / standard_root(ctx, m, lambda);
    }
    return psi.scale * prod / standard_root(ctx, psi.n, lambda);
}

namespace {

// psi/sqrt_c with unit scale, for the solver internals.
cx psi_quotient_raw(const RootContext& ctx, int n, const BiSequence& sigma, cx lambda) {
    cx prod = cx(0, 1);
    for (int m : ctx.open) {
        if (m == n) continue;
        prod *= (sigma.at(m) - lambda) / standard_root(ctx, m, lambda);
    }
    return prod / standard_root(ctx, n, lambda);
}

// oint over the cached circuit of gap k.
cx circuit_integral(const AbelianIntegral& ai, int k,
                    const std::function<cx(cx)>& f) {
    const auto& c = ai.contour(k);
    const int K = int(c.nodes.size());
    cx sum = 0;
    for (int j = 0; j < K; ++j) sum += f(c.nodes[j]) * (c.nodes[j] - c.center);
    return sum * cx(0, 1) * (2.0 * PI / K);
}

} // namespace

PsiSystem solve_psi(const AbelianIntegral& ai, int n, int K, double tol) {
    const RootContext& ctx = ai.context();
    if (!ctx.sd.in_window(n)) throw DomainError("solve_psi: index outside window");
    if (K < ctx.sd.N) throw DomainError("solve_psi: requires K >= window size");

    PsiSystem psi;
    psi.n = n;
    psi.sigma = BiSequence(ctx.sd.N);
    for (int m = -ctx.sd.N; m <= ctx.sd.N; ++m) psi.sigma.at(m) = ctx.sd.tau[ctx.idx(m)];
    psi.sigma.at(n) = ctx.sd.lam_dot[ctx.idx(n)];

    std::vector<int> ks;
    for (int m : ctx.open)
        if (m != n && std::abs(m) <= K) ks.push_back(m);
    const int U = int(ks.size());

    if (U > 0) {
        // residuals and the log-derivative Jacobian share one pass over the circuits
        auto residuals = [&](const BiSequence& sigma, Eigen::VectorXcd& R,
                             Eigen::MatrixXcd* J) {
            for (int a = 0; a < U; ++a) {
                const auto& c = ai.contour(ks[a]);
                const int nodes = int(c.nodes.size());
                cx sum = 0;
                Eigen::VectorXcd row;
                if (J) row = Eigen::VectorXcd::Zero(U);
                for (int j = 0; j < nodes; ++j) {
                    cx val = psi_quotient_raw(ctx, n, sigma, c.nodes[j]) *
                             (c.nodes[j] - c.center);
                    sum += val;
                    if (J)
                        for (int b = 0; b < U; ++b)
                            row(b) += val / (sigma.at(ks[b]) - c.nodes[j]);
                }
                cx w = cx(0, 1) * (2.0 * PI / nodes);
                R(a) = sum * w;
                if (J) J->row(a) = row * w;
            }
        };

        Eigen::VectorXcd R(U);
        Eigen::MatrixXcd J(U, U);
        double rnorm = 0;
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            residuals(psi.sigma, R, &J);
            rnorm = R.lpNorm<Eigen::Infinity>();
            if (rnorm < tol) {
                psi.newton_iters = it;
                converged = true;
                break;
            }
            Eigen::VectorXcd step = J.partialPivLu().solve(-R);
            if (!step.allFinite())
                throw ConditioningError("solve_psi: singular Jacobian for n = " +
                                        std::to_string(n));
            // step-halving damping
            double t = 1.0;
            Eigen::VectorXcd Rtry(U);
            BiSequence trial = psi.sigma;
            for (int h = 0; h <= 20; ++h) {
                for (int b = 0; b < U; ++b)
                    trial.at(ks[b]) = psi.sigma.at(ks[b]) + t * step(b);
                residuals(trial, Rtry, nullptr);
                if (Rtry.lpNorm<Eigen::Infinity>() < rnorm || h == 20) break;
                t *= 0.5;
            }
            psi.sigma = trial;
        }
        if (!converged)
            throw ConvergenceError("solve_psi: Newton stagnated for n = " + std::to_string(n) +
                                       " (last residual below)",
                                   rnorm);
    }

    // normalization from the n-th circuit
    cx norm = circuit_integral(ai, n, [&](cx z) {
        return psi_quotient_raw(ctx, n, psi.sigma, z);
    });
    if (std::abs(norm) < 1e-6)
        throw ConvergenceError("solve_psi: degenerate normalization circuit", std::abs(norm));
    psi.scale = 2.0 * PI / norm;

    // validate on doubled nodes
    double worst = 0;
    for (int m : ctx.open) {
        if (m == n) continue;
        const auto& c = ai.contour(m, 2 * int(ai.contour(m).nodes.size()));
        const int nodes = int(c.nodes.size());
        cx sum = 0;
        for (int j = 0; j < nodes; ++j)
            sum += psi_quotient(ctx, psi, c.nodes[j]) * (c.nodes[j] - c.center);
        worst = std::max(worst, std::abs(sum * cx(0, 1) * (2.0 * PI / nodes)));
    }
    psi.max_residual = worst;
    return psi;
}

cx moment(const AbelianIntegral& ai, const PsiSystem& psi, int k, int m) {
    const RootContext& ctx = ai.context();
    if (!ctx.sd.in_window(k)) throw DomainError("moment: index outside window");
    if (m < 0 || m > 3) throw DomainError("moment: m must be in {0,1,2,3}");
    if (m >= 1 && !ctx.sd.is_open(k)) return 0.0; // collapsed circuits vanish identically
    const auto& c = ai.contour(k);
    const int K = int(c.nodes.size());
    cx sum = 0;
    for (int j = 0; j < K; ++j) {
        cx f = 1;
        for (int p = 0; p < m; ++p) f *= c.f_k[j];
        sum += f * psi_quotient(ctx, psi, c.nodes[j]) * (c.nodes[j] - c.center);
    }
    return sum * cx(0, 1) * (2.0 * PI / K);
}

FrequencySpectrum frequency_spectrum(const AbelianIntegral& ai, const Potential& phi,
                                     int N, double tol) {
    const RootContext& ctx = ai.context();
    if (N > ctx.sd.N)
        throw DomainError("frequency_spectrum: N exceeds the located window");

    FrequencySpectrum fs;
    fs.N = N;
    const int W = 2 * N + 1;
    fs.I.resize(W);
    fs.omega_star.resize(W);
    fs.omega_sharp.resize(W);
    fs.omega.assign(W, cx(0));
    fs.trunc_err.resize(W);
    fs.has_omega = phi.is_er();

    HamiltonianValues H = hamiltonians(phi);
    fs.h1 = H.h1.real();

    // contour/F caches are shared: fill them (including the doubled-node
    // validation circuits) before the parallel sweep
    std::vector<int> prefill;
    for (int k : ctx.open) prefill.push_back(k);
    for (int n = -N; n <= N; ++n) prefill.push_back(n);
    parallel_for(int(prefill.size()), [&](int i) {
        const auto& c = ai.contour(prefill[i]);
        ai.contour(prefill[i], 2 * int(c.nodes.size()));
    });

    parallel_for(W, [&](int i) {
        int n = i - N;
        PsiSystem psi = solve_psi(ai, n, ctx.sd.N, tol);
        cx star = 0;
        double edge = 0;
        for (int k : ctx.open) {
            cx om2 = moment(ai, psi, k, 2);
            star += double(k) * om2;
            if (std::abs(k) >= ctx.sd.N - 1) edge += std::abs(12.0 * k * om2);
        }
        star *= -12.0;
        fs.omega_star[i] = star;
        fs.I[i] = action(ai, n).value;
        double c3 = ctx.sd.collapse_tol * ctx.sd.collapse_tol * ctx.sd.collapse_tol;
        fs.trunc_err[i] = edge + 12.0 * ctx.sd.N * ctx.sd.N * c3;
        double lin = std::pow(2.0 * n * PI, 3);
        fs.omega_sharp[i] = lin + star;
        if (fs.has_omega) fs.omega[i] = lin + 12.0 * n * PI * fs.h1 + star;
    });
    return fs;
}

BiSequence freq_asymptotics_report(const FrequencySpectrum& fs) {
    BiSequence out(fs.N);
    for (int n = -fs.N; n <= fs.N; ++n) {
        if (n == 0) continue;
        out.at(n) = (fs.omega_star[fs.idx(n)] + 12.0 * n * PI * fs.I[fs.idx(n)]) / double(n);
    }
    return out;
}

} // namespace zsb
