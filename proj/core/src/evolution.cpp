#include "zsb/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "zsb/errors.hpp"
#include "zsb/spectrum.hpp"

namespace zsb {

namespace {

std::mutex fftw_plan_mutex; // plan creation is not thread-safe

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Real <-> half-complex transforms normalized so "hat" holds true
/// Fourier coefficients of modes 0..n/2.
struct Rfft {
    int n;
    double* buf_r;
    fftw_complex* buf_c;
    fftw_plan fwd, bwd;

    explicit Rfft(int n) : n(n) {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        buf_r = fftw_alloc_real(n);
        buf_c = fftw_alloc_complex(n / 2 + 1);
        fwd = fftw_plan_dft_r2c_1d(n, buf_r, buf_c, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, buf_c, buf_r, FFTW_ESTIMATE);
    }
    ~Rfft() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf_r);
        fftw_free(buf_c);
    }

    void forward(const std::vector<double>& u, std::vector<cx>& hat) {
        for (int j = 0; j < n; ++j) buf_r[j] = u[j];
        fftw_execute(fwd);
        hat.resize(n / 2 + 1);
        for (int m = 0; m <= n / 2; ++m)
            hat[m] = cx(buf_c[m][0], buf_c[m][1]) / double(n);
    }
    void backward(const std::vector<cx>& hat, std::vector<double>& u) {
        for (int m = 0; m <= n / 2; ++m) {
            buf_c[m][0] = hat[m].real();
            buf_c[m][1] = hat[m].imag();
        }
        fftw_execute(bwd);
        u.resize(n);
        for (int j = 0; j < n; ++j) u[j] = buf_r[j];
    }
};

} // namespace

double GridState::l2_norm_sq() const {
    double s = 0;
    for (double x : u) s += x * x;
    return s / u.size();
}

double GridState::mean() const {
    double s = 0;
    for (double x : u) s += x;
    return s / u.size();
}

GridState grid_from_potential(const Potential& phi, int grid_size) {
    if (!is_pow2(grid_size)) throw DomainError("grid size must be a power of two");
    if (!phi.is_er()) throw DomainError("grid_from_potential: requires an E_r potential");
    GridState gs;
    gs.u.resize(grid_size);
    for (int j = 0; j < grid_size; ++j)
        gs.u[j] = phi.eval_minus(double(j) / grid_size).real();
    return gs;
}

Potential potential_from_grid(const GridState& gs, double drop_tol) {
    Rfft fft(gs.size());
    std::vector<cx> hat;
    fft.forward(gs.u, hat);
    Potential::CoeffMap m;
    int kmax = gs.size() / 3;
    for (int k = 0; k <= kmax; ++k) {
        if (std::abs(hat[k]) <= drop_tol) continue;
        m[k] = hat[k];
        if (k > 0) m[-k] = std::conj(hat[k]);
    }
    return Potential::real_u(m);
}

struct MkdvIntegrator::Impl {
    int n;
    double dt;
    bool renorm;
    Rfft fft;
    std::vector<cx> E, E2;       // integrating factors over dt/2 and dt
    std::vector<double> u, ux, w;
    std::vector<cx> hat, uxh, wh;
    int cut;                     // dealiasing cutoff (2/3 rule)
    double initial_l2 = -1;

    Impl(int n, double dt, bool renorm) : n(n), dt(dt), renorm(renorm), fft(n) {
        cut = n / 3;
        E.resize(n / 2 + 1);
        E2.resize(n / 2 + 1);
        set_dt(dt);
    }

    void set_dt(double step) {
        dt = step;
        for (int m = 0; m <= n / 2; ++m) {
            double om = std::pow(2.0 * PI * m, 3); // dispersion of -d^3/dx^3
            E[m] = std::exp(cx(0, om * dt / 2.0));
            E2[m] = std::exp(cx(0, om * dt));
        }
    }

    void dealias(std::vector<cx>& h) {
        for (int m = cut + 1; m <= n / 2; ++m) h[m] = 0;
    }

    // nonlinear term N(hat) = 6 F[u^2 u_x] (- 6 int u^2 * F[u_x] when renormalized)
    std::vector<cx> nonlinear(std::vector<cx> h) {
        dealias(h);
        std::vector<cx> hx(h.size());
        for (size_t m = 0; m < h.size(); ++m) hx[m] = cx(0, 2.0 * PI * m) * h[m];
        fft.backward(h, u);
        fft.backward(hx, ux);
        w.resize(n);
        double m2 = 0;
        for (int j = 0; j < n; ++j) {
            w[j] = u[j] * u[j] * ux[j];
            m2 += u[j] * u[j];
        }
        m2 /= n;
        fft.forward(w, wh);
        for (size_t m = 0; m < wh.size(); ++m) {
            wh[m] *= 6.0;
            if (renorm) wh[m] -= 6.0 * m2 * hx[m];
        }
        dealias(wh);
        return wh;
    }

    void step(GridState& gs) {
        if (initial_l2 < 0) initial_l2 = gs.l2_norm_sq();
        fft.forward(gs.u, hat);
        dealias(hat);
        std::vector<cx> v = hat;
        auto a = nonlinear(v);
        std::vector<cx> va(v.size()), vb(v.size()), vc(v.size());
        for (size_t m = 0; m < v.size(); ++m) va[m] = E[m] * (v[m] + 0.5 * dt * a[m]);
        auto b = nonlinear(va);
        for (size_t m = 0; m < v.size(); ++m) vb[m] = E[m] * v[m] + 0.5 * dt * b[m];
        auto c = nonlinear(vb);
        for (size_t m = 0; m < v.size(); ++m) vc[m] = E2[m] * v[m] + dt * E[m] * c[m];
        auto d = nonlinear(vc);
        for (size_t m = 0; m < v.size(); ++m)
            v[m] = E2[m] * v[m] +
                   (dt / 6.0) * (E2[m] * a[m] + 2.0 * E[m] * (b[m] + c[m]) + d[m]);
        dealias(v);
        fft.backward(v, gs.u);
        gs.t += dt;
        if (gs.l2_norm_sq() > 100.0 * std::max(initial_l2, 1e-300))
            throw InstabilityError("time stepping blew up at t = " + std::to_string(gs.t));
    }
};

MkdvIntegrator::MkdvIntegrator(int grid_size, double dt, bool renormalized) {
    if (!is_pow2(grid_size)) throw DomainError("grid size must be a power of two");
    if (!(dt > 0)) throw DomainError("dt must be positive");
    impl_ = std::make_unique<Impl>(grid_size, dt, renormalized);
}

MkdvIntegrator::~MkdvIntegrator() = default;

void MkdvIntegrator::step(GridState& gs) {
    if (gs.size() != impl_->n) throw DomainError("grid size mismatch");
    impl_->step(gs);
}

void MkdvIntegrator::advance(GridState& gs, double T) {
    if (T < 0) throw DomainError("advance: negative duration");
    long steps = long(std::floor(T / impl_->dt + 1e-12));
    double dt0 = impl_->dt;
    for (long s = 0; s < steps; ++s) step(gs);
    double rem = T - steps * dt0;
    if (rem > 1e-14) {
        impl_->set_dt(rem);
        step(gs);
        impl_->set_dt(dt0);
    }
}

double MkdvIntegrator::dt() const { return impl_->dt; }
bool MkdvIntegrator::renormalized() const { return impl_->renorm; }

GridState step_mkdv(const GridState& gs, double dt, bool renormalized) {
    MkdvIntegrator integ(gs.size(), dt, renormalized);
    GridState out = gs;
    integ.step(out);
    return out;
}

namespace {

/// u(x + a) via exact Fourier-side phase shift.
GridState shift_grid(const GridState& gs, double a) {
    Rfft fft(gs.size());
    std::vector<cx> hat;
    fft.forward(gs.u, hat);
    for (size_t m = 0; m < hat.size(); ++m)
        hat[m] *= std::exp(cx(0, 2.0 * PI * double(m) * a));
    GridState out;
    out.t = gs.t;
    fft.backward(hat, out.u);
    return out;
}

double grid_l2_diff(const GridState& a, const GridState& b) {
    double s = 0;
    for (int j = 0; j < a.size(); ++j) s += sqr(a.u[j] - b.u[j]);
    return std::sqrt(s / a.size());
}

} // namespace

ShiftCheck shift_equivalence_check(const GridState& u0, double t, double dt) {
    ShiftCheck out;
    double m2 = u0.l2_norm_sq();
    out.shift = 6.0 * m2 * t;

    GridState plain = u0, renorm = u0;
    plain.t = renorm.t = 0;
    {
        MkdvIntegrator integ(u0.size(), dt, false);
        integ.advance(plain, t);
    }
    {
        MkdvIntegrator integ(u0.size(), dt, true);
        integ.advance(renorm, t);
    }
    out.residual = grid_l2_diff(renorm, shift_grid(plain, -out.shift));
    out.residual_flipped = grid_l2_diff(renorm, shift_grid(plain, +out.shift));
    return out;
}

IsospectralityReport isospectrality_check(const GridState& u0,
                                          const std::vector<double>& times,
                                          double dt, int window_N, double tol) {
    IsospectralityReport rep;
    rep.times = times;

    auto extract = [&](const GridState& gs) {
        Potential phi = potential_from_grid(gs);
        TransferEngine eng(phi);
        LocateOptions lopt;
        lopt.tol = tol;
        SpectralData sd = locate_spectrum(eng, window_N, lopt);
        RootContext ctx = make_root_context(sd);
        AbelianIntegral ai(ctx, eng);
        std::vector<cx> eigs, acts;
        for (int n = -window_N; n <= window_N; ++n) {
            eigs.push_back(sd.lam_minus[sd.idx(n)]);
            eigs.push_back(sd.lam_plus[sd.idx(n)]);
            acts.push_back(action(ai, n).value);
        }
        return std::make_pair(eigs, acts);
    };

    auto [eig0, act0] = extract(u0);
    GridState gs = u0;
    gs.t = 0;
    MkdvIntegrator integ(u0.size(), dt, false);
    double prev = 0;
    for (double tt : times) {
        if (tt < prev) throw DomainError("isospectrality_check: times must be ascending");
        integ.advance(gs, tt - prev);
        prev = tt;
        auto [eigs, acts] = extract(gs);
        for (size_t i = 0; i < eigs.size(); ++i)
            rep.max_eig_drift = std::max(rep.max_eig_drift, std::abs(eigs[i] - eig0[i]));
        for (size_t i = 0; i < acts.size(); ++i)
            rep.max_action_drift = std::max(rep.max_action_drift, std::abs(acts[i] - act0[i]));
    }
    return rep;
}

BirkhoffState birkhoff_state_from(const FrequencySpectrum& fs) {
    BirkhoffState bs;
    bs.N = fs.N;
    bs.I.resize(2 * fs.N + 1);
    bs.theta.assign(2 * fs.N + 1, 0.0);
    for (int n = -fs.N; n <= fs.N; ++n)
        bs.I[bs.idx(n)] = std::max(0.0, fs.I[fs.idx(n)].real());
    bs.omega_source = fs;
    return bs;
}

BirkhoffState birkhoff_flow(const BirkhoffState& bs, double t, bool sharp) {
    if (!sharp && !bs.omega_source.has_omega)
        throw DivergenceError("birkhoff_flow: unrenormalized frequencies undefined here "
                              "(H1 renormalization removed a divergent phase)");
    BirkhoffState out = bs;
    for (int n = -bs.N; n <= bs.N; ++n) {
        double om = sharp ? bs.omega_source.omega_sharp[bs.omega_source.idx(n)].real()
                          : bs.omega_source.omega[bs.omega_source.idx(n)].real();
        double th = bs.theta[bs.idx(n)] + om * t;
        th = std::fmod(th, 2.0 * PI);
        if (th < 0) th += 2.0 * PI;
        out.theta[out.idx(n)] = th;
    }
    return out;
}

IllposednessTable illposedness_demo(double p, double alpha, int kmax,
                                    std::vector<int> probe_ns, double tol) {
    if (!(1.0 / p < alpha && alpha < 0.5))
        throw DomainError("illposedness_demo: requires 1/p < alpha < 1/2");
    if (kmax < 8) throw DomainError("illposedness_demo: requires kmax >= 8");

    IllposednessTable table;
    table.p = p;
    table.alpha = alpha;
    table.kmax = kmax;
    table.probe_ns = probe_ns;

    std::vector<int> ks;
    for (int k = 8; k < kmax; k *= 2) ks.push_back(k);
    ks.push_back(kmax);

    for (int k : ks) {
        Potential::CoeffMap m;
        for (int n = 1; n <= k; ++n) {
            double c = std::pow(double(n), -alpha);
            m[n] = c;
            m[-n] = c;
        }
        Potential vk = Potential::real_u(m);

        IllposednessRow row;
        row.k = k;
        row.lp_norm = fl_norm(vk, p);
        row.h1 = hamiltonians(vk).h1.real();

        // full spectral pipeline with an adaptive margin past the truncation
        int margin = std::max(8, k / 8);
        TransferOptions topt;
        topt.tol = std::min(1e-9, tol * 1e-1);
        TransferEngine eng(vk, topt);
        LocateOptions lopt;
        lopt.tol = tol * 1e-1;
        lopt.winding_stride = (k + margin <= 64) ? 1 : 16;
        SpectralData sd;
        for (int attempt = 0;; ++attempt) {
            sd = locate_spectrum(eng, k + margin, lopt);
            bool edge_open = false;
            for (int n : sd.open_gaps())
                if (std::abs(n) > k + margin - 4 &&
                    std::abs(sd.gamma[sd.idx(n)]) > 1e-4)
                    edge_open = true;
            if (!edge_open || attempt >= 2) break;
            margin *= 2;
        }
        RootContext ctx = make_root_context(sd);
        AbelianIntegral ai(ctx, eng);
        for (int k2 : ctx.open) ai.contour(k2);
        for (int n : probe_ns) {
            PsiSystem psi = solve_psi(ai, n, sd.N, tol);
            cx star = 0;
            for (int j : ctx.open) star += double(j) * moment(ai, psi, j, 2);
            row.omega_star.push_back(-12.0 * star);
        }
        table.rows.push_back(row);
    }

    // exact H1 values continued beyond the computed rows (cheap sums)
    for (int k = 8; k <= 4 * kmax; k *= 2) {
        double h1 = 0;
        for (int n = 1; n <= k; ++n) h1 += 2.0 * std::pow(double(n), -2.0 * alpha);
        table.h1_extension.push_back(h1);
    }
    return table;
}

} // namespace zsb
