#include "zsb/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "zsb/errors.hpp"
#include "zsb/quadrature.hpp"

namespace zsb {

AbelianIntegral::AbelianIntegral(const RootContext& ctx, const TransferEngine& engine,
                                 QuadOptions opt)
    : ctx_(ctx), engine_(engine), opt_(opt) {}

namespace {

bool is_near(cx a, cx b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

} // namespace

// One-sided boundary values on G_n: with lambda_t = tau + t gamma/2 the
// quotient integrates to s * int_{-1}^{t} (lambda^* - lambda_r) chi_n / sqrt(1-r^2) dr,
// and r = -cos(theta) turns the weight into a plain smooth integral.
cx AbelianIntegral::gap_side_value(int n, cx lambda, Side side) const {
    const int i = ctx_.idx(n);
    const cx tau = ctx_.sd.tau[i], gamma = ctx_.sd.gamma[i], ld = ctx_.sd.lam_dot[i];
    cx tc = 2.0 * (lambda - tau) / gamma;
    double t = std::clamp(tc.real(), -1.0, 1.0);
    double theta_t = std::acos(-t);
    double s = (side == Side::plus) ? 1.0 : -1.0;
    auto g = [&](double th) {
        cx lam = tau + (-std::cos(th)) * gamma / 2.0;
        return (ld - lam) * chi_factor(ctx_, n, lam);
    };
    return s * gl_adaptive(g, 0.0, theta_t, opt_.tol);
}

cx AbelianIntegral::path_integral(int n, cx lambda, std::optional<Side> side) const {
    const int i = ctx_.idx(n);
    const bool open = ctx_.sd.is_open(n);
    const cx lam_m = ctx_.sd.lam_minus[i], lam_p = ctx_.sd.lam_plus[i];
    auto q = [&](cx z) { return quotient_w(ctx_, z); };

    // launch from whichever gap endpoint gives the shorter admissible route
    bool from_right = lambda.real() > lam_p.real();
    cx base = from_right ? lam_p : lam_m;
    if (is_near(lambda, base)) return 0;

    // shortcut: real target in the adjacent gap-free interval
    bool lambda_real = std::abs(lambda.imag()) < 1e-14 * (1.0 + std::abs(lambda.real()));
    if (lambda_real && ctx_.sd.real_type && !side) {
        double neighbor_block = from_right
            ? (ctx_.sd.in_window(n + 1) ? ctx_.sd.lam_minus[ctx_.idx(n + 1)].real()
                                        : lambda.real() + 1.0)
            : (ctx_.sd.in_window(n - 1) ? ctx_.sd.lam_plus[ctx_.idx(n - 1)].real()
                                        : lambda.real() - 1.0);
        bool clear = from_right ? lambda.real() < neighbor_block - 1e-9
                                : lambda.real() > neighbor_block + 1e-9;
        if (clear) {
            double d = std::abs(lambda.real() - base.real());
            double dir = from_right ? 1.0 : -1.0;
            auto leg = [&](double xi) { return 2.0 * dir * xi * q(base + dir * xi * xi); };
            return gl_adaptive(leg, 0.0, std::sqrt(d), opt_.tol);
        }
    }

    // corridor polyline: vertical takeoff, horizontal run, vertical approach
    double sdir = side ? (*side == Side::plus ? 1.0 : -1.0)
                       : (lambda.imag() > 0 ? 1.0 : (lambda.imag() < 0 ? -1.0 : 1.0));
    double max_gap_im = 0;
    for (int m : ctx_.open) {
        int j = ctx_.idx(m);
        max_gap_im = std::max({max_gap_im, std::abs(ctx_.sd.lam_minus[j].imag()),
                               std::abs(ctx_.sd.lam_plus[j].imag())});
    }
    double H = std::max(opt_.corridor_height, 2.0 * max_gap_im);
    if (std::abs(lambda.imag()) > H) H = std::abs(lambda.imag());
    if (max_gap_im > 0.45 * H && std::abs(lambda.imag()) < 2.0 * max_gap_im && !side)
        throw GeometryError("admissible corridor blocked by non-real gaps");

    cx total = 0;
    // takeoff absorbs the endpoint square root (harmless when the gap is closed)
    {
        auto leg = [&](double xi) {
            return 2.0 * cx(0, sdir) * xi * q(base + cx(0, sdir) * xi * xi);
        };
        total += gl_adaptive(leg, 0.0, std::sqrt(H), opt_.tol);
        (void)open;
    }
    cx c1 = base + cx(0, sdir * H);
    cx c2 = cx(lambda.real(), sdir * H);
    if (!is_near(c1, c2)) {
        auto leg = [&](double t) { return (c2 - c1) * q(c1 + t * (c2 - c1)); };
        total += gl_adaptive(leg, 0.0, 1.0, opt_.tol);
    }
    if (!is_near(c2, lambda)) {
        // a target sitting exactly on a band edge is approached with the
        // square-root substitution to keep the quadrature spectral
        bool target_edge = false;
        for (int m : ctx_.open) {
            int j = ctx_.idx(m);
            if (is_near(lambda, ctx_.sd.lam_minus[j]) || is_near(lambda, ctx_.sd.lam_plus[j]))
                target_edge = true;
        }
        if (target_edge) {
            double Hf = std::abs(c2 - lambda);
            auto leg = [&](double xi) {
                return -2.0 * cx(0, sdir) * xi * q(lambda + cx(0, sdir) * xi * xi);
            };
            total += gl_adaptive(leg, 0.0, std::sqrt(Hf), opt_.tol);
        } else {
            auto leg = [&](double t) { return (lambda - c2) * q(c2 + t * (lambda - c2)); };
            total += gl_adaptive(leg, 0.0, 1.0, opt_.tol);
        }
    }
    return total;
}

cx AbelianIntegral::F(int n, cx lambda, std::optional<Side> side) const {
    if (!ctx_.sd.in_window(n))
        throw DomainError("F_n: index outside the spectral window");
    const int i = ctx_.idx(n);
    if (ctx_.sd.is_open(n)) {
        cx t = 2.0 * (lambda - ctx_.sd.tau[i]) / ctx_.sd.gamma[i];
        bool on_gap = std::abs(t.imag()) < 1e-12 * (1.0 + std::abs(t.real())) &&
                      std::abs(t.real()) <= 1.0 + 1e-12;
        if (on_gap) {
            if (!side)
                throw DomainError("F_n: lambda on open gap G_" + std::to_string(n) +
                                  " requires a side tag");
            return gap_side_value(n, lambda, *side);
        }
    }
    return path_integral(n, lambda, side);
}

cx AbelianIntegral::F_realline(double x) const {
    if (!ctx_.sd.real_type)
        throw DomainError("F_realline: requires a real-type potential");
    int n = int(std::floor(x / PI));
    if (ctx_.sd.in_window(n) && x <= ctx_.sd.lam_plus[ctx_.idx(n)].real() + 1e-14)
        throw DomainError("F_realline: lambda inside or left of gap " + std::to_string(n));
    if (ctx_.sd.in_window(n + 1) && x >= ctx_.sd.lam_minus[ctx_.idx(n + 1)].real() - 1e-14)
        throw DomainError("F_realline: lambda inside or right of gap " + std::to_string(n + 1));
    double delta = engine_.discriminant(cx(x, 0)).first.real();
    double sign = (((n + 1) % 2 + 2) % 2 == 0) ? 1.0 : -1.0;
    double arg = sign * delta / 2.0;
    if (std::abs(arg) > 1.0 + 1e-9)
        throw DomainError("F_realline: |Delta|/2 exceeds 1 between gaps");
    arg = std::clamp(arg, -1.0, 1.0);
    return cx(0, -1) * ((n + 0.5) * PI + std::asin(arg));
}

double AbelianIntegral::contour_radius(int k) const {
    const int i = ctx_.idx(k);
    double need = 1.05 * std::max(std::abs(ctx_.sd.gamma[i]) / 2.0,
                                  std::abs(ctx_.sd.lam_dot[i] - ctx_.sd.tau[i]));
    double r = std::max(0.75 * std::abs(ctx_.sd.gamma[i]), 0.05);
    // the circuit is centered at tau_k, so clip against the disc boundary
    double cap = 0.8 * (ctx_.sd.disc_radius[i] -
                        std::abs(ctx_.sd.tau[i] - ctx_.sd.disc_center[i]));
    r = std::min(std::max(r, need), cap);
    if (r < need)
        throw GeometryError("contour around gap " + std::to_string(k) +
                            " cannot fit inside its isolating disc");
    return r;
}

AbelianIntegral::Contour AbelianIntegral::build_contour(int k, int nodes) const {
    Contour c;
    const int i = ctx_.idx(k);
    c.center = ctx_.sd.tau[i];
    c.radius = contour_radius(k);
    c.nodes = circle_nodes(c.center, c.radius, nodes);
    c.f_k.resize(nodes);
    c.q.resize(nodes);
    for (int j = 0; j < nodes; ++j) c.q[j] = quotient_w(ctx_, c.nodes[j]);

    // anchor at the leftmost point of the circle, then accumulate arcs
    cx anchor = path_integral(k, c.nodes[0], std::nullopt);
    auto qdl = [&](double th) {
        cx z = c.center + c.radius * cx(std::cos(th), std::sin(th));
        cx dz = c.radius * cx(0, 1) * cx(std::cos(th), std::sin(th));
        return quotient_w(ctx_, z) * dz;
    };
    cx run = anchor;
    const double dth = 2.0 * PI / nodes;
    for (int j = 0; j < nodes; ++j) {
        c.f_k[j] = run;
        double th0 = PI + j * dth;
        run += gl_fixed(qdl, th0, th0 + dth, 16);
    }
    c.closure = std::abs(run - anchor);
    if (c.closure > 1e3 * opt_.tol * (1.0 + std::abs(anchor)))
        throw AccuracyError("contour primitive failed to close around gap " +
                            std::to_string(k));
    return c;
}

const AbelianIntegral::Contour& AbelianIntegral::contour(int k, int min_nodes) const {
    if (!ctx_.sd.in_window(k))
        throw DomainError("contour: index outside the spectral window");
    int want = std::max(min_nodes, opt_.contour_nodes);
    {
        std::lock_guard<std::mutex> lock(mtx_);
        auto it = cache_.lower_bound({k, want});
        if (it != cache_.end() && it->first.first == k) return it->second;
    }
    Contour built = build_contour(k, want); // outside the lock: builds may run concurrently
    std::lock_guard<std::mutex> lock(mtx_);
    auto [it, inserted] = cache_.emplace(std::make_pair(k, want), std::move(built));
    return it->second;
}

AbelianIntegral::LaurentFit AbelianIntegral::laurent_fit(int jmin, int jmax) const {
    if (!ctx_.sd.real_type)
        throw DomainError("laurent_fit: requires a real-type potential");
    if (!(jmax > jmin && jmin >= ctx_.sd.N))
        throw DomainError("laurent_fit: requires jmax > jmin >= window edge");
    const int P = jmax - jmin + 1;

    std::vector<double> xs(P), ts(P);
    for (int j = 0; j < P; ++j) {
        double nu = (jmin + j + 0.5) * PI;
        cx y = F_realline(nu) + cx(0, nu);
        xs[j] = 1.0 / (2.0 * nu);
        ts[j] = y.imag();
    }

    // basis x..x^4 carries H1..H4; optional guard columns absorb the smooth
    // remainder (constant measurement bias and the next Laurent orders)
    std::vector<int> powers = {1, 2, 3, 4};
    if (opt_.laurent_guard_columns) {
        powers.insert(powers.begin(), 0);
        powers.push_back(5);
        powers.push_back(6);
    }
    const int C = int(powers.size());
    Eigen::MatrixXd A(P, C);
    Eigen::VectorXd b(P);
    for (int r = 0; r < P; ++r) {
        for (int c = 0; c < C; ++c) A(r, c) = std::pow(xs[r], powers[c]);
        b(r) = ts[r];
    }
    Eigen::VectorXd colscale(C);
    for (int c = 0; c < C; ++c) {
        colscale(c) = A.col(c).norm();
        if (colscale(c) == 0) colscale(c) = 1;
        A.col(c) /= colscale(c);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    double cond = std::abs(qr.matrixR()(0, 0)) /
                  std::max(1e-300, std::abs(qr.matrixR()(C - 1, C - 1)));
    if (cond > 1e12)
        throw ConditioningError("laurent_fit: ill-conditioned basis; lower jmax or widen range "
                                "(cond ~ " + std::to_string(cond) + ")");
    Eigen::VectorXd sol = qr.solve(b);
    for (int c = 0; c < C; ++c) sol(c) /= colscale(c);

    LaurentFit out;
    auto coeff = [&](int p) -> double {
        for (int c = 0; c < C; ++c)
            if (powers[c] == p) return sol(c);
        return 0;
    };
    out.h = {coeff(1), coeff(2), coeff(3), coeff(4)};
    double rss = 0;
    for (int r = 0; r < P; ++r) {
        double pred = 0;
        for (int c = 0; c < C; ++c)
            pred += sol(c) * colscale(c) * A(r, c) * 1.0; // A already scaled
        rss += sqr(pred - b(r));
    }
    out.residual = std::sqrt(rss / P);
    out.cond = cond;

    // independent consistency value: -4 * (1/2pi i) oint F^4 = H4 - 6 H1 H2
    {
        const double R = (ctx_.M - 1.75) * PI;
        const int segs = 512;
        cx z0 = cx(R, 0);
        cx f0 = F_realline(R);
        auto qdl = [&](double th) {
            cx z = R * cx(std::cos(th), std::sin(th));
            cx dz = R * cx(0, 1) * cx(std::cos(th), std::sin(th));
            return quotient_w(ctx_, z) * dz;
        };
        cx run = f0, integral = 0;
        const double dth = 2.0 * PI / segs;
        for (int j = 0; j < segs; ++j) {
            double th0 = j * dth;
            // midpoint rule in F^4 dlambda, spectrally accurate on the circle
            double thm = th0 + 0.5 * dth;
            cx zm = R * cx(std::cos(thm), std::sin(thm));
            cx fm = run + gl_fixed(qdl, th0, thm, 12);
            cx dz = R * cx(0, 1) * cx(std::cos(thm), std::sin(thm)) * dth;
            integral += fm * fm * fm * fm * dz;
            run += gl_fixed(qdl, th0, th0 + dth, 12);
        }
        (void)z0;
        cx c_minus1 = integral / cx(0, 2.0 * PI);
        out.combo_contour = -4.0 * c_minus1;
    }
    return out;
}

} // namespace zsb
