#include "zsb/zs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Dense>

#include "zsb/errors.hpp"
#include "zsb/parallel.hpp"

namespace zsb {

namespace {

const double GAUSS_OFF = 0.28867513459481288225; // sqrt(3)/6, Gauss-2 offset
const double SQRT3 = 1.7320508075688772935;

struct Mat2 {
    cx a, b, c, d; // row major

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 zero() { return {0, 0, 0, 0}; }
};

} // namespace

struct TransferEngine::Impl {
    /// phi sampled at the two Gauss points of every cell of a dyadic level.
    struct Level {
        int cells = 0;
        std::vector<cx> am1, am2, ap1, ap2; // phi- and phi+ at the two points
    };

    int base_level = 6;
    mutable std::map<int, Level> levels;
    mutable std::mutex mtx;
    const Potential* phi = nullptr;

    const Level& level(int L) const {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = levels.find(L);
        if (it != levels.end()) return it->second;
        Level lv;
        lv.cells = 1 << L;
        lv.am1.resize(lv.cells);
        lv.am2.resize(lv.cells);
        lv.ap1.resize(lv.cells);
        lv.ap2.resize(lv.cells);
        const double h = 1.0 / lv.cells;
        for (int j = 0; j < lv.cells; ++j) {
            double x1 = (j + 0.5 - GAUSS_OFF) * h;
            double x2 = (j + 0.5 + GAUSS_OFF) * h;
            lv.am1[j] = phi->eval_minus(x1);
            lv.am2[j] = phi->eval_minus(x2);
            lv.ap1[j] = phi->eval_plus(x1);
            lv.ap2[j] = phi->eval_plus(x2);
        }
        return levels.emplace(L, std::move(lv)).first->second;
    }

    /// Crosses [0,1] at one grid level, accumulating M and dM/dlambda.
    TransferResult sweep(cx lambda, const Level& lv) const {
        const double h = 1.0 / lv.cells;
        const double com = SQRT3 * h * h / 12.0; // commutator weight
        const cx ilh = cx(0, 1) * lambda * h;
        Mat2 M = Mat2::identity();
        Mat2 V = Mat2::zero();
        for (int j = 0; j < lv.cells; ++j) {
            const cx a1 = lv.am1[j], a2 = lv.am2[j];
            const cx b1 = lv.ap1[j], b2 = lv.ap2[j];
            const cx W = a1 * b2 - a2 * b1;
            // Magnus argument from the two Gauss samples
            Mat2 Om{-ilh - com * W,
                    cx(0, 0.5) * h * (a1 + a2) - 2.0 * com * lambda * (a2 - a1),
                    cx(0, -0.5) * h * (b1 + b2) - 2.0 * com * lambda * (b2 - b1),
                    ilh + com * W};
            Mat2 dOm{cx(0, -h), -2.0 * com * (a2 - a1), -2.0 * com * (b2 - b1), cx(0, h)};
            const cx z = Om.a * Om.d - Om.b * Om.c;
            const cx dz = dOm.a * Om.d + Om.a * dOm.d - dOm.b * Om.c - Om.b * dOm.c;
            const cx c = cos_sqrt(z), s = sinc_sqrt(z);
            const cx cp = dcos_sqrt(z) * dz, sp = dsinc_sqrt(z) * dz;
            // E = c I + s Om;  dE = (c' I + s' Om) dz + s dOm
            Mat2 E{c + s * Om.a, s * Om.b, s * Om.c, c + s * Om.d};
            Mat2 dE{cp + sp * Om.a + s * dOm.a, sp * Om.b + s * dOm.b,
                    sp * Om.c + s * dOm.c, cp + sp * Om.d + s * dOm.d};
            V = E * V + dE * M;
            M = E * M;
        }
        return {M.a, M.b, M.c, M.d, V.a, V.b, V.c, V.d};
    }
};

TransferEngine::TransferEngine(const Potential& phi, TransferOptions opt)
    : phi_(phi), opt_(opt), impl_(new Impl) {
    impl_->phi = &phi_;
    int K = std::max(4, phi_.nmodes());
    int L = 6;
    while ((1 << L) < 8 * K && L < opt_.max_level - 1) ++L;
    impl_->base_level = L;
}

TransferEngine::~TransferEngine() = default;

TransferResult TransferEngine::eval(cx lambda) const {
    if (std::abs(lambda) > opt_.lambda_ceiling)
        throw IntegrationError("transfer: |lambda| above supported ceiling", lambda);
    int L = impl_->base_level;
    // keep the per-cell rotation angle bounded
    double need = 0.75 * std::abs(lambda);
    while ((1 << L) < need && L < opt_.max_level) ++L;
    TransferResult prev = impl_->sweep(lambda, impl_->level(L));
    for (++L; L <= opt_.max_level; ++L) {
        TransferResult fine = impl_->sweep(lambda, impl_->level(L));
        double e1 = std::abs(fine.delta() - prev.delta());
        double e2 = std::abs(fine.ddelta() - prev.ddelta());
        double s1 = 1.0 + std::abs(fine.delta());
        double s2 = 1.0 + std::abs(fine.ddelta());
        if (e1 <= opt_.tol * s1 && e2 <= opt_.tol * s2) return fine;
        prev = fine;
    }
    throw IntegrationError("transfer: grid refinement exhausted before tolerance",
                           lambda);
}

std::pair<cx, cx> TransferEngine::discriminant(cx lambda) const {
    TransferResult r = eval(lambda);
    return {r.delta(), r.ddelta()};
}

TransferResult transfer(const Potential& phi, cx lambda, TransferOptions opt) {
    return TransferEngine(phi, opt).eval(lambda);
}

std::pair<cx, cx> discriminant(const Potential& phi, cx lambda, TransferOptions opt) {
    return TransferEngine(phi, opt).discriminant(lambda);
}

std::vector<std::pair<cx, cx>> discriminant_batch(const TransferEngine& engine,
                                                  const std::vector<cx>& lambdas) {
    std::vector<std::pair<cx, cx>> out(lambdas.size());
    parallel_for(int(lambdas.size()),
                 [&](int i) { out[i] = engine.discriminant(lambdas[i]); });
    return out;
}

std::vector<cx> galerkin_eigenvalues(const Potential& phi, int basis_half_width) {
    const int L = basis_half_width;
    if (L < 4 * phi.nmodes())
        throw DomainError("galerkin_eigenvalues: basis_half_width must be >= 4*nmodes");
    const int B = 2 * L + 1;     // frequencies l = -L..L of e^{i pi l x}
    const int dim = 2 * B;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
    for (int l = -L; l <= L; ++l) {
        A(l + L, l + L) = -PI * l;
        A(B + l + L, B + l + L) = PI * l;
    }
    // potential frequency 2k couples component rows l to columns l-2k
    for (const auto& [k, c] : phi.minus()) {
        for (int l = -L; l <= L; ++l) {
            int lp = l - 2 * k;
            if (lp < -L || lp > L) continue;
            A(l + L, B + lp + L) += c;
        }
    }
    for (const auto& [k, c] : phi.plus()) {
        for (int l = -L; l <= L; ++l) {
            int lp = l - 2 * k;
            if (lp < -L || lp > L) continue;
            A(B + l + L, lp + L) += c;
        }
    }

    std::vector<cx> eig;
    eig.reserve(dim);
    if (phi.is_real_type()) {
        // self-adjoint operator: Hermitian matrix, real spectrum
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
        if (es.info() != Eigen::Success)
            throw Error("galerkin_eigenvalues: Hermitian eigensolver failed");
        for (int i = 0; i < dim; ++i) eig.push_back(cx(es.eigenvalues()[i], 0));
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
        if (es.info() != Eigen::Success)
            throw Error("galerkin_eigenvalues: eigensolver failed");
        for (int i = 0; i < dim; ++i) eig.push_back(es.eigenvalues()[i]);
    }
    const double window = basis_half_width * PI / 2.0;
    std::vector<cx> out;
    for (cx v : eig)
        if (std::abs(v.real()) <= window) out.push_back(v);
    std::sort(out.begin(), out.end(), [](cx x, cx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

} // namespace zsb
