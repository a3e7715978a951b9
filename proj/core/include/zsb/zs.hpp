#ifndef ZSB_ZS_HPP
#define ZSB_ZS_HPP

#include <memory>
#include <utility>
#include <vector>

#include "zsb/potential.hpp"

namespace zsb {

/// Fundamental solution M(1, lambda) together with its lambda-derivative.
struct TransferResult {
    cx m11, m12, m21, m22;
    cx dm11, dm12, dm21, dm22;

    cx delta() const { return m11 + m22; }
    cx ddelta() const { return dm11 + dm22; }
    cx det() const { return m11 * m22 - m12 * m21; }
};

struct TransferOptions {
    double tol = 1e-11;        ///< target accuracy of Delta per evaluation
    int max_level = 17;        ///< refinement cap, 2^max_level cells
    double lambda_ceiling = 6000.0; ///< documented |lambda| ceiling
};

/**
 * Evaluator of the fundamental solution of the first-order system
 *   m1' = -i lambda m1 + i phi- m2,   m2' = i lambda m2 - i phi+ m1
 * over x in [0,1], normalized so that the zero potential gives
 * M(1,lambda) = diag(e^{-i lambda}, e^{i lambda}) and Delta = 2 cos lambda.
 *
 * Each cell of a dyadic grid is crossed with the exponential of a
 * fourth-order Magnus argument built from two Gauss-point samples of the
 * coefficient matrix; the cost per evaluation is independent of |lambda|,
 * and the grid is refined (cells doubled) until Delta and its derivative
 * stabilize to the requested tolerance. Exact for zero and constant
 * potentials at any grid level.
 */
class TransferEngine {
public:
    explicit TransferEngine(const Potential& phi, TransferOptions opt = {});
    ~TransferEngine();
    TransferEngine(const TransferEngine&) = delete;
    TransferEngine& operator=(const TransferEngine&) = delete;

    TransferResult eval(cx lambda) const;
    /// (Delta, dDelta/dlambda) at lambda.
    std::pair<cx, cx> discriminant(cx lambda) const;

    const Potential& potential() const { return phi_; }
    const TransferOptions& options() const { return opt_; }

private:
    struct Impl;
    Potential phi_;
    TransferOptions opt_;
    std::unique_ptr<Impl> impl_;
};

/// One-shot helpers (construct an engine internally; prefer the class in loops).
TransferResult transfer(const Potential& phi, cx lambda, TransferOptions opt = {});
std::pair<cx, cx> discriminant(const Potential& phi, cx lambda, TransferOptions opt = {});

/// Deterministically ordered parallel batch evaluation.
std::vector<std::pair<cx, cx>> discriminant_batch(const TransferEngine& engine,
                                                  const std::vector<cx>& lambdas);

/**
 * Independent spectral oracle: assembles the operator in the exponential
 * Fourier basis e^{i pi l x} on the period-2 interval with periodic boundary
 * conditions and returns all eigenvalues with |Re| <= basis_half_width*pi/2,
 * sorted lexicographically (real part, then imaginary part). Not used by any
 * production path.
 */
std::vector<cx> galerkin_eigenvalues(const Potential& phi, int basis_half_width);

} // namespace zsb

#endif
