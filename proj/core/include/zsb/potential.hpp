#ifndef ZSB_POTENTIAL_HPP
#define ZSB_POTENTIAL_HPP

#include <map>
#include <string>
#include <vector>

#include "zsb/mathutil.hpp"

namespace zsb {

/**
 * Two-component potential phi = (phi-, phi+) stored as finite Fourier
 * coefficient maps in the e^{2 pi i n x} basis on the unit circle. The
 * continuum object is always the trigonometric polynomial these define.
 */
class Potential {
public:
    using CoeffMap = std::map<int, cx>;

    Potential() = default;
    Potential(CoeffMap minus, CoeffMap plus);

    /// phi = (u, u) from the coefficients of a single real-valued u.
    static Potential real_u(const CoeffMap& u_coeffs);
    /// phi = (a, a), constant.
    static Potential constant(double a);
    /// u = amp * cos(2 pi k x) as a (u, u) pair.
    static Potential cosine(double amp, int k);
    static Potential zero() { return Potential(); }

    const CoeffMap& minus() const { return minus_; }
    const CoeffMap& plus() const { return plus_; }

    cx coeff_minus(int n) const;
    cx coeff_plus(int n) const;

    /// Truncation half-width: largest |n| carrying a nonzero coefficient.
    int nmodes() const;

    /// phi+ coefficients are the conjugates of phi- coefficients.
    bool is_real_type(double tol = 1e-12) const;
    /// Real type and phi+ = phi- (a pair (u,u) with u real-valued).
    bool is_er(double tol = 1e-12) const;

    cx eval_minus(double x) const;
    cx eval_plus(double x) const;

    /// Dense coefficient slices c[-K..K] (index n+K).
    std::vector<cx> dense_minus(int K) const;
    std::vector<cx> dense_plus(int K) const;

    bool empty() const { return minus_.empty() && plus_.empty(); }

private:
    CoeffMap minus_, plus_;
};

/// Values of the first four hierarchy Hamiltonians.
struct HamiltonianValues {
    cx h1, h2, h3, h4;
};

/**
 * ell^p norm of the coefficient sequence (max over the two components;
 * they coincide for real-type potentials). Rejects p < 1.
 */
double fl_norm(const Potential& phi, double p);

/**
 * H1 = int phi- phi+,
 * H2 = (i/2) int (phi+ d phi- - phi- d phi+),
 * H3 = int (d phi- d phi+ + phi-^2 phi+^2),
 * H4 = i int (phi- d^3 phi+ - 3 phi-^2 phi+ d phi+),
 * all over one period, evaluated on a uniform grid fine enough to be exact
 * for the truncated data (integrands are trig polynomials).
 */
HamiltonianValues hamiltonians(const Potential& phi);

/// Serialization per the documented JSON schema. Writer emits sorted modes.
std::string potential_to_json(const Potential& phi);
Potential potential_from_json(const std::string& text);
Potential load_potential(const std::string& path);
void save_potential(const Potential& phi, const std::string& path);

} // namespace zsb

#endif
