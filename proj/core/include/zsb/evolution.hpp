#ifndef ZSB_EVOLUTION_HPP
#define ZSB_EVOLUTION_HPP

#include <memory>
#include <vector>

#include "zsb/frequencies.hpp"
#include "zsb/potential.hpp"

namespace zsb {

/// Real-valued state on a uniform periodic grid of power-of-two size.
struct GridState {
    std::vector<double> u;
    double t = 0;

    int size() const { return int(u.size()); }
    double l2_norm_sq() const; ///< int_0^1 u^2 dx (exact for band-limited u)
    double mean() const;
};

/// Samples an E_r potential (u, u) on a grid.
GridState grid_from_potential(const Potential& phi, int grid_size);

/// Truncated coefficient map of a grid function as the pair (u, u).
Potential potential_from_grid(const GridState& gs, double drop_tol = 1e-13);

/**
 * Fourth-order integrating-factor (RK4) pseudospectral stepper for
 *   u_t = -u_xxx + 6 u^2 u_x               (mKdV)
 *   u_t = -u_xxx + 6 (u^2 - int u^2) u_x   (renormalized flavor)
 * with 2/3-rule dealiasing; the dispersive factor is handled exactly.
 */
class MkdvIntegrator {
public:
    MkdvIntegrator(int grid_size, double dt, bool renormalized);
    ~MkdvIntegrator();
    MkdvIntegrator(const MkdvIntegrator&) = delete;
    MkdvIntegrator& operator=(const MkdvIntegrator&) = delete;

    void step(GridState& gs);
    /// Integrates forward by duration T (a whole number of steps plus remainder).
    void advance(GridState& gs, double T);

    double dt() const;
    bool renormalized() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Single-step convenience wrapper.
GridState step_mkdv(const GridState& gs, double dt, bool renormalized);

struct ShiftCheck {
    double residual = 0;        ///< with the shift direction the equations imply
    double residual_flipped = 0;///< with the opposite shift direction
    double shift = 0;           ///< 6 ||u0||^2 t
};

/**
 * Integrates both flows from u0 to time t and compares the renormalized
 * solution against the spatially shifted plain solution,
 * S#(t,u0)(x) = S(t,u0)(x - 6||u0||^2 t); the shift acts exactly on the
 * Fourier side. The flipped-direction residual is reported alongside.
 */
ShiftCheck shift_equivalence_check(const GridState& u0, double t, double dt);

struct IsospectralityReport {
    std::vector<double> times;
    double max_eig_drift = 0;
    double max_action_drift = 0;
};

/**
 * Integrates the plain flow and re-extracts the periodic spectrum and
 * actions at the sample times; both must be conserved.
 */
IsospectralityReport isospectrality_check(const GridState& u0,
                                          const std::vector<double>& times,
                                          double dt, int window_N,
                                          double tol = 1e-10);

/// Abstract phase-space point of the integrable flow.
struct BirkhoffState {
    int N = 0;
    std::vector<double> I;      ///< nonnegative actions, index n+N
    std::vector<double> theta;  ///< phases in [0, 2 pi)
    FrequencySpectrum omega_source;

    int idx(int n) const { return n + N; }
};

BirkhoffState birkhoff_state_from(const FrequencySpectrum& fs);

/**
 * Linear phase flow theta_n += omega_n^(#) t. The renormalized frequencies
 * are always available; the plain ones only when the source was an E_r
 * potential with finite H1.
 */
BirkhoffState birkhoff_flow(const BirkhoffState& bs, double t, bool sharp);

struct IllposednessRow {
    int k = 0;
    double lp_norm = 0;
    double h1 = 0;
    std::vector<cx> omega_star; ///< one value per probe index
};

struct IllposednessTable {
    double p = 0, alpha = 0;
    int kmax = 0;
    std::vector<int> probe_ns;
    std::vector<IllposednessRow> rows;  ///< truncations k = 8, 16, ..., kmax
    std::vector<double> h1_extension;   ///< exact H1 values continued past kmax
};

/**
 * Truncations v_k of the model datum with coefficients |n|^{-alpha},
 * 1 <= |n| <= kmax: the H1 column grows without bound while the
 * renormalized frequencies at the probe indices settle. Requires
 * 1/p < alpha < 1/2.
 */
IllposednessTable illposedness_demo(double p, double alpha, int kmax,
                                    std::vector<int> probe_ns = {1, 2},
                                    double tol = 1e-8);

} // namespace zsb

#endif
