#ifndef ZSB_SPECTRUM_HPP
#define ZSB_SPECTRUM_HPP

#include <vector>

#include "zsb/seq.hpp"
#include "zsb/zs.hpp"

namespace zsb {

/**
 * Localized periodic spectrum on the index window [-N, N]: paired
 * eigenvalues lambda_n^-/lambda_n^+ (lexicographic order), gap midpoints
 * tau_n, gap lengths gamma_n, the zeros lambda_n^* of dDelta/dlambda, and
 * certified isolating discs U_n. Immutable after construction.
 */
struct SpectralData {
    int N = 0;
    bool real_type = true;
    double collapse_tol = 0;   ///< gaps shorter than this were snapped to zero
    std::vector<cx> lam_minus, lam_plus, tau, gamma, lam_dot;
    std::vector<cx> disc_center;
    std::vector<double> disc_radius;
    double sep_constant = 1;   ///< recorded c with dist(U_n,U_m) >= |m-n|/c
    int n_phi = 0;             ///< U_n equals the default disc for |n| >= n_phi

    int idx(int n) const { return n + N; }
    bool in_window(int n) const { return n >= -N && n <= N; }
    bool is_open(int n) const { return gamma[idx(n)] != cx(0); }
    std::vector<int> open_gaps() const;
};

struct LocateOptions {
    double tol = 1e-10;        ///< localization tolerance
    int winding_stride = 1;    ///< certify every k-th disc (1 = all); 0 = skip
    int max_winding_nodes = 512;
};

/**
 * Localizes the periodic spectrum on [-N, N]. Zeros of dDelta interlace the
 * spectrum and are found first (secant continuation along the window); the
 * two eigenvalues per index are then refined by safeguarded Newton on
 * Delta -+ 2, and every certified disc is checked to carry winding number 2
 * of Delta^2 - 4. Gaps shorter than 10*tol collapse to exact zero length.
 */
SpectralData locate_spectrum(const TransferEngine& engine, int N,
                             const LocateOptions& opt = {});
SpectralData locate_spectrum(const Potential& phi, int N, double tol = 1e-10);

/// Sequences feeding the asymptotics checks.
struct GapCheckReport {
    std::vector<int> open_indices;
    std::vector<cx> lam_dot_rel;   ///< (lambda_n^* - tau_n)/gamma_n^2, open gaps
    BiSequence eig_offset;         ///< max |lambda_n^{+-} - n pi| over the pair
};

GapCheckReport gap_check(const SpectralData& sd);

} // namespace zsb

#endif
