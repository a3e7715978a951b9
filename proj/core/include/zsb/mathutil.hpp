#ifndef ZSB_MATHUTIL_HPP
#define ZSB_MATHUTIL_HPP

#include <cmath>
#include <complex>

namespace zsb {

using cx = std::complex<double>;

constexpr double PI = 3.141592653589793238462643383279502884;

/// cos(sqrt(z)), entire in z; series near 0 avoids the sqrt branch.
inline cx cos_sqrt(cx z) {
    if (std::abs(z) < 1e-3) {
        return 1.0 + z * (-0.5 + z * (1.0 / 24.0 + z * (-1.0 / 720.0 + z * (1.0 / 40320.0))));
    }
    cx w = std::sqrt(z);
    return std::cos(w);
}

/// sin(sqrt(z))/sqrt(z), entire in z.
inline cx sinc_sqrt(cx z) {
    if (std::abs(z) < 1e-3) {
        return 1.0 + z * (-1.0 / 6.0 + z * (1.0 / 120.0 + z * (-1.0 / 5040.0 + z * (1.0 / 362880.0))));
    }
    cx w = std::sqrt(z);
    return std::sin(w) / w;
}

/// d/dz cos(sqrt(z)) = -sinc_sqrt(z)/2.
inline cx dcos_sqrt(cx z) { return -0.5 * sinc_sqrt(z); }

/// d/dz [sin(sqrt(z))/sqrt(z)] = (cos_sqrt(z) - sinc_sqrt(z)) / (2 z).
inline cx dsinc_sqrt(cx z) {
    if (std::abs(z) < 1e-3) {
        return -1.0 / 6.0 + z * (1.0 / 60.0 + z * (-1.0 / 1680.0 + z * (1.0 / 90720.0)));
    }
    return (cos_sqrt(z) - sinc_sqrt(z)) / (2.0 * z);
}

/// sin(z)/z with the removable singularity filled in.
inline cx sinc(cx z) {
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

/// Principal branch square root (cut along the negative real axis).
inline cx sqrt_plus(cx z) { return std::sqrt(z); }

/// sin(lambda)/(lambda - m*pi), stable for lambda near m*pi.
inline cx sin_over_offset(cx lambda, long m) {
    cx d = lambda - double(m) * PI;
    cx s = sinc(d);
    return (m % 2 == 0) ? s : -s;
}

inline double sqr(double x) { return x * x; }

} // namespace zsb

#endif
