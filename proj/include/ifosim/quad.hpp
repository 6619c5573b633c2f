#ifndef IFOSIM_QUAD_HPP
#define IFOSIM_QUAD_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ifosim {

// Sideband quadrature amplitudes at one frequency are complex; DC carrier
// quadratures are real.
using QuadVector = Eigen::Vector2cd;
using CarrierVector = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat2c = Eigen::Matrix2cd;

namespace constants {
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double speed_of_light = 299792458.0; // m/s
} // namespace constants

struct SqueezeParams {
    double r = 0.0;   // squeeze factor
    double phi = 0.0; // squeeze angle, radians
};

/// Rotation operator on quadrature fields.
inline Mat2 rotation_matrix(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat2 m;
    m << c, -s, s, c;
    return m;
}

template <typename Vec>
inline Vec rotate(const Vec& v, double theta) {
    return rotation_matrix(theta) * v;
}

/// v* = (v2, -v1): rotation of the quadrature pair by -pi/2. Phase
/// modulation of a carrier D generates sidebands along D*.
template <typename Vec>
inline Vec star(const Vec& v) {
    Vec out;
    out << v(1), -v(0);
    return out;
}

inline Mat2 squeeze_matrix(const SqueezeParams& p) {
    const double ch = std::cosh(p.r), sh = std::sinh(p.r);
    const double c2 = std::cos(2.0 * p.phi), s2 = std::sin(2.0 * p.phi);
    Mat2 m;
    m << ch + sh * c2, sh * s2, sh * s2, ch - sh * c2;
    return m;
}

/// D = sqrt(2 I) (cos theta, sin theta); |D|^2 = 2 I with I in watts.
inline CarrierVector carrier_from_power_phase(double power, double phase) {
    if (!(power >= 0.0))
        throw std::domain_error("carrier power must be non-negative");
    const double amp = std::sqrt(2.0 * power);
    return CarrierVector(amp * std::cos(phase), amp * std::sin(phase));
}

inline double carrier_power(const CarrierVector& d) {
    return 0.5 * d.squaredNorm();
}

inline double carrier_phase(const CarrierVector& d) {
    return std::atan2(d(1), d(0));
}

/// AC momentum flow carried by the beat between carrier D and sideband j,
/// per unit sideband amplitude: sqrt(hbar omega0 / c^2) D^T j.
inline std::complex<double> momentum_flux(const CarrierVector& carrier,
                                          const QuadVector& sideband,
                                          double omega0) {
    if (!(omega0 > 0.0))
        throw std::domain_error("carrier angular frequency must be positive");
    using namespace constants;
    const double scale = std::sqrt(hbar * omega0 / (speed_of_light * speed_of_light));
    return scale * (carrier(0) * sideband(0) + carrier(1) * sideband(1));
}

} // namespace ifosim

#endif
