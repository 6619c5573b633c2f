#ifndef IFOSIM_DETECTION_HPP
#define IFOSIM_DETECTION_HPP

#include <complex>
#include <functional>

#include "ifosim/solver.hpp"

namespace ifosim {

/// Homodyne readout settings. When zeta_from_carrier is set, the detection
/// angle follows the DC carrier phase of the detected field.
struct HomodyneSettings {
    int detector_element = -1;
    double zeta = 0.0;
    bool zeta_from_carrier = false;
};

/// The field arriving at a one-port endpoint (what a photodetector reads).
inline int detected_field(const SystemLayout& layout, int detector_element) {
    return layout.fields.incoming(detector_element, 0);
}

inline double resolve_zeta(const HomodyneSettings& hs, const SystemLayout& layout,
                           const DcSolution& dc) {
    if (!hs.zeta_from_carrier) return hs.zeta;
    return dc.phase(detected_field(layout, hs.detector_element));
}

namespace detail {
inline Eigen::RowVector2d homodyne_row(double zeta) {
    return Eigen::RowVector2d(std::cos(zeta), std::sin(zeta));
}
} // namespace detail

/// Quantum noise N_Q^2 at homodyne angle zeta, in vacuum units: the
/// incoherent sum over vacuum slots (open ports and losses) selected by
/// `keep`. S_v = identity for every unit vacuum.
inline double quantum_noise_filtered(const TransferSet& ts, int field, double zeta,
                                     const std::function<bool(const SlotInfo&)>& keep) {
    const Eigen::RowVector2d e = detail::homodyne_row(zeta);
    double n2 = 0.0;
    for (const auto& s : ts.layout.slots) {
        if (!s.is_vacuum() || !keep(s)) continue;
        const Eigen::RowVector2cd w = e * ts.block(field, s);
        n2 += w.squaredNorm();
    }
    return n2;
}

inline double quantum_noise(const TransferSet& ts, int field, double zeta) {
    return quantum_noise_filtered(ts, field, zeta, [](const SlotInfo&) { return true; });
}

/// Laser noise N_L^2 with spectral matrix S_L (2x2, positive semidefinite),
/// using the laser slots only.
inline double laser_noise(const TransferSet& ts, int field, double zeta,
                          const std::function<Mat2(int laser_element)>& spectral) {
    const Eigen::RowVector2d e = detail::homodyne_row(zeta);
    double n2 = 0.0;
    for (const auto& s : ts.layout.slots) {
        if (s.kind != SlotInfo::Kind::Laser) continue;
        const Eigen::RowVector2cd w = e * ts.block(field, s);
        const Mat2 sl = spectral(s.element);
        n2 += (w * sl.cast<std::complex<double>>() * w.adjoint())(0, 0).real();
    }
    return n2;
}

/// Coherent GW transfer H_b; zero when no propagator is GW-coupled.
inline std::complex<double> gw_transfer(const TransferSet& ts, int field, double zeta) {
    if (ts.layout.gw_col < 0) return {0.0, 0.0};
    const Eigen::RowVector2d e = detail::homodyne_row(zeta);
    const Eigen::Vector2cd h = ts.T.block<2, 1>(2 * field, ts.layout.gw_col);
    return e(0) * h(0) + e(1) * h(1);
}

/// Strain-referred noise S_h = (N_Q^2 + N_L^2)/|H|^2; NaN flags a zero
/// transfer point.
inline double strain_noise(double nq2, double nl2, std::complex<double> h_transfer) {
    const double h2 = std::norm(h_transfer);
    if (h2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (nq2 + nl2) / h2;
}

} // namespace ifosim

#endif
