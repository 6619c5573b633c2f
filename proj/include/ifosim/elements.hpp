#ifndef IFOSIM_ELEMENTS_HPP
#define IFOSIM_ELEMENTS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>

#include "ifosim/quad.hpp"

namespace ifosim {

// ---------------------------------------------------------------------------
// Element parameter types
// ---------------------------------------------------------------------------

/// Mirror with amplitude reflectivity rho, transmissivity tau and power
/// loss A, rho^2 + tau^2 + A = 1. Ports: 0 = front (in a, out b),
/// 1 = back (in d, out c). Reflection off the front carries -rho, off the
/// back +rho.
struct MirrorParams {
    double rho = 1.0;
    double tau = 0.0;
    double loss_A = 0.0;
    double mass = 0.0; // kg, used when movable
    bool movable = false;
};

/// Four-port beamsplitter. Port p carries one incoming and one outgoing
/// field; reflection couples ports 0<->1 and 2<->3, transmission couples
/// 0<->2 and 1<->3. With the field names of the scattering relation,
/// port 0 = (out a, in b), port 1 = (out c, in d), port 2 = (out e, in f),
/// port 3 = (out g, in h).
struct BeamsplitterParams {
    double rho = M_SQRT1_2;
    double tau = M_SQRT1_2;
    double loss_A = 0.0;
    double mass = 0.0;
    bool movable = false;
};

/// Free-space propagation over length L. The microscopic carrier detuning
/// Theta is specified directly (omega0*L/c is meaningless mod 2pi in
/// floating point); L only enters the sideband phase Omega*L/c and the GW
/// coupling. Ports: 0 = (in a, out b), 1 = (in d, out c); a propagates to
/// c and d to b.
struct PropagatorParams {
    double length_L = 0.0;          // m
    double carrier_phase_Theta = 0; // rad, one-way carrier phase
    double gw_eta = 0.0;            // in [-1, 1]
    bool gw_coupled = false;
};

/// One-way squeezer: the field entering port 0 leaves port 1 transformed
/// by S(r, phi); the reverse field passes unmodified.
struct SqueezerParams {
    double r = 0.0;
    double phi = 0.0;
};

/// Laser noise spectral matrix S_L, either constant in vacuum units or
/// derived from relative intensity noise and frequency noise riding on the
/// carrier.
struct LaserNoiseModel {
    // Constant part, vacuum units.
    double s11 = 0.0;
    double s22 = 0.0;
    double s12 = 0.0;
    // Physical part; converted using the laser photon rate.
    double rin_per_rtHz = 0.0;        // relative intensity ASD, 1/sqrt(Hz)
    double freq_noise_hz_per_rtHz = 0.0; // frequency ASD, Hz/sqrt(Hz)

    /// Spectral matrix at sideband frequency Omega for a carrier with
    /// photon rate N = I/(hbar omega0). Amplitude noise: delta I/I =
    /// 2 z1/sqrt(2N); phase noise: z2 = sqrt(2N) * delta phi, with
    /// delta phi(Omega) = 2 pi delta f / Omega.
    Mat2 spectral_matrix(double Omega, double photon_rate) const {
        Mat2 s;
        double a11 = s11, a22 = s22;
        if (rin_per_rtHz > 0.0)
            a11 += rin_per_rtHz * rin_per_rtHz * photon_rate / 2.0;
        if (freq_noise_hz_per_rtHz > 0.0 && Omega != 0.0) {
            const double dphi = 2.0 * M_PI * freq_noise_hz_per_rtHz / Omega;
            a22 += 2.0 * photon_rate * dphi * dphi;
        }
        s << a11, s12, s12, a22;
        return s;
    }
};

struct LaserParams {
    double power = 0.0; // W
    double phase = 0.0; // rad
    LaserNoiseModel noise;
};

struct BlockParams {};
struct PhotodetectorParams {};

using ElementParams =
    std::variant<MirrorParams, BeamsplitterParams, PropagatorParams,
                 SqueezerParams, LaserParams, BlockParams, PhotodetectorParams>;

struct Element {
    std::string name;
    ElementParams params;
};

inline int port_count(const ElementParams& p) {
    struct V {
        int operator()(const MirrorParams&) const { return 2; }
        int operator()(const BeamsplitterParams&) const { return 4; }
        int operator()(const PropagatorParams&) const { return 2; }
        int operator()(const SqueezerParams&) const { return 2; }
        int operator()(const LaserParams&) const { return 1; }
        int operator()(const BlockParams&) const { return 1; }
        int operator()(const PhotodetectorParams&) const { return 1; }
    };
    return std::visit(V{}, p);
}

inline bool is_movable(const ElementParams& p) {
    if (auto* m = std::get_if<MirrorParams>(&p)) return m->movable;
    if (auto* b = std::get_if<BeamsplitterParams>(&p)) return b->movable;
    return false;
}

/// Number of independent loss/open-port vacuum slots the element injects.
inline int vacuum_slot_count(const ElementParams& p) {
    struct V {
        int operator()(const MirrorParams& m) const { return m.loss_A > 0.0 ? 2 : 0; }
        int operator()(const BeamsplitterParams& b) const { return b.loss_A > 0.0 ? 4 : 0; }
        int operator()(const PropagatorParams&) const { return 0; }
        int operator()(const SqueezerParams&) const { return 0; }
        int operator()(const LaserParams&) const { return 1; }
        int operator()(const BlockParams&) const { return 1; }
        int operator()(const PhotodetectorParams&) const { return 1; }
    };
    return std::visit(V{}, p);
}

inline void check_rt_loss(double rho, double tau, double A, const char* what) {
    if (rho < 0 || rho > 1 || tau < 0 || tau > 1 || A < 0 || A > 1)
        throw std::invalid_argument(std::string(what) + ": rho, tau, A must lie in [0, 1]");
    if (std::abs(rho * rho + tau * tau + A - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(what) + ": rho^2 + tau^2 + A must equal 1");
}

inline void check_params(const ElementParams& p) {
    if (auto* m = std::get_if<MirrorParams>(&p)) {
        check_rt_loss(m->rho, m->tau, m->loss_A, "mirror");
        if (m->movable && !(m->mass > 0.0))
            throw std::invalid_argument("movable mirror needs positive mass");
    } else if (auto* b = std::get_if<BeamsplitterParams>(&p)) {
        check_rt_loss(b->rho, b->tau, b->loss_A, "beamsplitter");
        if (b->movable && !(b->mass > 0.0))
            throw std::invalid_argument("movable beamsplitter needs positive mass");
    } else if (auto* pr = std::get_if<PropagatorParams>(&p)) {
        if (pr->length_L < 0.0)
            throw std::invalid_argument("propagator length must be non-negative");
        if (std::abs(pr->gw_eta) > 1.0)
            throw std::invalid_argument("gw_eta must lie in [-1, 1]");
    } else if (auto* l = std::get_if<LaserParams>(&p)) {
        if (l->power < 0.0)
            throw std::invalid_argument("laser power must be non-negative");
    }
}

// ---------------------------------------------------------------------------
// Row emission
//
// Each element contributes one 2-row block per output port (plus one scalar
// motion row when movable) to the sideband system. Rows are written through
// a sink with the protocol below; the sink supplies the -1 diagonal itself.
//
//   begin_output(port)               start the block row for the output at `port`
//   coef_in(port, Mat2c)             += M * (incoming field at `port`)
//   coef_motion(QuadVector)          += g * xi, this element's motion unknown
//   source_vacuum(k, Mat2c)          += M * v_k, k-th local vacuum slot
//   source_laser(Mat2c)              += M * l
//   source_gw(QuadVector)            += g * h
//   source_carrier(CarrierVector)    DC carrier injection (laser, Omega = 0)
//   begin_motion()                   start the motion row, xi = ...
//   motion_in(port, RowVector2cd)    += r * (incoming field at `port`)
//   motion_out(port, RowVector2cd)   += r * (outgoing field at `port`)
//
// The motion unknown is the scaled displacement
//   xi = 2 omega0 X / (c sqrt(hbar omega0))          (mirror)
//   xi = sqrt(2) omega0 X_N / (c sqrt(hbar omega0))  (beamsplitter)
// which removes hbar from the matrix and keeps all blocks near unit scale.
// ---------------------------------------------------------------------------

/// Carriers incident on / leaving a two-port element, from the DC stage.
struct TwoPortCarriers {
    CarrierVector in0 = CarrierVector::Zero();  // a
    CarrierVector out0 = CarrierVector::Zero(); // b
    CarrierVector in1 = CarrierVector::Zero();  // d
    CarrierVector out1 = CarrierVector::Zero(); // c
};

/// Carriers at the four beamsplitter ports.
struct BeamsplitterCarriers {
    CarrierVector in[4] = {CarrierVector::Zero(), CarrierVector::Zero(),
                           CarrierVector::Zero(), CarrierVector::Zero()};
    CarrierVector out[4] = {CarrierVector::Zero(), CarrierVector::Zero(),
                            CarrierVector::Zero(), CarrierVector::Zero()};
};

template <class Sink>
void mirror_static_rows(const MirrorParams& p, Sink& s) {
    const Mat2c R = Mat2c::Identity() * p.rho;
    const Mat2c T = Mat2c::Identity() * p.tau;
    const double sa = std::sqrt(p.loss_A);

    s.begin_output(0); // b = -rho a + tau d + sqrt(A) v0'
    s.coef_in(0, -R);
    s.coef_in(1, T);
    if (p.loss_A > 0.0) s.source_vacuum(0, Mat2c::Identity() * sa);

    s.begin_output(1); // c = tau a + rho d + sqrt(A) v1'
    s.coef_in(0, T);
    s.coef_in(1, R);
    if (p.loss_A > 0.0) s.source_vacuum(1, Mat2c::Identity() * sa);
}

template <class Sink>
void mirror_rp_rows(const MirrorParams& p, const TwoPortCarriers& dc,
                    double Omega, double omega0, Sink& s) {
    if (!p.movable) throw std::logic_error("mirror_rp_rows: element is not movable");
    if (Omega == 0.0)
        throw std::invalid_argument("radiation pressure rows undefined at Omega = 0");

    const Mat2c R = Mat2c::Identity() * p.rho;
    const Mat2c T = Mat2c::Identity() * p.tau;
    const double sa = std::sqrt(p.loss_A);
    const double c = constants::speed_of_light;
    // Motion-row coupling; eliminating xi recovers Pi = 2 rho omega0/(M Omega^2 c^2).
    const double k = 2.0 * omega0 / (p.mass * Omega * Omega * c * c);

    s.begin_output(0);
    s.coef_in(0, -R);
    s.coef_in(1, T);
    s.coef_motion(QuadVector(-p.rho * star(dc.in0)));
    if (p.loss_A > 0.0) s.source_vacuum(0, Mat2c::Identity() * sa);

    s.begin_output(1);
    s.coef_in(0, T);
    s.coef_in(1, R);
    s.coef_motion(QuadVector(-p.rho * star(dc.in1)));
    if (p.loss_A > 0.0) s.source_vacuum(1, Mat2c::Identity() * sa);

    // xi = k [D_a^T a + D_b^T b - D_c^T c - D_d^T d]; the loss vacua carry no
    // carrier and exert no force.
    s.begin_motion();
    s.motion_in(0, Eigen::RowVector2cd(k * dc.in0.transpose()));
    s.motion_out(0, Eigen::RowVector2cd(k * dc.out0.transpose()));
    s.motion_out(1, Eigen::RowVector2cd(-k * dc.out1.transpose()));
    s.motion_in(1, Eigen::RowVector2cd(-k * dc.in1.transpose()));
}

template <class Sink>
void beamsplitter_static_rows(const BeamsplitterParams& p, Sink& s) {
    const Mat2c R = Mat2c::Identity() * p.rho;
    const Mat2c T = Mat2c::Identity() * p.tau;
    const double sa = std::sqrt(p.loss_A);

    // (a, c, e, g) = M_BS (d, b, h, f) - sqrt(A) (v0, v1, v2, v3)
    s.begin_output(0);
    s.coef_in(1, -R);
    s.coef_in(2, T);
    if (p.loss_A > 0.0) s.source_vacuum(0, -Mat2c::Identity() * sa);

    s.begin_output(1);
    s.coef_in(0, -R);
    s.coef_in(3, T);
    if (p.loss_A > 0.0) s.source_vacuum(1, -Mat2c::Identity() * sa);

    s.begin_output(2);
    s.coef_in(0, T);
    s.coef_in(3, R);
    if (p.loss_A > 0.0) s.source_vacuum(2, -Mat2c::Identity() * sa);

    s.begin_output(3);
    s.coef_in(1, T);
    s.coef_in(2, R);
    if (p.loss_A > 0.0) s.source_vacuum(3, -Mat2c::Identity() * sa);
}

template <class Sink>
void beamsplitter_rp_rows(const BeamsplitterParams& p, const BeamsplitterCarriers& dc,
                          double Omega, double omega0, Sink& s) {
    if (!p.movable) throw std::logic_error("beamsplitter_rp_rows: element is not movable");
    if (Omega == 0.0)
        throw std::invalid_argument("radiation pressure rows undefined at Omega = 0");

    const Mat2c T = Mat2c::Identity() * p.tau;
    const double sa = std::sqrt(p.loss_A);
    const double c = constants::speed_of_light;
    const double k = omega0 / (p.mass * Omega * Omega * c * c);

    // Output at port q subtracts rho xi D_inq^*, with (a, c, e, g) paired
    // against the incoming carriers (d, b, h, f).
    const int in_for_out[4] = {1, 0, 3, 2};
    const int cross[4] = {2, 3, 0, 1}; // transmission partner

    for (int q = 0; q < 4; ++q) {
        s.begin_output(q);
        const double refl = (q < 2) ? -p.rho : p.rho;
        s.coef_in(in_for_out[q], Mat2c::Identity() * refl);
        s.coef_in(cross[q], T);
        s.coef_motion(QuadVector(-p.rho * star(dc.in[in_for_out[q]])));
        if (p.loss_A > 0.0) s.source_vacuum(q, -Mat2c::Identity() * sa);
    }

    // xi = k [ D_a^T a + D_c^T c - D_e^T e - D_g^T g
    //        + D_d^T d + D_b^T b - D_h^T h - D_f^T f ]
    s.begin_motion();
    const double sgn_out[4] = {+1, +1, -1, -1};
    for (int q = 0; q < 4; ++q)
        s.motion_out(q, Eigen::RowVector2cd(sgn_out[q] * k * dc.out[q].transpose()));
    // Incoming fields grouped as (d, b, h, f) -> ports (1, 0, 3, 2), signs (+ + - -).
    const int in_order[4] = {1, 0, 3, 2};
    for (int i = 0; i < 4; ++i) {
        const double sg = (i < 2) ? +1.0 : -1.0;
        const int q = in_order[i];
        s.motion_in(q, Eigen::RowVector2cd(sg * k * dc.in[q].transpose()));
    }
}

/// Sideband rows of a free-space propagator; at Omega = 0 this degenerates to
/// the pure carrier rotation. GW source terms are registered when coupled:
/// the outgoing field picks up -eta (omega0 L / (2 c sqrt(hbar omega0))) D_out^* h.
template <class Sink>
void propagator_rows(const PropagatorParams& p, const TwoPortCarriers& dc,
                     double Omega, double omega0, Sink& s) {
    const double c = constants::speed_of_light;
    const double phi = Omega * p.length_L / c;
    const std::complex<double> ph(std::cos(phi), std::sin(phi));
    const Mat2c M = ph * rotation_matrix(p.carrier_phase_Theta).cast<std::complex<double>>();

    double kgw = 0.0;
    if (p.gw_coupled && p.gw_eta != 0.0)
        kgw = p.gw_eta * omega0 * p.length_L /
              (2.0 * c * std::sqrt(constants::hbar * omega0));

    s.begin_output(0); // b = e^{i phi} R_Theta d
    s.coef_in(1, M);
    if (kgw != 0.0) s.source_gw(QuadVector(-kgw * star(dc.out0)));

    s.begin_output(1); // c = e^{i phi} R_Theta a
    s.coef_in(0, M);
    if (kgw != 0.0) s.source_gw(QuadVector(-kgw * star(dc.out1)));
}

template <class Sink>
void squeezer_rows(const SqueezerParams& p, Sink& s) {
    const Mat2c S = squeeze_matrix({p.r, p.phi}).cast<std::complex<double>>();

    s.begin_output(1); // forward: out1 = S in0
    s.coef_in(0, S);

    s.begin_output(0); // reverse passes unmodified
    s.coef_in(1, Mat2c::Identity());
}

/// Blocks and photodetectors emit fresh unit vacuum. The laser emits the
/// carrier at DC and, at sideband frequencies, unit vacuum (coherent-state
/// fluctuations) plus its excess classical noise.
template <class Sink>
void endpoint_rows(const ElementParams& p, Sink& s) {
    s.begin_output(0);
    if (auto* l = std::get_if<LaserParams>(&p)) {
        s.source_carrier(carrier_from_power_phase(l->power, l->phase));
        s.source_vacuum(0, Mat2c::Identity());
        s.source_laser(Mat2c::Identity());
    } else {
        s.source_vacuum(0, Mat2c::Identity());
    }
}

} // namespace ifosim

#endif
