#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ifosim/detection.hpp"

using namespace ifosim;

namespace {

struct Rig {
    OpticalNetwork net;
    DcSolution dc;
    TransferSet ts;
    int pd = -1;
};

Rig solve_at(OpticalNetwork net, const std::string& pd_name, double f_hz) {
    Rig r;
    r.net = std::move(net);
    REQUIRE(validate(r.net).empty());
    r.pd = r.net.find(pd_name);
    r.dc = solve_dc(r.net);
    r.ts = solve_sideband(assemble_sideband(r.net, r.dc, 2 * M_PI * f_hz));
    return r;
}

} // namespace

TEST_CASE("direct link reads unit vacuum at every homodyne angle") {
    OpticalNetwork net;
    const int l = net.add({"laser", LaserParams{1.0, 0.0, {}}});
    const int pd = net.add({"pd", PhotodetectorParams{}});
    net.connect(l, 0, pd, 0);
    const Rig r = solve_at(std::move(net), "pd", 250.0);
    const int field = detected_field(r.ts.layout, r.pd);
    for (int i = 0; i < 16; ++i) {
        const double zeta = i * M_PI / 8.0;
        CHECK(quantum_noise(r.ts, field, zeta) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("squeezed vacuum spectrum and min-max product") {
    const double rr = 0.7;
    OpticalNetwork net;
    const int b = net.add({"b", BlockParams{}});
    const int sq = net.add({"sq", SqueezerParams{rr, 0.0}});
    const int pd = net.add({"pd", PhotodetectorParams{}});
    net.connect(b, 0, sq, 0);
    net.connect(sq, 1, pd, 0);
    const Rig r = solve_at(std::move(net), "pd", 1000.0);
    const int field = detected_field(r.ts.layout, r.pd);

    CHECK(quantum_noise(r.ts, field, 0.0) == doctest::Approx(std::exp(2 * rr)).epsilon(1e-12));
    CHECK(quantum_noise(r.ts, field, M_PI / 2) == doctest::Approx(std::exp(-2 * rr)).epsilon(1e-12));
    double mn = 1e300, mx = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double n = quantum_noise(r.ts, field, i * M_PI / 64.0);
        mn = std::min(mn, n);
        mx = std::max(mx, n);
    }
    CHECK(mn * mx == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("homodyne angle can follow the carrier") {
    OpticalNetwork net;
    const int l = net.add({"laser", LaserParams{2.0, 0.8, {}}});
    const int pd = net.add({"pd", PhotodetectorParams{}});
    net.connect(l, 0, pd, 0);
    const Rig r = solve_at(std::move(net), "pd", 100.0);

    HomodyneSettings hs;
    hs.detector_element = r.pd;
    hs.zeta_from_carrier = true;
    CHECK(resolve_zeta(hs, r.ts.layout, r.dc) == doctest::Approx(0.8).epsilon(1e-13));
    hs.zeta_from_carrier = false;
    hs.zeta = 0.25;
    CHECK(resolve_zeta(hs, r.ts.layout, r.dc) == 0.25);
}

TEST_CASE("laser intensity and frequency noise project onto the right quadratures") {
    const double power = 2.0, rin = 1e-8, fnoise = 1e-4, f_hz = 500.0;
    OpticalNetwork net;
    LaserParams lp{power, 0.0, {}};
    lp.noise.rin_per_rtHz = rin;
    lp.noise.freq_noise_hz_per_rtHz = fnoise;
    const int l = net.add({"laser", lp});
    const int pd = net.add({"pd", PhotodetectorParams{}});
    net.connect(l, 0, pd, 0);
    const Rig r = solve_at(std::move(net), "pd", f_hz);
    const int field = detected_field(r.ts.layout, r.pd);

    auto spectral = [&](int) {
        const double rate = power / (constants::hbar * r.net.omega0());
        return lp.noise.spectral_matrix(2 * M_PI * f_hz, rate);
    };
    const double rate = power / (constants::hbar * r.net.omega0());
    const double s11 = rin * rin * rate / 2.0;
    const double dphi = 2 * M_PI * fnoise / (2 * M_PI * f_hz);
    const double s22 = 2.0 * rate * dphi * dphi;

    CHECK(laser_noise(r.ts, field, 0.0, spectral) == doctest::Approx(s11).epsilon(1e-12));
    CHECK(laser_noise(r.ts, field, M_PI / 2, spectral) == doctest::Approx(s22).epsilon(1e-12));
    const double mixed = laser_noise(r.ts, field, 0.3, spectral);
    CHECK(mixed == doctest::Approx(s11 * std::cos(0.3) * std::cos(0.3) +
                                   s22 * std::sin(0.3) * std::sin(0.3))
                       .epsilon(1e-12));
    // quadratic form stays nonnegative for any positive semidefinite input
    for (int i = 0; i < 32; ++i)
        CHECK(laser_noise(r.ts, field, i * 0.2, spectral) >= 0.0);
}

TEST_CASE("gw transfer is zero without coupled propagators, finite with one") {
    OpticalNetwork net;
    const int l = net.add({"laser", LaserParams{1.0, 0.0, {}}});
    const int pd = net.add({"pd", PhotodetectorParams{}});
    net.connect(l, 0, pd, 0);
    const Rig r = solve_at(std::move(net), "pd", 100.0);
    const int field = detected_field(r.ts.layout, r.pd);
    CHECK(std::abs(gw_transfer(r.ts, field, 0.3)) == 0.0);
    CHECK(std::isnan(strain_noise(1.0, 0.0, gw_transfer(r.ts, field, 0.3))));

    OpticalNetwork net2;
    const int l2 = net2.add({"laser", LaserParams{1.0, 0.0, {}}});
    const int arm = net2.add({"arm", PropagatorParams{4000.0, 0.0, 1.0, true}});
    const int pd2 = net2.add({"pd", PhotodetectorParams{}});
    net2.connect(l2, 0, arm, 0);
    net2.connect(arm, 1, pd2, 0);
    const Rig r2 = solve_at(std::move(net2), "pd", 100.0);
    const int field2 = detected_field(r2.ts.layout, r2.pd);
    // the signal rides the phase quadrature of the transmitted carrier
    const double zeta_sig = resolve_zeta({r2.pd, 0.0, true}, r2.ts.layout, r2.dc) + M_PI / 2;
    const auto h = gw_transfer(r2.ts, field2, zeta_sig);
    CHECK(std::abs(h) > 0.0);
    const double sh = strain_noise(quantum_noise(r2.ts, field2, zeta_sig), 0.0, h);
    CHECK(sh > 0.0);
    CHECK(std::isfinite(sh));
    // shot-noise-limited phase readout over a single pass: s_h = 1/|H|^2
    CHECK(sh == doctest::Approx(1.0 / std::norm(h)).epsilon(1e-12));
}

TEST_CASE("quantum noise splits by slot kind") {
    // lossy mirror between laser and detector: open-port and loss vacua
    OpticalNetwork net;
    const double A = 0.3;
    const int l = net.add({"laser", LaserParams{1.0, 0.0, {}}});
    const int m = net.add({"m", MirrorParams{0.5, std::sqrt(1 - 0.25 - A), A, 0, false}});
    const int pd = net.add({"pd", PhotodetectorParams{}});
    net.connect(l, 0, m, 0);
    net.connect(m, 1, pd, 0);
    const Rig r = solve_at(std::move(net), "pd", 2000.0);
    const int field = detected_field(r.ts.layout, r.pd);

    const double open = quantum_noise_filtered(r.ts, field, 0.4, [](const SlotInfo& s) {
        return s.kind == SlotInfo::Kind::OpenVacuum;
    });
    const double loss = quantum_noise_filtered(r.ts, field, 0.4, [](const SlotInfo& s) {
        return s.kind == SlotInfo::Kind::LossVacuum;
    });
    CHECK(loss == doctest::Approx(A).epsilon(1e-12));
    CHECK(open + loss == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(open + loss == doctest::Approx(quantum_noise(r.ts, field, 0.4)).epsilon(1e-14));
}
