#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ifosim/topology.hpp"

using namespace ifosim;

namespace {

bool has_code(const std::vector<Diagnostic>& d, const std::string& code) {
    return std::any_of(d.begin(), d.end(),
                       [&](const Diagnostic& x) { return x.code == code; });
}

OpticalNetwork laser_mirror_blocks() {
    OpticalNetwork net;
    const int laser = net.add({"laser", LaserParams{1.0, 0.0, {}}});
    const int m = net.add({"m", MirrorParams{0.8, 0.6, 0.0, 0.0, false}});
    const int pd = net.add({"pd", PhotodetectorParams{}});
    net.connect(laser, 0, m, 0);
    net.connect(m, 1, pd, 0);
    return net;
}

} // namespace

TEST_CASE("well-formed network validates cleanly") {
    CHECK(validate(laser_mirror_blocks()).empty());
}

TEST_CASE("unconnected port reported") {
    OpticalNetwork net = laser_mirror_blocks();
    net.connections.pop_back();
    const auto d = validate(net);
    CHECK(has_code(d, "unconnected-port"));
    // two dangling ports: the mirror back and the detector
    CHECK(std::count_if(d.begin(), d.end(), [](const Diagnostic& x) {
              return x.code == "unconnected-port";
          }) == 2);
}

TEST_CASE("port reuse reported") {
    OpticalNetwork net = laser_mirror_blocks();
    const int b = net.add({"b", BlockParams{}});
    net.connect(net.find("m"), 1, b, 0); // m.1 already used by pd
    CHECK(has_code(validate(net), "port-reused"));
}

TEST_CASE("self connection reported") {
    OpticalNetwork net;
    const int m = net.add({"m", MirrorParams{0.8, 0.6, 0.0, 0.0, false}});
    net.connect(m, 0, m, 0);
    CHECK(has_code(validate(net), "self-connection"));
}

TEST_CASE("bad port index reported") {
    OpticalNetwork net = laser_mirror_blocks();
    net.connections[0].y.port = 5;
    CHECK(has_code(validate(net), "bad-port"));
}

TEST_CASE("parameter violations surface as diagnostics") {
    OpticalNetwork net = laser_mirror_blocks();
    std::get<MirrorParams>(net.elements[net.find("m")].params).rho = 0.9; // breaks rho^2+tau^2=1
    CHECK(has_code(validate(net), "bad-params"));

    OpticalNetwork net2 = laser_mirror_blocks();
    auto& mp = std::get<MirrorParams>(net2.elements[net2.find("m")].params);
    mp.movable = true; // movable without mass
    CHECK(has_code(validate(net2), "bad-params"));
}

TEST_CASE("field table is a consistent bijection") {
    const OpticalNetwork net = laser_mirror_blocks();
    const FieldTable t = FieldTable::build(net);
    CHECK(t.num_fields() == net.total_ports());
    CHECK(t.num_fields() == 4);
    for (int e = 0; e < 3; ++e) {
        for (int p = 0; p < port_count(net.elements[e].params); ++p) {
            const int f = t.outgoing(e, p);
            CHECK(t.producer(f) == PortRef{e, p});
            // the incoming field here is the peer's outgoing field
            const PortRef q = t.peer(e, p);
            CHECK(t.incoming(e, p) == t.outgoing(q.element, q.port));
            // connections are symmetric
            CHECK(t.peer(q.element, q.port) == PortRef{e, p});
        }
    }
}

TEST_CASE("network helpers") {
    OpticalNetwork net = laser_mirror_blocks();
    CHECK(net.find("laser") == 0);
    CHECK(net.find("nope") == -1);
    CHECK(net.omega0() == doctest::Approx(2 * M_PI * constants::speed_of_light / 1064e-9));
}
