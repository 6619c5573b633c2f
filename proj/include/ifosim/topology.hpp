#ifndef IFOSIM_TOPOLOGY_HPP
#define IFOSIM_TOPOLOGY_HPP

#include <string>
#include <vector>

#include "ifosim/elements.hpp"

namespace ifosim {

struct PortRef {
    int element = -1;
    int port = -1;
    bool operator==(const PortRef&) const = default;
};

struct Connection {
    PortRef x, y;
};

/// Machine-readable validation finding; the CLI renders these.
struct Diagnostic {
    std::string code; // e.g. "unconnected-port", "port-reused"
    std::string message;
    PortRef where;
};

struct OpticalNetwork {
    std::vector<Element> elements;
    std::vector<Connection> connections;
    double wavelength_m = 1064e-9;

    int add(Element e) {
        elements.push_back(std::move(e));
        return static_cast<int>(elements.size()) - 1;
    }
    void connect(int ea, int pa, int eb, int pb) {
        connections.push_back({{ea, pa}, {eb, pb}});
    }
    int find(const std::string& name) const {
        for (int i = 0; i < static_cast<int>(elements.size()); ++i)
            if (elements[i].name == name) return i;
        return -1;
    }
    int total_ports() const {
        int p = 0;
        for (const auto& e : elements) p += port_count(e.params);
        return p;
    }
    double omega0() const {
        return 2.0 * M_PI * constants::speed_of_light / wavelength_m;
    }
};

/// Checks all structural invariants. Returns the list of violations; an
/// empty list means the network is well formed.
std::vector<Diagnostic> validate(const OpticalNetwork& net);

/// Enumeration of the P directed fields. Field i is the unique output of
/// one element-port; ordering is by (element insertion order, port index),
/// so two enumerations of the same network are identical.
class FieldTable {
  public:
    static FieldTable build(const OpticalNetwork& net); // requires validated net

    int num_fields() const { return num_fields_; }
    /// The outgoing field at (element, port).
    int outgoing(int element, int port) const {
        return offset_[element] + port;
    }
    /// The incoming field at (element, port) = the peer port's output.
    int incoming(int element, int port) const {
        const PortRef p = peer_[offset_[element] + port];
        return offset_[p.element] + p.port;
    }
    /// Producing element-port of a field (a bijection onto output ports).
    PortRef producer(int field) const {
        for (int e = 0; e + 1 < static_cast<int>(offset_.size()); ++e)
            if (field < offset_[e + 1]) return {e, field - offset_[e]};
        return {static_cast<int>(offset_.size()) - 1,
                field - offset_.back()};
    }
    PortRef peer(int element, int port) const {
        return peer_[offset_[element] + port];
    }

  private:
    std::vector<int> offset_; // element -> first port/field index
    std::vector<PortRef> peer_;
    int num_fields_ = 0;
};

} // namespace ifosim

#endif
