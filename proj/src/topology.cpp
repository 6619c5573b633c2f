#include "ifosim/topology.hpp"

#include <map>

namespace ifosim {

std::vector<Diagnostic> validate(const OpticalNetwork& net) {
    std::vector<Diagnostic> out;
    const int n = static_cast<int>(net.elements.size());

    auto port_ok = [&](const PortRef& p) {
        return p.element >= 0 && p.element < n && p.port >= 0 &&
               p.port < port_count(net.elements[p.element].params);
    };
    auto describe = [&](const PortRef& p) {
        if (p.element < 0 || p.element >= n)
            return std::string("element#") + std::to_string(p.element);
        return net.elements[p.element].name + ".port" + std::to_string(p.port);
    };

    for (int e = 0; e < n; ++e) {
        try {
            check_params(net.elements[e].params);
        } catch (const std::exception& ex) {
            out.push_back({"bad-params",
                           net.elements[e].name + ": " + ex.what(),
                           {e, -1}});
        }
    }

    // usage[global port] = number of connections touching it
    std::map<std::pair<int, int>, int> usage;
    for (const auto& c : net.connections) {
        for (const PortRef* p : {&c.x, &c.y}) {
            if (!port_ok(*p)) {
                out.push_back({"bad-port",
                               "connection references invalid port " + describe(*p),
                               *p});
            }
        }
        if (port_ok(c.x) && port_ok(c.y)) {
            if (c.x == c.y) {
                out.push_back({"self-connection",
                               "port " + describe(c.x) + " connected to itself",
                               c.x});
                continue;
            }
            for (const PortRef* p : {&c.x, &c.y}) {
                int& u = usage[{p->element, p->port}];
                if (++u == 2)
                    out.push_back({"port-reused",
                                   "port " + describe(*p) +
                                       " appears in more than one connection",
                                   *p});
            }
        }
    }

    for (int e = 0; e < n; ++e) {
        const int pc = port_count(net.elements[e].params);
        for (int p = 0; p < pc; ++p) {
            if (!usage.count({e, p}))
                out.push_back({"unconnected-port",
                               "port " + describe({e, p}) + " is not connected",
                               {e, p}});
        }
    }
    return out;
}

FieldTable FieldTable::build(const OpticalNetwork& net) {
    FieldTable t;
    const int n = static_cast<int>(net.elements.size());
    t.offset_.resize(n);
    int total = 0;
    for (int e = 0; e < n; ++e) {
        t.offset_[e] = total;
        total += port_count(net.elements[e].params);
    }
    t.num_fields_ = total;
    t.peer_.assign(total, PortRef{});
    for (const auto& c : net.connections) {
        t.peer_[t.offset_[c.x.element] + c.x.port] = c.y;
        t.peer_[t.offset_[c.y.element] + c.y.port] = c.x;
    }
    return t;
}

} // namespace ifosim
