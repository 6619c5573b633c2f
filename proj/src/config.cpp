#include "ifosim/config.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ifosim/solver.hpp"

using nlohmann::json;

namespace ifosim {

std::vector<double> frequency_grid_hz(const SweepGrid& g) {
    std::vector<double> f(g.points);
    if (g.points == 1) {
        f[0] = g.start_hz;
        return f;
    }
    for (int i = 0; i < g.points; ++i) {
        const double t = static_cast<double>(i) / (g.points - 1);
        f[i] = g.log_scale
                   ? g.start_hz * std::pow(g.stop_hz / g.start_hz, t)
                   : g.start_hz + (g.stop_hz - g.start_hz) * t;
    }
    f.front() = g.start_hz;
    f.back() = g.stop_hz;
    return f;
}

namespace {

[[noreturn]] void schema_error(const std::string& msg) {
    throw ConfigError("schema", msg);
}

double num(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key)) schema_error(ctx + ": missing required key '" + key + "'");
    if (!j.at(key).is_number()) schema_error(ctx + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

double num_or(const json& j, const std::string& key, double dflt, const std::string& ctx) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number()) schema_error(ctx + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

bool flag_or(const json& j, const std::string& key, bool dflt, const std::string& ctx) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_boolean()) schema_error(ctx + ": '" + key + "' must be a boolean");
    return j.at(key).get<bool>();
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            schema_error(ctx + ": unknown key '" + it.key() + "'");
}

/// Completes (rho, tau) from whichever of rho / tau / transmission is given,
/// holding rho^2 + tau^2 + loss = 1.
void resolve_rt(const json& j, double loss, double& rho, double& tau,
                const std::string& ctx, bool default_5050) {
    const bool has_rho = j.contains("rho");
    const bool has_tau = j.contains("tau");
    const bool has_T = j.contains("transmission");
    if (has_tau && has_T) schema_error(ctx + ": give either 'tau' or 'transmission'");
    if (has_rho && (has_tau || has_T)) {
        rho = num(j, "rho", ctx);
        tau = has_tau ? num(j, "tau", ctx) : std::sqrt(num(j, "transmission", ctx));
        return;
    }
    if (has_rho) {
        rho = num(j, "rho", ctx);
        const double t2 = 1.0 - loss - rho * rho;
        if (t2 < -1e-12) schema_error(ctx + ": rho^2 + loss exceeds 1");
        tau = std::sqrt(std::max(t2, 0.0));
        return;
    }
    if (has_tau || has_T) {
        tau = has_tau ? num(j, "tau", ctx) : std::sqrt(num(j, "transmission", ctx));
        const double r2 = 1.0 - loss - tau * tau;
        if (r2 < -1e-12) schema_error(ctx + ": tau^2 + loss exceeds 1");
        rho = std::sqrt(std::max(r2, 0.0));
        return;
    }
    if (default_5050) {
        rho = tau = std::sqrt(std::max(1.0 - loss, 0.0) / 2.0);
        return;
    }
    schema_error(ctx + ": one of 'rho', 'tau', 'transmission' is required");
}

LaserNoiseModel parse_noise(const json& j, const std::string& ctx) {
    check_keys(j, {"s11", "s22", "s12", "rin_per_rtHz", "frequency_noise_hz_per_rtHz"},
               ctx);
    LaserNoiseModel n;
    n.s11 = num_or(j, "s11", 0.0, ctx);
    n.s22 = num_or(j, "s22", 0.0, ctx);
    n.s12 = num_or(j, "s12", 0.0, ctx);
    n.rin_per_rtHz = num_or(j, "rin_per_rtHz", 0.0, ctx);
    n.freq_noise_hz_per_rtHz = num_or(j, "frequency_noise_hz_per_rtHz", 0.0, ctx);
    return n;
}

Element parse_element(const json& j) {
    if (!j.is_object()) schema_error("elements: each entry must be an object");
    if (!j.contains("name") || !j.at("name").is_string())
        schema_error("elements: each entry needs a string 'name'");
    const std::string name = j.at("name").get<std::string>();
    const std::string ctx = "element '" + name + "'";
    if (!j.contains("type") || !j.at("type").is_string())
        schema_error(ctx + ": missing string 'type'");
    const std::string type = j.at("type").get<std::string>();

    Element e{name, BlockParams{}};
    if (type == "mirror" || type == "beamsplitter") {
        check_keys(j, {"name", "type", "rho", "tau", "transmission", "loss",
                       "mass_kg", "movable"}, ctx);
        const double loss = num_or(j, "loss", 0.0, ctx);
        double rho = 0.0, tau = 0.0;
        resolve_rt(j, loss, rho, tau, ctx, /*default_5050=*/type == "beamsplitter");
        const double mass = num_or(j, "mass_kg", 0.0, ctx);
        const bool movable = flag_or(j, "movable", false, ctx);
        if (type == "mirror")
            e.params = MirrorParams{rho, tau, loss, mass, movable};
        else
            e.params = BeamsplitterParams{rho, tau, loss, mass, movable};
    } else if (type == "propagator") {
        check_keys(j, {"name", "type", "length_m", "detuning_rad", "gw_eta"}, ctx);
        PropagatorParams p;
        p.length_L = num_or(j, "length_m", 0.0, ctx);
        p.carrier_phase_Theta = num_or(j, "detuning_rad", 0.0, ctx);
        if (j.contains("gw_eta")) {
            p.gw_eta = num(j, "gw_eta", ctx);
            p.gw_coupled = true;
        }
        e.params = p;
    } else if (type == "squeezer") {
        check_keys(j, {"name", "type", "r", "phi"}, ctx);
        e.params = SqueezerParams{num_or(j, "r", 0.0, ctx), num_or(j, "phi", 0.0, ctx)};
    } else if (type == "laser") {
        check_keys(j, {"name", "type", "power_w", "phase_rad", "noise"}, ctx);
        LaserParams p;
        p.power = num(j, "power_w", ctx);
        p.phase = num_or(j, "phase_rad", 0.0, ctx);
        if (j.contains("noise")) p.noise = parse_noise(j.at("noise"), ctx + " noise");
        e.params = p;
    } else if (type == "block") {
        check_keys(j, {"name", "type"}, ctx);
        e.params = BlockParams{};
    } else if (type == "photodetector") {
        check_keys(j, {"name", "type"}, ctx);
        e.params = PhotodetectorParams{};
    } else {
        schema_error(ctx + ": unknown type '" + type + "'");
    }
    return e;
}

PortRef parse_port(const OpticalNetwork& net, const std::string& s) {
    const auto dot = s.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= s.size())
        schema_error("connections: '" + s + "' is not of the form name.port");
    const std::string name = s.substr(0, dot);
    const int element = net.find(name);
    if (element < 0)
        schema_error("connections: unknown element '" + name + "'");
    int port = -1;
    try {
        std::size_t used = 0;
        port = std::stoi(s.substr(dot + 1), &used);
        if (used != s.size() - dot - 1) port = -1;
    } catch (...) {
    }
    if (port < 0)
        schema_error("connections: bad port number in '" + s + "'");
    return {element, port};
}

std::string port_name(const OpticalNetwork& net, PortRef p) {
    return net.elements[p.element].name + "." + std::to_string(p.port);
}

} // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) schema_error("top level must be an object");
    check_keys(doc, {"wavelength_nm", "elements", "connections", "detection", "sweep"},
               "top level");

    RunConfig cfg;
    cfg.net.wavelength_m = num_or(doc, "wavelength_nm", 1064.0, "top level") * 1e-9;
    if (!(cfg.net.wavelength_m > 0)) schema_error("wavelength_nm must be positive");

    if (!doc.contains("elements") || !doc.at("elements").is_array())
        schema_error("'elements' array is required");
    for (const auto& je : doc.at("elements")) {
        Element e = parse_element(je);
        if (cfg.net.find(e.name) >= 0)
            schema_error("duplicate element name '" + e.name + "'");
        cfg.net.add(std::move(e));
    }

    if (!doc.contains("connections") || !doc.at("connections").is_array())
        schema_error("'connections' array is required");
    for (const auto& jc : doc.at("connections")) {
        if (!jc.is_array() || jc.size() != 2 || !jc[0].is_string() || !jc[1].is_string())
            schema_error("connections: each entry must be [\"a.port\", \"b.port\"]");
        const PortRef x = parse_port(cfg.net, jc[0].get<std::string>());
        const PortRef y = parse_port(cfg.net, jc[1].get<std::string>());
        cfg.net.connections.push_back({x, y});
    }

    const auto diags = validate(cfg.net);
    if (!diags.empty()) {
        std::ostringstream msg;
        for (std::size_t i = 0; i < diags.size(); ++i)
            msg << (i ? "\n" : "") << diags[i].code << ": " << diags[i].message;
        throw ConfigError("topology", msg.str());
    }

    if (!doc.contains("detection") || !doc.at("detection").is_object())
        schema_error("'detection' object is required");
    const json& jd = doc.at("detection");
    check_keys(jd, {"detector", "zeta"}, "detection");
    if (!jd.contains("detector") || !jd.at("detector").is_string())
        schema_error("detection: string 'detector' is required");
    cfg.detection.detector_element = cfg.net.find(jd.at("detector").get<std::string>());
    if (cfg.detection.detector_element < 0)
        schema_error("detection: unknown element '" +
                     jd.at("detector").get<std::string>() + "'");
    if (!std::holds_alternative<PhotodetectorParams>(
            cfg.net.elements[cfg.detection.detector_element].params))
        schema_error("detection: detector must be a photodetector");
    if (jd.contains("zeta")) {
        if (jd.at("zeta").is_string()) {
            if (jd.at("zeta").get<std::string>() != "carrier")
                schema_error("detection: zeta must be a number or \"carrier\"");
            cfg.detection.zeta_from_carrier = true;
        } else if (jd.at("zeta").is_number()) {
            cfg.detection.zeta = jd.at("zeta").get<double>();
        } else {
            schema_error("detection: zeta must be a number or \"carrier\"");
        }
    } else {
        cfg.detection.zeta_from_carrier = true;
    }

    if (!doc.contains("sweep") || !doc.at("sweep").is_object())
        schema_error("'sweep' object is required");
    const json& js = doc.at("sweep");
    check_keys(js, {"start_hz", "stop_hz", "points", "scale"}, "sweep");
    cfg.sweep.start_hz = num(js, "start_hz", "sweep");
    cfg.sweep.stop_hz = num_or(js, "stop_hz", cfg.sweep.start_hz, "sweep");
    const double pts = num_or(js, "points", 1.0, "sweep");
    cfg.sweep.points = static_cast<int>(pts);
    if (cfg.sweep.points < 1 || pts != cfg.sweep.points)
        schema_error("sweep: points must be a positive integer");
    if (js.contains("scale")) {
        const std::string sc = js.at("scale").is_string()
                                   ? js.at("scale").get<std::string>()
                                   : std::string();
        if (sc == "log")
            cfg.sweep.log_scale = true;
        else if (sc == "lin")
            cfg.sweep.log_scale = false;
        else
            schema_error("sweep: scale must be \"log\" or \"lin\"");
    }
    if (!(cfg.sweep.start_hz > 0) || cfg.sweep.stop_hz < cfg.sweep.start_hz)
        schema_error("sweep: need 0 < start_hz <= stop_hz");

    bool any_movable = false;
    for (const auto& e : cfg.net.elements) any_movable |= is_movable(e.params);
    if (any_movable && !(cfg.sweep.start_hz > 0))
        schema_error("sweep: start_hz must be positive when elements are movable");

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("io", "cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ConfigError("parse", std::string("'") + path + "': " + ex.what());
    }
    return parse_config(doc);
}

json serialize_config(const RunConfig& c) {
    json doc;
    doc["wavelength_nm"] = c.net.wavelength_m * 1e9;
    json elems = json::array();
    for (const auto& e : c.net.elements) {
        json je;
        je["name"] = e.name;
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, MirrorParams> ||
                              std::is_same_v<P, BeamsplitterParams>) {
                    je["type"] = std::is_same_v<P, MirrorParams> ? "mirror"
                                                                 : "beamsplitter";
                    je["rho"] = p.rho;
                    je["tau"] = p.tau;
                    je["loss"] = p.loss_A;
                    if (p.movable) {
                        je["mass_kg"] = p.mass;
                        je["movable"] = true;
                    }
                } else if constexpr (std::is_same_v<P, PropagatorParams>) {
                    je["type"] = "propagator";
                    je["length_m"] = p.length_L;
                    je["detuning_rad"] = p.carrier_phase_Theta;
                    if (p.gw_coupled) je["gw_eta"] = p.gw_eta;
                } else if constexpr (std::is_same_v<P, SqueezerParams>) {
                    je["type"] = "squeezer";
                    je["r"] = p.r;
                    je["phi"] = p.phi;
                } else if constexpr (std::is_same_v<P, LaserParams>) {
                    je["type"] = "laser";
                    je["power_w"] = p.power;
                    je["phase_rad"] = p.phase;
                    json jn;
                    if (p.noise.s11 != 0) jn["s11"] = p.noise.s11;
                    if (p.noise.s22 != 0) jn["s22"] = p.noise.s22;
                    if (p.noise.s12 != 0) jn["s12"] = p.noise.s12;
                    if (p.noise.rin_per_rtHz != 0)
                        jn["rin_per_rtHz"] = p.noise.rin_per_rtHz;
                    if (p.noise.freq_noise_hz_per_rtHz != 0)
                        jn["frequency_noise_hz_per_rtHz"] =
                            p.noise.freq_noise_hz_per_rtHz;
                    if (!jn.empty()) je["noise"] = jn;
                } else if constexpr (std::is_same_v<P, BlockParams>) {
                    je["type"] = "block";
                } else {
                    je["type"] = "photodetector";
                }
            },
            e.params);
        elems.push_back(std::move(je));
    }
    doc["elements"] = std::move(elems);

    json conns = json::array();
    for (const auto& cn : c.net.connections)
        conns.push_back({port_name(c.net, cn.x), port_name(c.net, cn.y)});
    doc["connections"] = std::move(conns);

    json jd;
    jd["detector"] = c.net.elements[c.detection.detector_element].name;
    if (c.detection.zeta_from_carrier)
        jd["zeta"] = "carrier";
    else
        jd["zeta"] = c.detection.zeta;
    doc["detection"] = std::move(jd);

    json js;
    js["start_hz"] = c.sweep.start_hz;
    js["stop_hz"] = c.sweep.stop_hz;
    js["points"] = c.sweep.points;
    js["scale"] = c.sweep.log_scale ? "log" : "lin";
    doc["sweep"] = std::move(js);
    return doc;
}

SpectraRecord make_record(const RunConfig& cfg, const DcSolution& dc,
                          const SweepPoint& pt) {
    SpectraRecord r;
    r.frequency_hz = pt.Omega / (2.0 * M_PI);
    if (!pt.ts) {
        r.error = pt.error.empty() ? "solve failed" : pt.error;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        r.nq2_darkport = r.nq2_losses = r.nl2_amplitude = r.nl2_phase = nan;
        r.abs_H = r.s_h = nan;
        return r;
    }
    const TransferSet& ts = *pt.ts;
    const int det = cfg.detection.detector_element;
    const double zeta = resolve_zeta(cfg.detection, ts.layout, dc);
    const int field = detected_field(ts.layout, det);

    r.nq2_darkport = quantum_noise_filtered(ts, field, zeta, [](const SlotInfo& s) {
        return s.kind == SlotInfo::Kind::OpenVacuum;
    });
    r.nq2_losses = quantum_noise_filtered(ts, field, zeta, [](const SlotInfo& s) {
        return s.kind == SlotInfo::Kind::LossVacuum;
    });

    auto spectral_part = [&](bool amplitude) {
        return [&, amplitude](int laser_element) {
            const auto& lp = std::get<LaserParams>(
                cfg.net.elements[laser_element].params);
            const double rate = lp.power / (constants::hbar * cfg.net.omega0());
            Mat2 s = lp.noise.spectral_matrix(ts.Omega, rate);
            Mat2 part = Mat2::Zero();
            if (amplitude)
                part(0, 0) = s(0, 0);
            else
                part(1, 1) = s(1, 1);
            return part;
        };
    };
    r.nl2_amplitude = laser_noise(ts, field, zeta, spectral_part(true));
    r.nl2_phase = laser_noise(ts, field, zeta, spectral_part(false));

    const std::complex<double> h = gw_transfer(ts, field, zeta);
    r.abs_H = std::abs(h);
    r.s_h = strain_noise(r.nq2_darkport + r.nq2_losses,
                         r.nl2_amplitude + r.nl2_phase, h);
    return r;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {
std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}
} // namespace

void write_spectra_csv(std::ostream& os, const RunConfig& cfg,
                       std::uint64_t config_hash,
                       const std::vector<SpectraRecord>& records) {
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    os << "# tool_version=" << tool_version << "\n";
    os << "# config_fnv1a=" << hash << "\n";
    os << "# detector=" << cfg.net.elements[cfg.detection.detector_element].name
       << "\n";
    os << "frequency_hz,nq2_darkport,nq2_losses,nl2_amplitude,nl2_phase,abs_H,"
          "s_h,error\n";
    for (const auto& r : records) {
        os << fmt12(r.frequency_hz) << ',' << fmt12(r.nq2_darkport) << ','
           << fmt12(r.nq2_losses) << ',' << fmt12(r.nl2_amplitude) << ','
           << fmt12(r.nl2_phase) << ',' << fmt12(r.abs_H) << ',' << fmt12(r.s_h)
           << ',';
        for (char ch : r.error) os << (ch == ',' || ch == '\n' ? ';' : ch);
        os << "\n";
    }
}

} // namespace ifosim
