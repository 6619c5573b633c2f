#ifndef IFOSIM_CONFIG_HPP
#define IFOSIM_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ifosim/detection.hpp"
#include "ifosim/topology.hpp"

namespace ifosim {

/// Configuration failure with a machine-readable code:
///   "io"       file not readable
///   "parse"    malformed document
///   "schema"   wrong structure, type, or value
///   "topology" network-level violation (details carry the diagnostics)
struct ConfigError : std::runtime_error {
    ConfigError(std::string code_, const std::string& message)
        : std::runtime_error(message), code(std::move(code_)) {}
    std::string code;
};

struct SweepGrid {
    double start_hz = 1.0;
    double stop_hz = 1.0;
    int points = 1;
    bool log_scale = true;
};

/// Frequencies in Hz, ascending, endpoints included.
std::vector<double> frequency_grid_hz(const SweepGrid& g);

struct RunConfig {
    OpticalNetwork net;
    HomodyneSettings detection;
    SweepGrid sweep;
};

/// Parses and fully validates a configuration document. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Inverse of parse_config: parse_config(serialize_config(c)) rebuilds an
/// identical configuration.
nlohmann::json serialize_config(const RunConfig& c);

/// One output row of a sweep. A non-empty error marks a failed point; its
/// numeric columns are written as nan.
struct SpectraRecord {
    double frequency_hz = 0.0;
    double nq2_darkport = 0.0;
    double nq2_losses = 0.0;
    double nl2_amplitude = 0.0;
    double nl2_phase = 0.0;
    double abs_H = 0.0;
    double s_h = 0.0;
    std::string error;
};

/// Computes the record for one solved sweep point.
SpectraRecord make_record(const RunConfig& cfg, const DcSolution& dc,
                          const SweepPoint& pt);

/// Deterministic CSV: '#'-prefixed metadata lines, a header row, then one
/// row per record with 12 significant digits.
void write_spectra_csv(std::ostream& os, const RunConfig& cfg,
                       std::uint64_t config_hash,
                       const std::vector<SpectraRecord>& records);

/// FNV-1a over the raw document bytes, for the CSV provenance line.
std::uint64_t fnv1a(const std::string& bytes);

inline constexpr const char* tool_version = "1.0.0";

} // namespace ifosim

#endif
