#ifndef IFOSIM_SOLVER_HPP
#define IFOSIM_SOLVER_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ifosim/topology.hpp"

namespace ifosim {

struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One generalized-input column group of the assembled system.
struct SlotInfo {
    enum class Kind { OpenVacuum, LossVacuum, Laser, Gw };
    Kind kind;
    int element = -1; // origin element; -1 for the shared GW slot
    int local = 0;    // element-local vacuum index
    int col = 0;      // first column in the RHS matrix
    int ncols = 2;    // 2 for vacuum/laser, 1 for GW
    bool is_vacuum() const {
        return kind == Kind::OpenVacuum || kind == Kind::LossVacuum;
    }
};

/// Index maps shared by the DC and sideband stages: field enumeration,
/// motion unknowns, and source-slot columns.
struct SystemLayout {
    FieldTable fields;
    std::vector<int> motion_of; // element -> motion unknown index, or -1
    int num_motion = 0;
    std::vector<SlotInfo> slots;
    int num_cols = 0;
    int gw_col = -1; // shared coherent GW column, -1 when absent

    int dim() const { return 2 * fields.num_fields() + num_motion; }
    int motion_row(int element) const {
        return 2 * fields.num_fields() + motion_of[element];
    }
    const SlotInfo* slot_for(int element, int local) const {
        for (const auto& s : slots)
            if (s.element == element && s.local == local && s.kind != SlotInfo::Kind::Gw)
                return &s;
        return nullptr;
    }

    static SystemLayout build(const OpticalNetwork& net);
};

/// Carrier quadrature vectors for every field, from the DC stage.
struct DcSolution {
    std::vector<CarrierVector> carriers; // per field
    double residual = 0.0;

    double power(int field) const { return carrier_power(carriers[field]); }
    double phase(int field) const { return carrier_phase(carriers[field]); }
};

/// The assembled complex block system M x = B u at one sideband frequency.
struct SidebandSystem {
    Eigen::MatrixXcd M;
    Eigen::MatrixXcd B; // one column group per source slot
    SystemLayout layout;
    double Omega = 0.0;
};

/// Transfer matrices from every source slot to every field (and motion
/// unknown): T = M^{-1} B.
struct TransferSet {
    Eigen::MatrixXcd T;
    SystemLayout layout;
    double Omega = 0.0;
    double residual = 0.0;

    /// 2 x ncols transfer block from a slot into a field.
    auto block(int field, const SlotInfo& s) const {
        return T.block(2 * field, s.col, 2, s.ncols);
    }
};

/// Solves the real DC carrier system (static rows at Omega = 0, laser rows
/// injecting the carrier). Throws SingularSystemError when the static
/// network is degenerate.
DcSolution solve_dc(const OpticalNetwork& net);

SidebandSystem assemble_sideband(const OpticalNetwork& net, const DcSolution& dc,
                                 double Omega);

TransferSet solve_sideband(const SidebandSystem& sys);

/// log |det M| at one frequency; finite everywhere except exactly at a
/// resonance. Used to locate opto-mechanical resonances.
double log_abs_determinant(const SidebandSystem& sys);

struct SweepPoint {
    double Omega = 0.0;
    std::optional<TransferSet> ts;
    std::string error; // non-empty when the point failed
};

/// Serial reference implementation of the frequency sweep.
std::vector<SweepPoint> sweep_serial(const OpticalNetwork& net, const DcSolution& dc,
                                     const std::vector<double>& Omegas);

/// OpenMP variant; produces results identical to sweep_serial (each point
/// is an independent solve) in input order.
std::vector<SweepPoint> sweep_parallel(const OpticalNetwork& net, const DcSolution& dc,
                                       const std::vector<double>& Omegas);

inline std::vector<SweepPoint> sweep(const OpticalNetwork& net, const DcSolution& dc,
                                     const std::vector<double>& Omegas,
                                     bool parallel = true) {
    return parallel ? sweep_parallel(net, dc, Omegas) : sweep_serial(net, dc, Omegas);
}

} // namespace ifosim

#endif
