#include "ifosim/solver.hpp"

#include <Eigen/LU>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ifosim {

SystemLayout SystemLayout::build(const OpticalNetwork& net) {
    SystemLayout l;
    l.fields = FieldTable::build(net);
    const int n = static_cast<int>(net.elements.size());
    l.motion_of.assign(n, -1);
    bool any_gw = false;
    for (int e = 0; e < n; ++e) {
        const auto& p = net.elements[e].params;
        if (is_movable(p)) l.motion_of[e] = l.num_motion++;
        const int nv = vacuum_slot_count(p);
        const bool open = std::holds_alternative<BlockParams>(p) ||
                          std::holds_alternative<PhotodetectorParams>(p) ||
                          std::holds_alternative<LaserParams>(p);
        for (int k = 0; k < nv; ++k) {
            l.slots.push_back({open ? SlotInfo::Kind::OpenVacuum
                                    : SlotInfo::Kind::LossVacuum,
                               e, k, l.num_cols, 2});
            l.num_cols += 2;
        }
        if (std::holds_alternative<LaserParams>(p)) {
            l.slots.push_back({SlotInfo::Kind::Laser, e, 0, l.num_cols, 2});
            l.num_cols += 2;
        }
        if (auto* pr = std::get_if<PropagatorParams>(&p); pr && pr->gw_coupled)
            any_gw = true;
    }
    if (any_gw) {
        l.gw_col = l.num_cols;
        l.slots.push_back({SlotInfo::Kind::Gw, -1, 0, l.num_cols, 1});
        l.num_cols += 1;
    }
    return l;
}

namespace {

// Row sink writing one element's equations into the global system. The -1
// diagonal of every row is placed here, once per begin_*.
class SystemBuilder {
  public:
    SystemBuilder(const OpticalNetwork& net, const SystemLayout& layout,
                  bool dc_stage, int dim, int ncols)
        : net_(net), layout_(layout), dc_(dc_stage),
          M(Eigen::MatrixXcd::Zero(dim, dim)),
          B(Eigen::MatrixXcd::Zero(dim, ncols)),
          dc_rhs(Eigen::VectorXd::Zero(dim)) {}

    void set_element(int e) { elem_ = e; }

    void begin_output(int port) {
        row_ = 2 * layout_.fields.outgoing(elem_, port);
        M(row_, row_) = -1.0;
        M(row_ + 1, row_ + 1) = -1.0;
        motion_ = false;
    }
    void begin_motion() {
        row_ = layout_.motion_row(elem_);
        M(row_, row_) = -1.0;
        motion_ = true;
    }
    void coef_in(int port, const Mat2c& m) {
        M.block<2, 2>(row_, 2 * layout_.fields.incoming(elem_, port)) += m;
    }
    void coef_motion(const QuadVector& g) {
        M.block<2, 1>(row_, layout_.motion_row(elem_)) += g;
    }
    void motion_in(int port, const Eigen::RowVector2cd& r) {
        M.block<1, 2>(row_, 2 * layout_.fields.incoming(elem_, port)) += r;
    }
    void motion_out(int port, const Eigen::RowVector2cd& r) {
        M.block<1, 2>(row_, 2 * layout_.fields.outgoing(elem_, port)) += r;
    }
    void source_vacuum(int k, const Mat2c& m) {
        if (dc_) return;
        const SlotInfo* s = layout_.slot_for(elem_, k);
        B.block<2, 2>(row_, s->col) += -m;
    }
    void source_laser(const Mat2c& m) {
        if (dc_) return;
        const SlotInfo* s = laser_slot(elem_);
        B.block<2, 2>(row_, s->col) += -m;
    }
    void source_gw(const QuadVector& g) {
        if (dc_) return;
        B.block<2, 1>(row_, layout_.gw_col) += -g;
    }
    void source_carrier(const CarrierVector& d) {
        if (!dc_) return;
        dc_rhs.segment<2>(row_) += -d;
    }

    const OpticalNetwork& net_;
    const SystemLayout& layout_;
    bool dc_;
    Eigen::MatrixXcd M, B;
    Eigen::VectorXd dc_rhs;

  private:
    const SlotInfo* laser_slot(int e) const {
        for (const auto& s : layout_.slots)
            if (s.kind == SlotInfo::Kind::Laser && s.element == e) return &s;
        return nullptr;
    }

    int elem_ = -1;
    int row_ = 0;
    bool motion_ = false;
};

TwoPortCarriers two_port_carriers(const SystemLayout& l, const DcSolution* dc, int e) {
    TwoPortCarriers c;
    if (dc) {
        c.in0 = dc->carriers[l.fields.incoming(e, 0)];
        c.out0 = dc->carriers[l.fields.outgoing(e, 0)];
        c.in1 = dc->carriers[l.fields.incoming(e, 1)];
        c.out1 = dc->carriers[l.fields.outgoing(e, 1)];
    }
    return c;
}

BeamsplitterCarriers bs_carriers(const SystemLayout& l, const DcSolution* dc, int e) {
    BeamsplitterCarriers c;
    if (dc) {
        for (int q = 0; q < 4; ++q) {
            c.in[q] = dc->carriers[l.fields.incoming(e, q)];
            c.out[q] = dc->carriers[l.fields.outgoing(e, q)];
        }
    }
    return c;
}

// Emits all rows; dc == nullptr selects the DC stage (static rows only).
void assemble(const OpticalNetwork& net, const SystemLayout& layout,
              const DcSolution* dc, double Omega, SystemBuilder& b) {
    const double omega0 = net.omega0();
    for (int e = 0; e < static_cast<int>(net.elements.size()); ++e) {
        b.set_element(e);
        const auto& p = net.elements[e].params;
        if (auto* m = std::get_if<MirrorParams>(&p)) {
            if (dc && m->movable)
                mirror_rp_rows(*m, two_port_carriers(layout, dc, e), Omega, omega0, b);
            else
                mirror_static_rows(*m, b);
        } else if (auto* bs = std::get_if<BeamsplitterParams>(&p)) {
            if (dc && bs->movable)
                beamsplitter_rp_rows(*bs, bs_carriers(layout, dc, e), Omega, omega0, b);
            else
                beamsplitter_static_rows(*bs, b);
        } else if (auto* pr = std::get_if<PropagatorParams>(&p)) {
            propagator_rows(*pr, two_port_carriers(layout, dc, e), Omega, omega0, b);
        } else if (auto* sq = std::get_if<SqueezerParams>(&p)) {
            squeezer_rows(*sq, b);
        } else {
            endpoint_rows(p, b);
        }
    }
}

} // namespace

DcSolution solve_dc(const OpticalNetwork& net) {
    SystemLayout layout = SystemLayout::build(net);
    const int dim = 2 * layout.fields.num_fields();
    SystemBuilder b(net, layout, /*dc_stage=*/true, dim, 1);
    assemble(net, layout, nullptr, 0.0, b);

    const Eigen::MatrixXd M = b.M.real();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const double scale = M.cwiseAbs().maxCoeff();
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(pivot_min > 1e-13 * scale))
        throw SingularSystemError(
            "DC carrier system is singular (closed lossless resonator?)");

    const Eigen::VectorXd x = lu.solve(b.dc_rhs);

    DcSolution dc;
    dc.carriers.resize(layout.fields.num_fields());
    for (int f = 0; f < layout.fields.num_fields(); ++f)
        dc.carriers[f] = x.segment<2>(2 * f);
    const double rhs_norm = b.dc_rhs.norm();
    dc.residual = rhs_norm > 0 ? (M * x - b.dc_rhs).norm() / rhs_norm
                               : (M * x).norm();
    return dc;
}

SidebandSystem assemble_sideband(const OpticalNetwork& net, const DcSolution& dc,
                                 double Omega) {
    SidebandSystem sys;
    sys.layout = SystemLayout::build(net);
    sys.Omega = Omega;
    if (Omega == 0.0 && sys.layout.num_motion > 0)
        throw std::invalid_argument(
            "Omega = 0 is not a valid sideband frequency for networks with "
            "movable elements (free-mass response diverges)");
    SystemBuilder b(net, sys.layout, /*dc_stage=*/false, sys.layout.dim(),
                    std::max(sys.layout.num_cols, 1));
    assemble(net, sys.layout, &dc, Omega, b);
    sys.M = std::move(b.M);
    sys.B = std::move(b.B);
    return sys;
}

TransferSet solve_sideband(const SidebandSystem& sys) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.M);
    const double scale = sys.M.cwiseAbs().maxCoeff();
    const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(pivot_min > 1e-13 * scale))
        throw SingularSystemError(
            "sideband system is singular at Omega = " + std::to_string(sys.Omega) +
            " rad/s (opto-mechanical or optical resonance)");

    TransferSet ts;
    ts.layout = sys.layout;
    ts.Omega = sys.Omega;
    ts.T = lu.solve(sys.B);
    const double bnorm = sys.B.norm();
    ts.residual = bnorm > 0 ? (sys.M * ts.T - sys.B).norm() / bnorm : 0.0;
    return ts;
}

double log_abs_determinant(const SidebandSystem& sys) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.M);
    double ld = 0.0;
    for (int i = 0; i < sys.M.rows(); ++i)
        ld += std::log(std::abs(lu.matrixLU()(i, i)));
    return ld;
}

std::vector<SweepPoint> sweep_serial(const OpticalNetwork& net, const DcSolution& dc,
                                     const std::vector<double>& Omegas) {
    std::vector<SweepPoint> out(Omegas.size());
    for (std::size_t i = 0; i < Omegas.size(); ++i) {
        out[i].Omega = Omegas[i];
        try {
            out[i].ts = solve_sideband(assemble_sideband(net, dc, Omegas[i]));
        } catch (const std::exception& ex) {
            out[i].error = ex.what();
        }
    }
    return out;
}

std::vector<SweepPoint> sweep_parallel(const OpticalNetwork& net, const DcSolution& dc,
                                       const std::vector<double>& Omegas) {
    std::vector<SweepPoint> out(Omegas.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(Omegas.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i].Omega = Omegas[i];
        try {
            out[i].ts = solve_sideband(assemble_sideband(net, dc, Omegas[i]));
        } catch (const std::exception& ex) {
            out[i].error = ex.what();
        }
    }
    return out;
}

} // namespace ifosim
