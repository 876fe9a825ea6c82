#pragma once

#include <Eigen/Dense>

#include "blink/geometry.hpp"

namespace blink {

/// Diffusivity psi(h) of the flux q = -psi(h) grad h.
struct FluxModel {
    enum class Kind { LinearHeat, PorousLinear, ThinFilmAnalog };
    Kind kind = Kind::LinearHeat;
    double kappa = 1.0; // diffusivity (LinearHeat) or interpolation weight (PorousLinear)
    double A = 1.0;     // film coefficients, ThinFilmAnalog only
    double B = 0.0;

    static FluxModel linear_heat(double kappa);
    static FluxModel porous_linear(double kappa);
    static FluxModel thin_film(double A, double B);
};

/// psi(h) for the given variant. ThinFilmAnalog throws
/// NonpositiveThicknessError for h <= 0.
double psi_eval(const FluxModel& fm, double h);

/// Free-space Gaussian kernel (4 pi kappa t)^-1 exp(-(x^2+y^2)/(4 kappa t)),
/// an exact solution of h_t = kappa lap h. Requires t > 0.
double heat_kernel(double t, double x, double y, double kappa);

struct BoundaryCondition {
    enum class Kind { DirichletHeatKernel, NoFlux };
    Kind kind = Kind::NoFlux;
    // DirichletHeatKernel data: source offset in time and space, diffusivity.
    double t0 = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double kappa = 1.0;

    static BoundaryCondition dirichlet_heat_kernel(double t0, double x0, double y0, double kappa);
    static BoundaryCondition no_flux();
};

/// 0/1 indicator matrices: B marks boundary nodes (first/last rows and
/// columns), Bprime its complement. B + Bprime is the all-ones matrix.
struct BoundaryMasks {
    Eigen::MatrixXd B, Bprime;
    static BoundaryMasks make(int nx, int ny);
};

/// Interior evolution rate of the transformed PDE on the computational
/// square: the diffusive term assembled through the maps plus the
/// lid-advection correction. The sign realizes h_t = kappa lap h for the
/// LinearHeat variant.
Eigen::MatrixXd rhs_phi(const Eigen::MatrixXd& H, double t, const MappedGrid& mg,
                        const FluxModel& fm, const LidMotion& lm);

/// R = H - W, W sampled from the heat kernel at the grid's physical points.
Eigen::MatrixXd dirichlet_residual(const Eigen::MatrixXd& H, double t, const MappedGrid& mg,
                                   const BoundaryCondition& bc);

/// Mass-conserving flux condition, boundary rows/columns only:
///   left/right truncation edges: Re(Gtilde)         (corners included)
///   bottom edge:                 Im(Gtilde)
///   moving top edge:             psi .* |E| .* Im(Gtilde) + lambda_dot |F| .* H
/// Interior entries are zero.
Eigen::MatrixXd noflux_residual(const Eigen::MatrixXd& H, const Eigen::MatrixXcd& Gtilde,
                                double t, const MappedGrid& mg, const FluxModel& fm,
                                const LidMotion& lm);

/// Full index-1 DAE residual Bprime.*(Hdot - Phi(H)) + B.*R.
Eigen::MatrixXd dae_residual(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Hdot, double t,
                             const MappedGrid& mg, const FluxModel& fm, const LidMotion& lm,
                             const BoundaryCondition& bc, const BoundaryMasks& masks);

/// Semi-discrete diffusion problem on the blinking eye domain with the flat
/// vector interface the DAE integrator consumes. Geometry is recomputed from
/// the analytic formulas at every residual evaluation. One instance per
/// concurrent integration; instances share nothing.
class EyeDiffusionDae {
public:
    EyeDiffusionDae(int nx, int ny, StripMap sm, LidMotion lm, FluxModel fm,
                    BoundaryCondition bc);

    int nx() const { return gx_.n; }
    int ny() const { return gy_.n; }
    int size() const { return gx_.n * gy_.n; }

    const ChebGrid1D& grid_x() const { return gx_; }
    const ChebGrid1D& grid_y() const { return gy_; }
    const BoundaryMasks& masks() const { return masks_; }
    const StripMap& strip_map() const { return sm_; }
    const LidMotion& lid() const { return lm_; }
    const FluxModel& flux() const { return fm_; }
    const BoundaryCondition& boundary() const { return bc_; }

    /// vec(Bprime): 1 on differential (interior) unknowns, 0 on algebraic ones.
    Eigen::VectorXd mass_diagonal() const;

    /// Fresh geometry snapshot at time t.
    MappedGrid grid_at(double t) const;

    void residual(const Eigen::VectorXd& u, const Eigen::VectorXd& udot, double t,
                  Eigen::VectorXd& out) const;

private:
    ChebGrid1D gx_, gy_;
    StripMap sm_;
    LidMotion lm_;
    FluxModel fm_;
    BoundaryCondition bc_;
    BoundaryMasks masks_;
    mutable MappedGrid work_; // per-evaluation geometry; not thread-safe
};

} // namespace blink
