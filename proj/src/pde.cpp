#include "blink/pde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "blink/errors.hpp"

namespace blink {

FluxModel FluxModel::linear_heat(double kappa) {
    if (!(kappa > 0.0))
        throw std::invalid_argument("LinearHeat: kappa must be positive");
    return {Kind::LinearHeat, kappa, 1.0, 0.0};
}

FluxModel FluxModel::porous_linear(double kappa) {
    if (!(kappa > 0.0) || kappa > 1.0)
        throw std::invalid_argument("PorousLinear: kappa must lie in (0, 1]");
    return {Kind::PorousLinear, kappa, 1.0, 0.0};
}

FluxModel FluxModel::thin_film(double A, double B) {
    if (!(A > 0.0) || B < 0.0)
        throw std::invalid_argument("ThinFilmAnalog: requires A > 0 and B >= 0");
    return {Kind::ThinFilmAnalog, 1.0, A, B};
}

double psi_eval(const FluxModel& fm, double h) {
    switch (fm.kind) {
    case FluxModel::Kind::LinearHeat:
        return fm.kappa;
    case FluxModel::Kind::PorousLinear:
        return (1.0 - fm.kappa) * h + fm.kappa;
    case FluxModel::Kind::ThinFilmAnalog:
        if (!(h > 0.0))
            throw NonpositiveThicknessError(h);
        return fm.A - fm.B / (h * h * h);
    }
    throw std::logic_error("psi_eval: unknown flux variant");
}

double heat_kernel(double t, double x, double y, double kappa) {
    if (!(t > 0.0))
        throw std::domain_error("heat_kernel: t must be positive");
    const double four_kt = 4.0 * kappa * t;
    return std::exp(-(x * x + y * y) / four_kt) / (std::numbers::pi * four_kt);
}

BoundaryCondition BoundaryCondition::dirichlet_heat_kernel(double t0, double x0, double y0,
                                                           double kappa) {
    if (!(t0 > 0.0))
        throw std::invalid_argument("DirichletHeatKernel: t0 must be positive");
    return {Kind::DirichletHeatKernel, t0, x0, y0, kappa};
}

BoundaryCondition BoundaryCondition::no_flux() { return {Kind::NoFlux, 0.0, 0.0, 0.0, 1.0}; }

BoundaryMasks BoundaryMasks::make(int nx, int ny) {
    if (nx < 3 || ny < 3)
        throw std::invalid_argument("boundary masks need at least a 3x3 grid");
    BoundaryMasks m;
    m.B = Eigen::MatrixXd::Zero(nx, ny);
    m.B.row(0).setOnes();
    m.B.row(nx - 1).setOnes();
    m.B.col(0).setOnes();
    m.B.col(ny - 1).setOnes();
    m.Bprime = Eigen::MatrixXd::Ones(nx, ny) - m.B;
    return m;
}

namespace {

Eigen::MatrixXd psi_matrix(const FluxModel& fm, const Eigen::MatrixXd& H) {
    Eigen::MatrixXd P(H.rows(), H.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i)
            P(i, j) = psi_eval(fm, H(i, j));
    return P;
}

/// Shared assembly: Phi(H) with the strip gradient as a by-product.
Eigen::MatrixXd phi_impl(const Eigen::MatrixXd& H, const MappedGrid& mg, const FluxModel& fm,
                         const Eigen::MatrixXd& Dy_hat, const Eigen::VectorXd& yhat,
                         Eigen::MatrixXcd* Gtilde_out) {
    const Eigen::MatrixXd Hx = mg.Dx_tilde * H;
    const Eigen::MatrixXd Hy_hat = H * Dy_hat.transpose();
    const double cy = 2.0 / (mg.lambda + 1.0);
    const Eigen::MatrixXd Hy = cy * Hy_hat;

    if (Gtilde_out) {
        Gtilde_out->resize(H.rows(), H.cols());
        Gtilde_out->real() = Hx;
        Gtilde_out->imag() = Hy;
    }

    const Eigen::MatrixXd Er = mg.E.real();
    const Eigen::MatrixXd Ei = mg.E.imag();
    // G = conj(E) .* Gtilde, Q = -Psi .* G
    const Eigen::MatrixXd P = psi_matrix(fm, H);
    const Eigen::MatrixXd Qr = -P.cwiseProduct(Er.cwiseProduct(Hx) + Ei.cwiseProduct(Hy));
    const Eigen::MatrixXd Qi = -P.cwiseProduct(Er.cwiseProduct(Hy) - Ei.cwiseProduct(Hx));

    const Eigen::MatrixXd br = mg.Dx_tilde * Qr + cy * (Qi * Dy_hat.transpose());
    const Eigen::MatrixXd bi = mg.Dx_tilde * Qi - cy * (Qr * Dy_hat.transpose());
    const Eigen::MatrixXd V = Er.cwiseProduct(br) - Ei.cwiseProduct(bi);

    // h_t = -div q in the strip, plus the moving-grid advection term
    // (lambda_dot/(lambda+1)) (1+yhat) dH/dyhat, pointwise in yhat.
    Eigen::MatrixXd Phi = -V;
    const double adv = mg.lambda_dot / (mg.lambda + 1.0);
    if (adv != 0.0) {
        for (Eigen::Index j = 0; j < H.cols(); ++j)
            Phi.col(j) += adv * (1.0 + yhat[j]) * Hy_hat.col(j);
    }
    if (!Phi.allFinite())
        throw NumericalBreakdownError("rhs evaluation produced nonfinite values");
    return Phi;
}

} // namespace

Eigen::MatrixXd rhs_phi(const Eigen::MatrixXd& H, double t, const MappedGrid& mg,
                        const FluxModel& fm, const LidMotion& lm) {
    (void)t;
    (void)lm;
    // Dy_hat = (lambda+1)/2 * Dy_tilde recovers the computational-square operator.
    const Eigen::MatrixXd Dy_hat = 0.5 * (mg.lambda + 1.0) * mg.Dy_tilde;
    // yhat from the stored strip ordinates.
    Eigen::VectorXd yhat(mg.ny());
    for (int j = 0; j < mg.ny(); ++j)
        yhat[j] = 2.0 * (mg.ytilde(0, j) + 1.0) / (mg.lambda + 1.0) - 1.0;
    return phi_impl(H, mg, fm, Dy_hat, yhat, nullptr);
}

Eigen::MatrixXd dirichlet_residual(const Eigen::MatrixXd& H, double t, const MappedGrid& mg,
                                   const BoundaryCondition& bc) {
    if (bc.kind != BoundaryCondition::Kind::DirichletHeatKernel)
        throw std::invalid_argument("dirichlet_residual: wrong boundary-condition kind");
    Eigen::MatrixXd R(H.rows(), H.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i)
            R(i, j) = H(i, j) - heat_kernel(t + bc.t0, mg.x(i, j) - bc.x0,
                                            mg.y(i, j) - bc.y0, bc.kappa);
    return R;
}

Eigen::MatrixXd noflux_residual(const Eigen::MatrixXd& H, const Eigen::MatrixXcd& Gtilde,
                                double t, const MappedGrid& mg, const FluxModel& fm,
                                const LidMotion& lm) {
    (void)t;
    (void)lm;
    const Eigen::Index nx = H.rows(), ny = H.cols();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nx, ny);

    // Bottom edge (interior columns only; corners take the truncation-edge rule).
    for (Eigen::Index i = 1; i + 1 < nx; ++i)
        R(i, 0) = Gtilde(i, 0).imag();

    // Moving top edge: psi |E| Im(Gtilde) + lambda_dot |F| H = 0.
    const double ld = mg.lambda_dot;
    for (Eigen::Index i = 1; i + 1 < nx; ++i) {
        const double abs_e = std::abs(mg.E(i, ny - 1));
        R(i, ny - 1) = psi_eval(fm, H(i, ny - 1)) * abs_e * Gtilde(i, ny - 1).imag()
                       + ld * H(i, ny - 1) / abs_e;
    }

    // Truncation edges, corners included.
    for (Eigen::Index j = 0; j < ny; ++j) {
        R(0, j) = Gtilde(0, j).real();
        R(nx - 1, j) = Gtilde(nx - 1, j).real();
    }
    return R;
}

Eigen::MatrixXd dae_residual(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Hdot, double t,
                             const MappedGrid& mg, const FluxModel& fm, const LidMotion& lm,
                             const BoundaryCondition& bc, const BoundaryMasks& masks) {
    if (H.rows() != Hdot.rows() || H.cols() != Hdot.cols())
        throw std::invalid_argument("dae_residual: H and Hdot shapes differ");

    const Eigen::MatrixXd Dy_hat = 0.5 * (mg.lambda + 1.0) * mg.Dy_tilde;
    Eigen::VectorXd yhat(mg.ny());
    for (int j = 0; j < mg.ny(); ++j)
        yhat[j] = 2.0 * (mg.ytilde(0, j) + 1.0) / (mg.lambda + 1.0) - 1.0;

    Eigen::MatrixXcd Gtilde;
    const Eigen::MatrixXd Phi = phi_impl(H, mg, fm, Dy_hat, yhat, &Gtilde);

    Eigen::MatrixXd R;
    if (bc.kind == BoundaryCondition::Kind::DirichletHeatKernel)
        R = dirichlet_residual(H, t, mg, bc);
    else
        R = noflux_residual(H, Gtilde, t, mg, fm, lm);

    return masks.Bprime.cwiseProduct(Hdot - Phi) + masks.B.cwiseProduct(R);
}

EyeDiffusionDae::EyeDiffusionDae(int nx, int ny, StripMap sm, LidMotion lm, FluxModel fm,
                                 BoundaryCondition bc)
    : gx_(make_cheb_grid(nx)), gy_(make_cheb_grid(ny)), sm_(sm), lm_(lm), fm_(fm), bc_(bc),
      masks_(BoundaryMasks::make(nx, ny)),
      work_(build_mapped_grid(gx_, gy_, sm_, lm_, 0.0)) {}

Eigen::VectorXd EyeDiffusionDae::mass_diagonal() const {
    return Eigen::Map<const Eigen::VectorXd>(masks_.Bprime.data(), size());
}

MappedGrid EyeDiffusionDae::grid_at(double t) const {
    return build_mapped_grid(gx_, gy_, sm_, lm_, t);
}

void EyeDiffusionDae::residual(const Eigen::VectorXd& u, const Eigen::VectorXd& udot, double t,
                               Eigen::VectorXd& out) const {
    if (u.size() != size() || udot.size() != size())
        throw std::invalid_argument("residual: state size mismatch");
    update_mapped_grid(work_, gx_, gy_, sm_, lid_lambda(lm_, t), lid_lambda_dot(lm_, t), t);
    const Eigen::Map<const Eigen::MatrixXd> H(u.data(), nx(), ny());
    const Eigen::Map<const Eigen::MatrixXd> Hdot(udot.data(), nx(), ny());
    const Eigen::MatrixXd R = dae_residual(H, Hdot, t, work_, fm_, lm_, bc_, masks_);
    out = Eigen::Map<const Eigen::VectorXd>(R.data(), size());
}

} // namespace blink
