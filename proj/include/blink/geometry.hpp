#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "blink/spectral.hpp"

namespace blink {

using Complex = std::complex<double>;

/// Prescribed motion of the upper lid: lambda(t) = 1 - c + c tanh(4 cos(2 pi nu t)).
/// c is the closure fraction in (0, 1], nu the blink frequency.
struct LidMotion {
    double c = 0.8;
    double nu = 1.0;
};

double lid_lambda(const LidMotion& m, double t);
double lid_lambda_dot(const LidMotion& m, double t);

/// Square -> strip map parameters: xtilde = gamma * xhat / (alpha^2 - xhat^2),
/// alpha > 1 so the strip is truncated at |xtilde| = gamma / (alpha^2 - 1).
struct StripMap {
    double alpha = 1.2;
    double gamma = 3.0;
    double xtilde_max() const { return gamma / (alpha * alpha - 1.0); }
};

std::pair<double, double> comp_to_strip(const StripMap& sm, const LidMotion& lm,
                                        double xhat, double yhat, double t);

/// Image of a strip point under z = tanh(ztilde/2), componentwise.
std::pair<double, double> strip_to_eye(double xtilde, double ytilde);

/// f'(ztilde) = sech^2(ztilde/2)/2 for the strip -> eye map.
Complex fprime(double xtilde, double ytilde);

/// Derivative of the inverse map, 1/f' = 2 cosh^2(ztilde/2).
Complex einv(double xtilde, double ytilde);

/// (cosh xtilde + cos ytilde)^2 = 1/|f'|^2, the inverse of the strip->eye
/// area factor.
double jacobian_strip(double xtilde, double ytilde);

/// Square -> strip area factor (d xtilde/d xhat)(d ytilde/d yhat).
double jacobian_comp(const StripMap& sm, const LidMotion& lm, double xhat, double t);

/// Time-dependent geometric state on the tensor grid. Immutable snapshot per
/// (t, grid) pair; rebuilding touches only the lambda-dependent pieces.
struct MappedGrid {
    double t = 0.0;
    double lambda = 1.0;
    double lambda_dot = 0.0;
    Eigen::MatrixXd xtilde, ytilde; // strip coordinates of the grid points
    Eigen::MatrixXcd F, E;          // f' and 1/f' at the grid points
    Eigen::MatrixXd JR, JC;         // strip->eye and square->strip area factors
    Eigen::MatrixXd x, y;           // physical coordinates
    Eigen::MatrixXd Dx_tilde;       // d/dxtilde operator on the grid
    Eigen::MatrixXd Dy_tilde;       // d/dytilde operator, carries 2/(lambda+1)

    int nx() const { return int(xtilde.rows()); }
    int ny() const { return int(xtilde.cols()); }
};

MappedGrid build_mapped_grid(const ChebGrid1D& gx, const ChebGrid1D& gy,
                             const StripMap& sm, const LidMotion& lm, double t);

/// Grid at an explicitly prescribed lid state; used for frozen-lid tests and
/// inspection at synthetic lambda values.
MappedGrid build_frozen_grid(const ChebGrid1D& gx, const ChebGrid1D& gy,
                             const StripMap& sm, double lambda, double lambda_dot = 0.0);

/// In-place refresh of the lambda-dependent fields; allocates nothing once
/// the grid has been built.
void update_mapped_grid(MappedGrid& mg, const ChebGrid1D& gx, const ChebGrid1D& gy,
                        const StripMap& sm, double lambda, double lambda_dot, double t);

/// Gtilde = Dx_tilde*H + i*H*Dy_tilde^T, the strip-coordinate gradient.
Eigen::MatrixXcd complex_gradient(const Eigen::MatrixXd& H, const MappedGrid& mg);

/// G = conj(E) .* Gtilde; Re/Im parts approximate h_x, h_y in the eye domain.
Eigen::MatrixXcd physical_gradient(const Eigen::MatrixXcd& Gtilde, const MappedGrid& mg);

/// V = Re{ E .* [Dx_tilde*Q - i*Q*Dy_tilde^T] }, the divergence in the eye
/// domain of the complexified field Q.
Eigen::MatrixXd physical_divergence(const Eigen::MatrixXcd& Q, const MappedGrid& mg);

} // namespace blink
