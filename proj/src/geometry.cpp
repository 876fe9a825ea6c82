#include "blink/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "blink/errors.hpp"

namespace blink {

double lid_lambda(const LidMotion& m, double t) {
    return 1.0 - m.c + m.c * std::tanh(4.0 * std::cos(2.0 * std::numbers::pi * m.nu * t));
}

double lid_lambda_dot(const LidMotion& m, double t) {
    const double phase = 2.0 * std::numbers::pi * m.nu * t;
    const double sech = 1.0 / std::cosh(4.0 * std::cos(phase));
    return -8.0 * std::numbers::pi * m.nu * m.c * sech * sech * std::sin(phase);
}

std::pair<double, double> comp_to_strip(const StripMap& sm, const LidMotion& lm,
                                        double xhat, double yhat, double t) {
    const double xt = sm.gamma * xhat / (sm.alpha * sm.alpha - xhat * xhat);
    const double yt = 0.5 * (yhat + 1.0) * (lid_lambda(lm, t) + 1.0) - 1.0;
    return {xt, yt};
}

std::pair<double, double> strip_to_eye(double xtilde, double ytilde) {
    const double den = std::cos(ytilde) + std::cosh(xtilde);
    if (!(den > 0.0))
        throw DegenerateDomainError("strip_to_eye: cos(ytilde) + cosh(xtilde) <= 0");
    return {std::sinh(xtilde) / den, std::sin(ytilde) / den};
}

Complex fprime(double xtilde, double ytilde) {
    const Complex half_z(0.5 * xtilde, 0.5 * ytilde);
    const Complex c = std::cosh(half_z);
    return 0.5 / (c * c);
}

Complex einv(double xtilde, double ytilde) {
    const Complex half_z(0.5 * xtilde, 0.5 * ytilde);
    const Complex c = std::cosh(half_z);
    return 2.0 * c * c;
}

double jacobian_strip(double xtilde, double ytilde) {
    const double s = std::cosh(xtilde) + std::cos(ytilde);
    return s * s;
}

double jacobian_comp(const StripMap& sm, const LidMotion& lm, double xhat, double t) {
    const double a2 = sm.alpha * sm.alpha;
    const double den = a2 - xhat * xhat;
    const double dxt = sm.gamma * (a2 + xhat * xhat) / (den * den);
    return dxt * 0.5 * (lid_lambda(lm, t) + 1.0);
}

void update_mapped_grid(MappedGrid& mg, const ChebGrid1D& gx, const ChebGrid1D& gy,
                        const StripMap& sm, double lambda, double lambda_dot, double t) {
    if (!(lambda > -1.0))
        throw DegenerateDomainError("mapped grid: lambda <= -1 leaves an empty strip");
    const int nx = gx.n, ny = gy.n;
    mg.t = t;
    mg.lambda = lambda;
    mg.lambda_dot = lambda_dot;

    const double a2 = sm.alpha * sm.alpha;
    Eigen::VectorXd xt(nx), dxt(nx), ch(nx), sh(nx);
    for (int i = 0; i < nx; ++i) {
        const double xh = gx.nodes[i];
        const double den = a2 - xh * xh;
        xt[i] = sm.gamma * xh / den;
        dxt[i] = sm.gamma * (a2 + xh * xh) / (den * den);
        ch[i] = std::cosh(xt[i]);
        sh[i] = std::sinh(xt[i]);
    }
    const double half_height = 0.5 * (lambda + 1.0);
    Eigen::VectorXd yt(ny), cs(ny), sn(ny);
    for (int j = 0; j < ny; ++j) {
        yt[j] = (gy.nodes[j] + 1.0) * half_height - 1.0;
        cs[j] = std::cos(yt[j]);
        sn[j] = std::sin(yt[j]);
    }

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            mg.xtilde(i, j) = xt[i];
            mg.ytilde(i, j) = yt[j];
            // E = 2 cosh^2(z/2) = 1 + cosh(z); F = 1/E.
            const Complex e(1.0 + ch[i] * cs[j], sh[i] * sn[j]);
            mg.E(i, j) = e;
            mg.F(i, j) = 1.0 / e;
            const double abs_e = ch[i] + cs[j]; // |E| = cosh(xt) + cos(yt)
            mg.JR(i, j) = 1.0 / (abs_e * abs_e);
            mg.JC(i, j) = dxt[i] * half_height;
            mg.x(i, j) = sh[i] / abs_e;
            mg.y(i, j) = sn[j] / abs_e;
        }
    }

    mg.Dx_tilde = dxt.cwiseInverse().asDiagonal() * gx.diff;
    mg.Dy_tilde = (1.0 / half_height) * gy.diff;
}

MappedGrid build_frozen_grid(const ChebGrid1D& gx, const ChebGrid1D& gy,
                             const StripMap& sm, double lambda, double lambda_dot) {
    MappedGrid mg;
    const int nx = gx.n, ny = gy.n;
    mg.xtilde.resize(nx, ny);
    mg.ytilde.resize(nx, ny);
    mg.F.resize(nx, ny);
    mg.E.resize(nx, ny);
    mg.JR.resize(nx, ny);
    mg.JC.resize(nx, ny);
    mg.x.resize(nx, ny);
    mg.y.resize(nx, ny);
    update_mapped_grid(mg, gx, gy, sm, lambda, lambda_dot, 0.0);
    return mg;
}

MappedGrid build_mapped_grid(const ChebGrid1D& gx, const ChebGrid1D& gy,
                             const StripMap& sm, const LidMotion& lm, double t) {
    MappedGrid mg = build_frozen_grid(gx, gy, sm, lid_lambda(lm, t), lid_lambda_dot(lm, t));
    mg.t = t;
    return mg;
}

Eigen::MatrixXcd complex_gradient(const Eigen::MatrixXd& H, const MappedGrid& mg) {
    Eigen::MatrixXcd Gt(H.rows(), H.cols());
    Gt.real() = mg.Dx_tilde * H;
    Gt.imag() = H * mg.Dy_tilde.transpose();
    return Gt;
}

Eigen::MatrixXcd physical_gradient(const Eigen::MatrixXcd& Gtilde, const MappedGrid& mg) {
    return mg.E.conjugate().cwiseProduct(Gtilde);
}

Eigen::MatrixXd physical_divergence(const Eigen::MatrixXcd& Q, const MappedGrid& mg) {
    const Eigen::MatrixXd Qr = Q.real();
    const Eigen::MatrixXd Qi = Q.imag();
    const Eigen::MatrixXd br = mg.Dx_tilde * Qr + Qi * mg.Dy_tilde.transpose();
    const Eigen::MatrixXd bi = mg.Dx_tilde * Qi - Qr * mg.Dy_tilde.transpose();
    return mg.E.real().cwiseProduct(br) - mg.E.imag().cwiseProduct(bi);
}

} // namespace blink
