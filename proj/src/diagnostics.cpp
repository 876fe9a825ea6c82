#include "blink/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace blink {

void MassSeries::append(double t, double m) {
    times.push_back(t);
    mass.push_back(m);
    relative_change.push_back(mass.size() == 1 ? 0.0 : (m - mass.front()) / mass.front());
}

double mass(const Eigen::MatrixXd& H, const MappedGrid& mg, const ChebGrid1D& gx,
            const ChebGrid1D& gy) {
    if (H.rows() != gx.n || H.cols() != gy.n)
        throw std::invalid_argument("mass: field shape does not match the grids");
    const Eigen::MatrixXd S = mg.JR.cwiseProduct(mg.JC);
    return gx.quad_weights.dot(S.cwiseProduct(H) * gy.quad_weights);
}

double l2_relative_error(const Eigen::MatrixXd& H,
                         const std::function<double(double, double)>& exact,
                         const MappedGrid& mg, const ChebGrid1D& gx, const ChebGrid1D& gy) {
    Eigen::MatrixXd W(H.rows(), H.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i)
            W(i, j) = exact(mg.x(i, j), mg.y(i, j));
    const Eigen::MatrixXd diff = H - W;
    const double num = mass(diff.cwiseProduct(diff), mg, gx, gy);
    const double den = mass(W.cwiseProduct(W), mg, gx, gy);
    if (!(den > 0.0))
        throw std::domain_error("l2_relative_error: exact solution has zero norm");
    return std::sqrt(num / den);
}

std::pair<double, double> lid_center_values(const Eigen::MatrixXd& H, const ChebGrid1D& gx,
                                            const ChebGrid1D& gy) {
    if (gx.n % 2 == 0)
        throw std::invalid_argument("lid_center_values: Nx must be odd so xhat=0 is a node");
    if (H.rows() != gx.n || H.cols() != gy.n)
        throw std::invalid_argument("lid_center_values: field shape does not match the grids");
    const int ic = (gx.n - 1) / 2;
    return {H(ic, gy.n - 1), H(ic, 0)};
}

namespace {

// Area of the circular segment cut off by the chord (-1,0)-(1,0) from the
// arc through those points with apex height tan(eta/2), eta in (0, pi).
double segment_area(double eta) {
    const double s = std::sin(eta);
    return (2.0 * eta - std::sin(2.0 * eta)) / (2.0 * s * s);
}

} // namespace

double eye_domain_area(double lambda) {
    if (!(lambda > -1.0))
        throw std::domain_error("eye_domain_area: lambda <= -1");
    double area = segment_area(1.0); // lower lid at ytilde = -1
    if (lambda > 0.0)
        area += segment_area(lambda);
    else if (lambda < 0.0)
        area -= segment_area(-lambda);
    return area;
}

} // namespace blink
