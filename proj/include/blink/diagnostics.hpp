#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blink/geometry.hpp"

namespace blink {

/// Conserved-mass record along a run.
struct MassSeries {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> relative_change; // (M(t) - M(0)) / M(0)

    void append(double t, double m);
};

/// Quadrature of H over the moving domain: wx^T [S .* H] wy with
/// S = JR .* JC the combined area factors.
double mass(const Eigen::MatrixXd& H, const MappedGrid& mg, const ChebGrid1D& gx,
            const ChebGrid1D& gy);

/// ||H - exact|| / ||exact|| in the Jacobian-weighted quadrature norm.
/// `exact` is evaluated at the grid's physical coordinates.
double l2_relative_error(const Eigen::MatrixXd& H,
                         const std::function<double(double, double)>& exact,
                         const MappedGrid& mg, const ChebGrid1D& gx, const ChebGrid1D& gy);

/// Solution values at the centers of the upper and lower lids,
/// (xhat=0, yhat=+1) and (xhat=0, yhat=-1). Requires odd Nx so xhat=0 is a
/// grid node.
std::pair<double, double> lid_center_values(const Eigen::MatrixXd& H, const ChebGrid1D& gx,
                                            const ChebGrid1D& gy);

/// Analytic area between the two circular lid arcs for a given lambda;
/// reference oracle for the mass quadrature of the unit field.
double eye_domain_area(double lambda);

} // namespace blink
