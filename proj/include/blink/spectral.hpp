#pragma once

#include <Eigen/Dense>

namespace blink {

/// One-dimensional Chebyshev collocation data on [-1, 1].
///
/// Nodes are 2nd-kind Chebyshev points in ascending order (nodes[0] = -1,
/// nodes[n-1] = +1). `diff` maps sampled values of the degree-<n interpolant
/// to sampled values of its derivative; `quad_weights` are the
/// Clenshaw-Curtis weights (nonnegative, summing to 2).
struct ChebGrid1D {
    int n = 0;
    Eigen::VectorXd nodes;
    Eigen::MatrixXd diff;
    Eigen::VectorXd quad_weights;
};

/// x_k = -cos((k-1)pi/(n-1)), k = 1..n. Requires n >= 2.
Eigen::VectorXd cheb_points(int n);

/// Dense differentiation matrix for the ascending 2nd-kind Chebyshev nodes,
/// built from barycentric weights with the negative-sum trick on the
/// diagonal. Exact for polynomials of degree < n.
Eigen::MatrixXd cheb_diffmat(int n);

/// Clenshaw-Curtis quadrature weights (closed form). Exact for polynomials
/// of degree < n; weights sum to 2.
Eigen::VectorXd clenshaw_curtis_weights(int n);

ChebGrid1D make_cheb_grid(int n);

/// Columnwise x-derivative D*H of a field sampled on a tensor grid.
Eigen::MatrixXd apply_dx(const Eigen::MatrixXd& D, const Eigen::MatrixXd& H);

/// Rowwise y-derivative H*D^T.
Eigen::MatrixXd apply_dy(const Eigen::MatrixXd& H, const Eigen::MatrixXd& D);

} // namespace blink
