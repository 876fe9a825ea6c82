#include "blink/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace blink {

namespace {

void require_size(int n) {
    if (n < 2)
        throw std::invalid_argument("Chebyshev grid needs n >= 2, got n=" + std::to_string(n));
}

} // namespace

Eigen::VectorXd cheb_points(int n) {
    require_size(n);
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k)
        x[k] = -std::cos(k * std::numbers::pi / (n - 1));
    x[0] = -1.0;
    x[n - 1] = 1.0;
    if (n % 2 == 1)
        x[(n - 1) / 2] = 0.0;
    return x;
}

Eigen::MatrixXd cheb_diffmat(int n) {
    require_size(n);
    const Eigen::VectorXd x = cheb_points(n);

    // Barycentric weights for 2nd-kind points: (-1)^j, halved at the ends.
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j)
        w[j] = (j % 2 == 0) ? 1.0 : -1.0;
    w[0] *= 0.5;
    w[n - 1] *= 0.5;

    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            D(i, j) = (w[j] / w[i]) / (x[i] - x[j]);
            rowsum += D(i, j);
        }
        D(i, i) = -rowsum;
    }
    return D;
}

Eigen::VectorXd clenshaw_curtis_weights(int n) {
    require_size(n);
    const int N = n - 1;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    if (N == 1) {
        w[0] = 1.0;
        w[1] = 1.0;
        return w;
    }
    Eigen::VectorXd theta(n);
    for (int k = 0; k <= N; ++k)
        theta[k] = k * std::numbers::pi / N;

    Eigen::VectorXd v = Eigen::VectorXd::Ones(N - 1);
    if (N % 2 == 0) {
        w[0] = 1.0 / (double(N) * N - 1.0);
        w[N] = w[0];
        for (int k = 1; k < N / 2; ++k)
            for (int i = 1; i < N; ++i)
                v[i - 1] -= 2.0 * std::cos(2.0 * k * theta[i]) / (4.0 * k * k - 1.0);
        for (int i = 1; i < N; ++i)
            v[i - 1] -= std::cos(double(N) * theta[i]) / (double(N) * N - 1.0);
    } else {
        w[0] = 1.0 / (double(N) * N);
        w[N] = w[0];
        for (int k = 1; k <= (N - 1) / 2; ++k)
            for (int i = 1; i < N; ++i)
                v[i - 1] -= 2.0 * std::cos(2.0 * k * theta[i]) / (4.0 * k * k - 1.0);
    }
    for (int i = 1; i < N; ++i)
        w[i] = 2.0 * v[i - 1] / N;
    return w;
}

ChebGrid1D make_cheb_grid(int n) {
    ChebGrid1D g;
    g.n = n;
    g.nodes = cheb_points(n);
    g.diff = cheb_diffmat(n);
    g.quad_weights = clenshaw_curtis_weights(n);
    return g;
}

Eigen::MatrixXd apply_dx(const Eigen::MatrixXd& D, const Eigen::MatrixXd& H) {
    if (D.rows() != D.cols() || D.cols() != H.rows())
        throw std::invalid_argument("apply_dx: D must be Nx-by-Nx with Nx = rows of H");
    return D * H;
}

Eigen::MatrixXd apply_dy(const Eigen::MatrixXd& H, const Eigen::MatrixXd& D) {
    if (D.rows() != D.cols() || D.rows() != H.cols())
        throw std::invalid_argument("apply_dy: D must be Ny-by-Ny with Ny = cols of H");
    return H * D.transpose();
}

} // namespace blink
