#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blink/spectral.hpp"

using namespace blink;

TEST_CASE("cheb_points endpoints and symmetry") {
    const auto x2 = cheb_points(2);
    CHECK(x2[0] == -1.0);
    CHECK(x2[1] == 1.0);

    const auto x3 = cheb_points(3);
    CHECK(x3[0] == -1.0);
    CHECK(x3[1] == 0.0);
    CHECK(x3[2] == 1.0);

    const auto x5 = cheb_points(5);
    CHECK(x5[1] == doctest::Approx(-std::cos(std::numbers::pi / 4)).epsilon(1e-14));
    CHECK(x5[3] == doctest::Approx(std::cos(std::numbers::pi / 4)).epsilon(1e-14));

    // strictly increasing
    for (int n : {2, 7, 16, 33}) {
        const auto x = cheb_points(n);
        for (int k = 1; k < n; ++k)
            CHECK(x[k] > x[k - 1]);
    }

    CHECK_THROWS_AS(cheb_points(1), std::invalid_argument);
}

TEST_CASE("differentiation matrix small cases") {
    const auto D2 = cheb_diffmat(2);
    CHECK(D2(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(D2(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(D2(1, 0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(D2(1, 1) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(cheb_diffmat(0), std::invalid_argument);
}

TEST_CASE("differentiation matrix: constants, identity, polynomial exactness") {
    for (int n = 2; n <= 64; ++n) {
        const auto D = cheb_diffmat(n);
        const auto x = cheb_points(n);
        const Eigen::VectorXd zeros = D * Eigen::VectorXd::Ones(n);
        const Eigen::VectorXd ones = D * x;
        CHECK(zeros.cwiseAbs().maxCoeff() < 1e-10);
        CHECK((ones - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-10);
    }

    // degree-4 polynomial differentiated exactly on 5 nodes
    const auto D = cheb_diffmat(5);
    const auto x = cheb_points(5);
    const Eigen::VectorXd p = x.array().pow(4);
    const Eigen::VectorXd dp = 4.0 * x.array().pow(3);
    CHECK((D * p - dp).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clenshaw-curtis weights") {
    const auto w2 = clenshaw_curtis_weights(2);
    CHECK(w2[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w2[1] == doctest::Approx(1.0).epsilon(1e-15));

    const auto w3 = clenshaw_curtis_weights(3);
    CHECK(w3[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(w3[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(w3[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    for (int n : {2, 3, 8, 9, 24, 41}) {
        const auto w = clenshaw_curtis_weights(n);
        CHECK(w.minCoeff() >= 0.0);
        CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(clenshaw_curtis_weights(1), std::invalid_argument);
}

TEST_CASE("quadrature exactness on monomials of degree < n") {
    for (int n : {3, 6, 9, 12}) {
        const auto x = cheb_points(n);
        const auto w = clenshaw_curtis_weights(n);
        for (int k = 0; k < n; ++k) {
            const double numeric = w.dot(x.array().pow(k).matrix());
            const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
            CHECK(std::abs(numeric - exact) < 1e-13);
        }
    }
}

TEST_CASE("tensor-grid derivative application") {
    const int nx = 5, ny = 5;
    const auto gx = make_cheb_grid(nx);
    const auto gy = make_cheb_grid(ny);

    Eigen::MatrixXd H = Eigen::MatrixXd::Constant(nx, ny, 3.7);
    CHECK(apply_dx(gx.diff, H).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(apply_dy(H, gy.diff).cwiseAbs().maxCoeff() < 1e-12);

    // H(i,j) = xhat_i -> d/dx gives ones
    for (int j = 0; j < ny; ++j)
        H.col(j) = gx.nodes;
    CHECK((apply_dx(gx.diff, H) - Eigen::MatrixXd::Ones(nx, ny)).cwiseAbs().maxCoeff()
          < 1e-12);

    // H(i,j) = xhat_i^2 * yhat_j -> d/dy gives xhat_i^2
    Eigen::MatrixXd H2(nx, ny), expect(nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            H2(i, j) = gx.nodes[i] * gx.nodes[i] * gy.nodes[j];
            expect(i, j) = gx.nodes[i] * gx.nodes[i];
        }
    CHECK((apply_dy(H2, gy.diff) - expect).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(apply_dx(gx.diff, Eigen::MatrixXd::Zero(7, 3)), std::invalid_argument);
    CHECK_THROWS_AS(apply_dy(Eigen::MatrixXd::Zero(5, 7), gy.diff), std::invalid_argument);
}

TEST_CASE("geometric convergence of the derivative of exp(x)") {
    double prev = 1e300;
    for (int n : {6, 10, 14, 20}) {
        const auto g = make_cheb_grid(n);
        const Eigen::VectorXd f = g.nodes.array().exp();
        const double err = (g.diff * f - f).cwiseAbs().maxCoeff();
        CHECK(err < prev);
        prev = err;
        if (n == 20)
            CHECK(err < 1e-10);
    }
}
