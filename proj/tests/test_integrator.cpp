#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blink/diagnostics.hpp"
#include "blink/errors.hpp"
#include "blink/integrator.hpp"
#include "blink/pde.hpp"

using namespace blink;

namespace {

const StripMap kMap{1.2, 3.0};

DaeProblem scalar_decay() {
    DaeProblem p;
    p.residual = [](const Eigen::VectorXd& u, const Eigen::VectorXd& ud, double,
                    Eigen::VectorXd& out) { out.resize(1); out[0] = ud[0] + u[0]; };
    p.mass_diag = Eigen::VectorXd::Ones(1);
    p.u0 = Eigen::VectorXd::Ones(1);
    p.t_start = 0.0;
    p.t_end = 1.0;
    return p;
}

struct HeatSetup {
    EyeDiffusionDae dae;
    DaeProblem prob;

    explicit HeatSetup(int nx = 28, int ny = 24, double t_end = 1.0 / 32.0, double nu = 16.0)
        : dae(nx, ny, kMap, LidMotion{0.8, nu}, FluxModel::linear_heat(1.0),
              BoundaryCondition::dirichlet_heat_kernel(0.01, 0.1, 0.2, 1.0)) {
        const MappedGrid mg0 = dae.grid_at(0.0);
        Eigen::MatrixXd H0(nx, ny);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                H0(i, j) = heat_kernel(0.01, mg0.x(i, j) - 0.1, mg0.y(i, j) - 0.2, 1.0);
        prob.residual = [this](const Eigen::VectorXd& u, const Eigen::VectorXd& ud, double t,
                               Eigen::VectorXd& out) { dae.residual(u, ud, t, out); };
        prob.mass_diag = dae.mass_diagonal();
        prob.u0 = Eigen::Map<const Eigen::VectorXd>(H0.data(), H0.size());
        prob.t_start = 0.0;
        prob.t_end = t_end;
    }

    double relerr_at(double t, const Eigen::VectorXd& u) const {
        const Eigen::Map<const Eigen::MatrixXd> H(u.data(), dae.nx(), dae.ny());
        const MappedGrid mg = dae.grid_at(t);
        auto exact = [t](double x, double y) {
            return heat_kernel(t + 0.01, x - 0.1, y - 0.2, 1.0);
        };
        return l2_relative_error(H, exact, mg, dae.grid_x(), dae.grid_y());
    }
};

} // namespace

TEST_CASE("scalar decay smoke test") {
    DaeOptions opts;
    opts.rtol = opts.atol = 1e-9;
    const auto sol = solve_dae(scalar_decay(), opts);
    CHECK(sol.t_final == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(sol.u_final[0] - std::exp(-1.0)) < 1e-8);
    CHECK(sol.stats.steps > 10);
}

TEST_CASE("observer interpolation matches the exact flow") {
    DaeProblem p = scalar_decay();
    p.schedule = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    DaeOptions opts;
    opts.rtol = opts.atol = 1e-9;
    double worst = 0.0;
    int count = 0;
    solve_dae(p, opts, [&](double t, const Eigen::VectorXd& u) {
        worst = std::max(worst, std::abs(u[0] - std::exp(-t)));
        ++count;
    });
    CHECK(count == 6);
    CHECK(worst < 1e-7);
}

TEST_CASE("index-1 tracking of an algebraic variable") {
    DaeProblem p;
    p.residual = [](const Eigen::VectorXd& u, const Eigen::VectorXd& ud, double,
                    Eigen::VectorXd& out) {
        out.resize(2);
        out[0] = ud[0] + u[0];
        out[1] = u[1] - u[0];
    };
    p.mass_diag = Eigen::VectorXd::Zero(2);
    p.mass_diag[0] = 1.0;
    p.u0 = Eigen::VectorXd::Ones(2);
    p.t_start = 0.0;
    p.t_end = 1.0;
    p.schedule = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};

    DaeOptions opts;
    opts.rtol = opts.atol = 1e-9;
    double track = 0.0, accuracy = 0.0;
    solve_dae(p, opts, [&](double t, const Eigen::VectorXd& u) {
        track = std::max(track, std::abs(u[1] - u[0]));
        accuracy = std::max(accuracy, std::abs(u[0] - std::exp(-t)));
    });
    CHECK(track < 1e-6);
    CHECK(accuracy < 1e-7);
}

TEST_CASE("make_consistent") {
    // already-consistent Dirichlet data is untouched
    HeatSetup hs(12, 10);
    const Eigen::VectorXd u = make_consistent(hs.prob.u0, 0.0, hs.prob, 1e-9);
    CHECK((u - hs.prob.u0).cwiseAbs().maxCoeff() == 0.0);

    // no-flux with a constant state at a motionless-lid instant is consistent
    EyeDiffusionDae dae(12, 10, kMap, LidMotion{0.7, 1.0}, FluxModel::porous_linear(0.5),
                        BoundaryCondition::no_flux());
    DaeProblem p;
    p.residual = [&dae](const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t,
                        Eigen::VectorXd& out) { dae.residual(a, b, t, out); };
    p.mass_diag = dae.mass_diagonal();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dae.size());
    CHECK((make_consistent(ones, 0.0, p, 1e-9) - ones).cwiseAbs().maxCoeff() == 0.0);

    // porous initial bump: boundary projection is small and drives the
    // algebraic residual below atol
    EyeDiffusionDae dae2(32, 48, kMap, LidMotion{0.7, 1.0}, FluxModel::porous_linear(0.5),
                         BoundaryCondition::no_flux());
    DaeProblem p2;
    p2.residual = [&dae2](const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t,
                          Eigen::VectorXd& out) { dae2.residual(a, b, t, out); };
    p2.mass_diag = dae2.mass_diagonal();
    const MappedGrid mg0 = dae2.grid_at(0.0);
    Eigen::MatrixXd H0(32, 48);
    for (int j = 0; j < 48; ++j)
        for (int i = 0; i < 32; ++i) {
            const double xt = mg0.xtilde(i, j), yt = mg0.ytilde(i, j);
            H0(i, j) = 1.0 - 0.8 * std::exp(-6.0 * (yt + 0.2) * (yt + 0.2)
                                            - 4.0 * (xt - 1.0) * (xt - 1.0));
        }
    const Eigen::VectorXd u0 = Eigen::Map<const Eigen::VectorXd>(H0.data(), H0.size());
    const Eigen::VectorXd uc = make_consistent(u0, 0.0, p2, 1e-9);
    CHECK((uc - u0).cwiseAbs().maxCoeff() < 1e-2);
    CHECK((uc - u0).cwiseAbs().maxCoeff() > 0.0);
    Eigen::VectorXd r(dae2.size());
    p2.residual(uc, Eigen::VectorXd::Zero(dae2.size()), 0.0, r);
    double bmax = 0.0;
    for (int i = 0; i < dae2.size(); ++i)
        if (p2.mass_diag[i] == 0.0)
            bmax = std::max(bmax, std::abs(r[i]));
    CHECK(bmax < 1e-9);
}

TEST_CASE("finite-difference jacobian of a linear forcing") {
    const int n = 12;
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Random(n);
    DaeResidualFn res = [&A, &b](const Eigen::VectorXd& u, const Eigen::VectorXd& ud, double,
                                 Eigen::VectorXd& out) { out = ud - (A * u + b); };
    const Eigen::VectorXd u = Eigen::VectorXd::Random(n);
    const Eigen::MatrixXd J = fd_jacobian(res, u, Eigen::VectorXd::Zero(n), 0.0);
    CHECK((J - A).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("frozen-lid heat jacobian has a dissipative interior block") {
    const int nx = 8, ny = 8;
    // negligible lid motion stands in for a frozen lid
    EyeDiffusionDae dae(nx, ny, kMap, LidMotion{1e-12, 1.0}, FluxModel::linear_heat(1.0),
                        BoundaryCondition::dirichlet_heat_kernel(0.01, 0.0, 0.0, 1.0));
    DaeResidualFn res = [&dae](const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t,
                               Eigen::VectorXd& out) { dae.residual(a, b, t, out); };
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(nx * ny);
    const Eigen::MatrixXd J = fd_jacobian(res, u, Eigen::VectorXd::Zero(nx * ny), 0.0);

    std::vector<int> interior;
    const Eigen::VectorXd md = dae.mass_diagonal();
    for (int i = 0; i < nx * ny; ++i)
        if (md[i] == 1.0)
            interior.push_back(i);
    Eigen::MatrixXd Jin(interior.size(), interior.size());
    for (size_t a = 0; a < interior.size(); ++a)
        for (size_t c = 0; c < interior.size(); ++c)
            Jin(a, c) = J(interior[a], interior[c]);

    const Eigen::EigenSolver<Eigen::MatrixXd> es(Jin);
    CHECK(es.eigenvalues().real().maxCoeff() <= 1e-6);
}

TEST_CASE("heat problem: short-span accuracy at tight tolerance") {
    HeatSetup hs;
    hs.prob.schedule = {0.0, 1.0 / 128.0, 1.0 / 64.0, 3.0 / 128.0, 1.0 / 32.0};
    DaeOptions opts;
    opts.rtol = opts.atol = 1e-9;
    double worst = 0.0;
    const auto sol = solve_dae(hs.prob, opts, [&](double t, const Eigen::VectorXd& u) {
        worst = std::max(worst, hs.relerr_at(t, u));
    });
    CHECK(worst <= 1e-4);
    CHECK(sol.stats.steps > 0);
}

TEST_CASE("BDF1 fallback keeps order-1 accuracy") {
    HeatSetup hs(28, 24, 1.0 / 64.0);
    hs.prob.schedule = {1.0 / 64.0};
    DaeOptions opts;
    opts.rtol = opts.atol = 1e-9;
    opts.max_order = 1;
    double final_err = 1e300;
    solve_dae(hs.prob, opts, [&](double t, const Eigen::VectorXd& u) {
        final_err = hs.relerr_at(t, u);
    });
    CHECK(final_err <= 1e-3);
}

TEST_CASE("tolerance response is monotone") {
    double prev = -1.0;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        HeatSetup hs;
        DaeOptions opts;
        opts.rtol = opts.atol = tol;
        const auto sol = solve_dae(hs.prob, opts);
        const double err = hs.relerr_at(sol.t_final, sol.u_final);
        if (prev >= 0.0)
            CHECK(err <= prev * 1.001 + 1e-12); // saturation slack at the spatial floor
        prev = err;
    }
}

TEST_CASE("interpolated outputs match forced step endpoints") {
    // slow lid so the two trajectories stay close and the comparison probes
    // the dense output rather than step-sequence divergence
    const std::vector<double> times = {0.0, 1.0 / 256, 1.0 / 128, 3.0 / 256, 1.0 / 64};
    DaeOptions opts;
    opts.rtol = opts.atol = 1e-8;

    HeatSetup hs(12, 10, 1.0 / 64.0, 1.0);
    hs.prob.schedule = times;
    std::vector<Eigen::VectorXd> interp;
    solve_dae(hs.prob, opts,
              [&](double, const Eigen::VectorXd& u) { interp.push_back(u); });

    // rerun with every schedule time forced onto a step endpoint
    HeatSetup hs2(12, 10, 1.0 / 64.0, 1.0);
    hs2.prob.schedule = times;
    hs2.prob.hard_times = times;
    std::vector<Eigen::VectorXd> forced;
    solve_dae(hs2.prob, opts,
              [&](double, const Eigen::VectorXd& u) { forced.push_back(u); });

    REQUIRE(interp.size() == times.size());
    double worst = 0.0;
    for (size_t k = 0; k < times.size(); ++k)
        for (int i = 0; i < interp[k].size(); ++i) {
            const double scale = opts.atol + opts.rtol * std::abs(forced[k][i]);
            worst = std::max(worst, std::abs(interp[k][i] - forced[k][i]) / scale);
        }
    CHECK(worst < 10.0);
}

TEST_CASE("jacobian refresh policies agree") {
    HeatSetup a(12, 10, 1.0 / 64.0), b(12, 10, 1.0 / 64.0);
    DaeOptions oa, ob;
    oa.rtol = oa.atol = ob.rtol = ob.atol = 1e-8;
    ob.jac_refresh_policy = DaeOptions::JacRefresh::EveryStep;
    const auto sa = solve_dae(a.prob, oa);
    const auto sb = solve_dae(b.prob, ob);
    double worst = 0.0;
    for (int i = 0; i < sa.u_final.size(); ++i) {
        const double scale = oa.atol + oa.rtol * std::abs(sa.u_final[i]);
        worst = std::max(worst, std::abs(sa.u_final[i] - sb.u_final[i]) / scale);
    }
    CHECK(worst < 20.0);
    CHECK(sb.stats.jacobian_evals >= sb.stats.steps); // every-step policy
    CHECK(sa.stats.jacobian_evals < sb.stats.jacobian_evals);
}

TEST_CASE("finite-time blow-up ends in stagnation with the last time reported") {
    DaeProblem p;
    p.residual = [](const Eigen::VectorXd& u, const Eigen::VectorXd& ud, double,
                    Eigen::VectorXd& out) { out.resize(1); out[0] = ud[0] - u[0] * u[0]; };
    p.mass_diag = Eigen::VectorXd::Ones(1);
    p.u0 = Eigen::VectorXd::Ones(1);
    p.t_start = 0.0;
    p.t_end = 2.0; // blow-up at t = 1
    DaeOptions opts;
    opts.rtol = opts.atol = 1e-6;
    try {
        solve_dae(p, opts);
        FAIL("expected stagnation");
    } catch (const StagnationError& e) {
        CHECK(e.t_reached() > 0.9);
        CHECK(e.t_reached() < 1.05);
    }
}

TEST_CASE("option validation") {
    DaeProblem p = scalar_decay();
    DaeOptions opts;
    opts.max_order = 6;
    CHECK_THROWS_AS(solve_dae(p, opts), std::invalid_argument);
    opts.max_order = 0;
    CHECK_THROWS_AS(solve_dae(p, opts), std::invalid_argument);
    opts = DaeOptions{};
    opts.rtol = -1.0;
    CHECK_THROWS_AS(solve_dae(p, opts), std::invalid_argument);
    opts = DaeOptions{};
    p.mass_diag[0] = 0.5;
    CHECK_THROWS_AS(solve_dae(p, opts), std::invalid_argument);
}

TEST_CASE("h_max is honored") {
    DaeProblem p = scalar_decay();
    DaeOptions opts;
    opts.rtol = opts.atol = 1e-6;
    opts.h_max = 1e-2;
    const auto sol = solve_dae(p, opts);
    CHECK(sol.stats.steps >= 99);
}
