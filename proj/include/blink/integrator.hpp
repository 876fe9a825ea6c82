#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace blink {

struct DaeOptions {
    double rtol = 1e-6;
    double atol = 1e-6;
    double h_init = 0.0; // <= 0 selects automatically
    double h_max = std::numeric_limits<double>::infinity();
    int max_order = 5; // BDF order cap, 1..5

    enum class JacRefresh { EveryStep, OnConvergenceFailure };
    JacRefresh jac_refresh_policy = JacRefresh::OnConvergenceFailure;

    double fd_typical_scale = 1e-3; // floor for finite-difference increments
    long max_steps = 5'000'000;
};

/// Residual of the implicit system: out = M*udot - f(u, t), with M the
/// diagonal 0/1 mass pattern. Boundary (algebraic) rows must not depend on
/// udot.
using DaeResidualFn =
    std::function<void(const Eigen::VectorXd& u, const Eigen::VectorXd& udot, double t,
                       Eigen::VectorXd& out)>;

struct DaeProblem {
    DaeResidualFn residual;
    Eigen::VectorXd mass_diag; // 1 on differential rows, 0 on algebraic rows
    Eigen::VectorXd u0;
    double t_start = 0.0;
    double t_end = 1.0;
    std::vector<double> schedule; // observer times, ascending, within the span
    // Times the stepper must land on exactly (no interpolation across them);
    // ascending. Used to cross-check the dense output.
    std::vector<double> hard_times;
};

struct SolveStats {
    long steps = 0;
    long rejected_error = 0;
    long rejected_newton = 0;
    long residual_evals = 0;
    long jacobian_evals = 0;
    long lu_factorizations = 0;
    long newton_iters = 0;
};

struct DaeSolution {
    double t_final = 0.0;
    Eigen::VectorXd u_final;
    SolveStats stats;
};

using DaeObserver = std::function<void(double t, const Eigen::VectorXd& u)>;

/// Newton projection of the algebraic rows: adjusts the entries with zero
/// mass until the algebraic residual max-norm drops below atol, leaving
/// differential entries untouched. Throws InconsistentInitialDataError on
/// divergence.
Eigen::VectorXd make_consistent(const Eigen::VectorXd& u0, double t0, const DaeProblem& problem,
                                double atol, int max_iter = 10);

/// Dense forward-difference Jacobian d f/d u of the forcing side of the
/// residual (res = M*udot - f), column increments eps*max(|u_j|, typical
/// scale) with eps = sqrt(machine precision). This is the J of the Newton
/// iteration matrix c*M - J.
Eigen::MatrixXd fd_jacobian(const DaeResidualFn& residual, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& udot, double t,
                            double typical_scale = 1e-3);

/// Variable-step, variable-order (1..max_order) BDF integration of the
/// index-1 DAE. Modified Newton with an LU-factored iteration matrix
/// c*M - J; local error controlled against rtol/atol on all components;
/// observer invoked at schedule times with interpolated states. Throws
/// StagnationError when the step size underflows (h < 1e-14 * span).
DaeSolution solve_dae(const DaeProblem& problem, const DaeOptions& opts,
                      const DaeObserver& observer = {});

} // namespace blink
