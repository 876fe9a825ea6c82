#include "blink/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blink/errors.hpp"

namespace blink {

namespace {

constexpr int kMaxOrder = 5;
constexpr int kNewtonMaxIter = 6;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
// Tolerated drift of the BDF leading coefficient before the iteration matrix
// is refactored.
constexpr double kLeadingCoeffDrift = 0.25;
const double kEps = std::numeric_limits<double>::epsilon();

double rms_norm(const Eigen::VectorXd& v) {
    return std::sqrt(v.squaredNorm() / double(v.size()));
}

/// Difference-array rescaling matrix for a step-size change by `factor`
/// (R(factor) in the fixed-leading-coefficient BDF formulation).
Eigen::MatrixXd compute_R(int order, double factor) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(order + 1, order + 1);
    for (int i = 1; i <= order; ++i)
        for (int j = 1; j <= order; ++j)
            M(i, j) = (i - 1 - factor * j) / double(i);
    M.row(0).setOnes();
    Eigen::MatrixXd R = M;
    for (int i = 1; i <= order; ++i)
        R.row(i) = R.row(i).cwiseProduct(R.row(i - 1));
    return R;
}

class BdfDaeSolver {
public:
    BdfDaeSolver(const DaeProblem& p, const DaeOptions& o, const DaeObserver& obs)
        : prob_(p), opts_(o), observer_(obs), n_(int(p.u0.size())) {}

    DaeSolution run();

private:
    // BDF coefficients: gamma[k] = sum_{m=1..k} 1/m, error const 1/(k+1).
    double gamma(int k) const {
        double g = 0.0;
        for (int m = 1; m <= k; ++m)
            g += 1.0 / m;
        return g;
    }
    double error_const(int k) const { return 1.0 / (k + 1); }

    void validate() const;
    double initial_step(const Eigen::VectorXd& udot0) const;
    void change_step(double factor);
    void ensure_iteration_matrix(double c);
    bool newton_solve(double t_new, const Eigen::VectorXd& u_pred, const Eigen::VectorXd& psi,
                      double c, const Eigen::VectorXd& scale, Eigen::VectorXd& u_out,
                      Eigen::VectorXd& d_out, int& iters);
    void refresh_jacobian(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& udot);
    bool try_refresh_jacobian(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& udot);
    void step();
    void emit_until(double t_old, double t_new);
    Eigen::VectorXd interpolate(double s) const;

    const DaeProblem& prob_;
    DaeOptions opts_;
    const DaeObserver& observer_;
    int n_;

    double t_ = 0.0, t_end_ = 0.0, span_ = 0.0, min_step_ = 0.0;
    double h_abs_ = 0.0;
    int order_ = 1;
    int n_equal_steps_ = 0;
    Eigen::VectorXd u_;
    std::vector<Eigen::VectorXd> D_; // backward-difference history rows

    Eigen::MatrixXd J_;
    bool have_jac_ = false;
    bool current_jac_ = false;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double c_lu_ = 0.0;
    bool lu_valid_ = false;

    SolveStats stats_;
    size_t sched_idx_ = 0;
    size_t hard_idx_ = 0;
    Eigen::VectorXd r_work_;
};

void BdfDaeSolver::validate() const {
    if (!prob_.residual)
        throw std::invalid_argument("solve_dae: missing residual function");
    if (prob_.mass_diag.size() != n_)
        throw std::invalid_argument("solve_dae: mass pattern size mismatch");
    for (int i = 0; i < n_; ++i) {
        const double m = prob_.mass_diag[i];
        if (m != 0.0 && m != 1.0)
            throw std::invalid_argument("solve_dae: mass pattern must be 0/1");
    }
    if (!(prob_.t_end > prob_.t_start))
        throw std::invalid_argument("solve_dae: t_end must exceed t_start");
    if (!(opts_.rtol > 0.0) || !(opts_.atol > 0.0))
        throw std::invalid_argument("solve_dae: tolerances must be positive");
    if (opts_.max_order < 1 || opts_.max_order > kMaxOrder)
        throw std::invalid_argument("solve_dae: max_order must lie in 1..5");
    if (!std::is_sorted(prob_.schedule.begin(), prob_.schedule.end()))
        throw std::invalid_argument("solve_dae: schedule must be ascending");
    if (!std::is_sorted(prob_.hard_times.begin(), prob_.hard_times.end()))
        throw std::invalid_argument("solve_dae: hard_times must be ascending");
}

double BdfDaeSolver::initial_step(const Eigen::VectorXd& udot0) const {
    if (opts_.h_init > 0.0)
        return std::clamp(opts_.h_init, 10.0 * min_step_, std::min(opts_.h_max, span_));
    const Eigen::VectorXd scale = (opts_.atol + opts_.rtol * u_.cwiseAbs().array()).matrix();
    const double d1 = rms_norm(udot0.cwiseQuotient(scale));
    double h = (d1 > 1e-30) ? 0.01 / d1 : 1e-3 * span_;
    return std::clamp(h, 10.0 * min_step_, std::min(opts_.h_max, 1e-2 * span_));
}

void BdfDaeSolver::change_step(double factor) {
    // Rescale the difference array to the new spacing and reset the
    // equal-step counter.
    h_abs_ *= factor;
    const Eigen::MatrixXd RU = compute_R(order_, factor) * compute_R(order_, 1.0);
    std::vector<Eigen::VectorXd> newD(order_ + 1);
    for (int i = 0; i <= order_; ++i) {
        newD[i] = Eigen::VectorXd::Zero(n_);
        for (int k = 0; k <= order_; ++k)
            newD[i] += RU(k, i) * D_[k];
    }
    for (int i = 0; i <= order_; ++i)
        D_[i] = std::move(newD[i]);
    n_equal_steps_ = 0;
}

void BdfDaeSolver::refresh_jacobian(double t, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& udot) {
    J_ = fd_jacobian(prob_.residual, u, udot, t, opts_.fd_typical_scale);
    stats_.jacobian_evals++;
    stats_.residual_evals += n_ + 1;
    have_jac_ = true;
    current_jac_ = true;
    lu_valid_ = false;
}

bool BdfDaeSolver::try_refresh_jacobian(double t, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& udot) {
    // An unevaluable predicted state (film thickness through zero, overflow)
    // is handled like a Newton failure, not a fatal error.
    try {
        refresh_jacobian(t, u, udot);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void BdfDaeSolver::ensure_iteration_matrix(double c) {
    if (lu_valid_ && std::abs(c / c_lu_ - 1.0) <= kLeadingCoeffDrift)
        return;
    Eigen::MatrixXd W = -J_;
    for (int i = 0; i < n_; ++i)
        W(i, i) += c * prob_.mass_diag[i];
    lu_.compute(W);
    c_lu_ = c;
    lu_valid_ = true;
    stats_.lu_factorizations++;
}

bool BdfDaeSolver::newton_solve(double t_new, const Eigen::VectorXd& u_pred,
                                const Eigen::VectorXd& psi, double c,
                                const Eigen::VectorXd& scale, Eigen::VectorXd& u_out,
                                Eigen::VectorXd& d_out, int& iters) {
    const double tol =
        std::max(10.0 * kEps / opts_.rtol, std::min(0.03, std::sqrt(opts_.rtol)));
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd u = u_pred;
    Eigen::VectorXd udot = c * (d + psi);
    double dy_norm_old = -1.0;
    bool converged = false;
    iters = 0;
    for (int k = 0; k < kNewtonMaxIter; ++k) {
        try {
            prob_.residual(u, udot, t_new, r_work_);
        } catch (const std::exception&) {
            break; // evaluation failure counts as nonconvergence
        }
        stats_.residual_evals++;
        if (!r_work_.allFinite())
            break;
        const Eigen::VectorXd dy = lu_.solve(-r_work_);
        const double dy_norm = rms_norm(dy.cwiseQuotient(scale));
        double rate = -1.0;
        if (dy_norm_old >= 0.0 && dy_norm_old > 0.0)
            rate = dy_norm / dy_norm_old;
        if (rate >= 0.0 &&
            (rate >= 1.0 ||
             std::pow(rate, kNewtonMaxIter - k) / (1.0 - rate) * dy_norm > tol))
            break;
        u += dy;
        d += dy;
        udot = c * (d + psi);
        iters = k + 1;
        stats_.newton_iters++;
        if (dy_norm == 0.0 || (rate >= 0.0 && rate / (1.0 - rate) * dy_norm < tol)) {
            converged = true;
            break;
        }
        dy_norm_old = dy_norm;
    }
    if (converged) {
        u_out = u;
        d_out = d;
    }
    return converged;
}

Eigen::VectorXd BdfDaeSolver::interpolate(double s) const {
    // Newton backward-difference form through the last order_+1 points at
    // spacing h ending at t_.
    Eigen::VectorXd y = D_[0];
    double p = 1.0;
    for (int j = 1; j <= order_; ++j) {
        p *= (s - (t_ - (j - 1) * h_abs_)) / (j * h_abs_);
        y += p * D_[j];
    }
    return y;
}

void BdfDaeSolver::emit_until(double t_old, double t_new) {
    if (!observer_)
        return;
    const auto& sched = prob_.schedule;
    while (sched_idx_ < sched.size() && sched[sched_idx_] <= t_new + 1e-12 * span_) {
        const double s = std::min(sched[sched_idx_], t_new);
        if (s > t_old)
            observer_(sched[sched_idx_], interpolate(s));
        ++sched_idx_;
    }
}

void BdfDaeSolver::step() {
    bool accepted = false;
    while (!accepted) {
        if (h_abs_ < min_step_)
            throw StagnationError(t_, "step size underflow at t=" + std::to_string(t_));
        if (stats_.steps + stats_.rejected_error + stats_.rejected_newton > opts_.max_steps)
            throw StagnationError(t_, "step budget exhausted at t=" + std::to_string(t_));

        double h = h_abs_;
        double t_new = t_ + h;
        while (hard_idx_ < prob_.hard_times.size() &&
               prob_.hard_times[hard_idx_] <= t_ + 1e-12 * span_)
            ++hard_idx_;
        double t_limit = t_end_;
        if (hard_idx_ < prob_.hard_times.size())
            t_limit = std::min(t_limit, prob_.hard_times[hard_idx_]);
        if (t_new > t_limit) {
            t_new = t_limit;
            change_step((t_new - t_) / h);
            h = h_abs_;
        }

        Eigen::VectorXd u_pred = Eigen::VectorXd::Zero(n_);
        for (int j = 0; j <= order_; ++j)
            u_pred += D_[j];
        const Eigen::VectorXd scale =
            (opts_.atol + opts_.rtol * u_pred.cwiseAbs().array()).matrix();

        const double gk = gamma(order_);
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(n_);
        for (int j = 1; j <= order_; ++j)
            psi += (gamma(j) / gk) * D_[j];
        const double c = gk / h;

        bool jac_usable = true;
        if (opts_.jac_refresh_policy == DaeOptions::JacRefresh::EveryStep || !have_jac_)
            jac_usable = try_refresh_jacobian(t_new, u_pred, c * psi);

        Eigen::VectorXd u_new(n_), d(n_);
        int iters = 0;
        bool converged = false;
        while (jac_usable && have_jac_) {
            ensure_iteration_matrix(c);
            converged = newton_solve(t_new, u_pred, psi, c, scale, u_new, d, iters);
            if (converged)
                break;
            if (lu_valid_ && c_lu_ != c) {
                lu_valid_ = false; // retry with an exact-coefficient factorization
                continue;
            }
            if (!current_jac_) {
                if (!try_refresh_jacobian(t_new, u_pred, c * psi))
                    break;
                continue;
            }
            break;
        }
        if (!converged) {
            stats_.rejected_newton++;
            change_step(0.5);
            lu_valid_ = false;
            continue;
        }

        const double safety =
            0.9 * (2.0 * kNewtonMaxIter + 1.0) / (2.0 * kNewtonMaxIter + iters);
        const Eigen::VectorXd scale_new =
            (opts_.atol + opts_.rtol * u_new.cwiseAbs().array()).matrix();
        const double err_norm =
            rms_norm((error_const(order_) * d).cwiseQuotient(scale_new));
        if (err_norm > 1.0) {
            stats_.rejected_error++;
            const double factor =
                std::max(kMinFactor, safety * std::pow(err_norm, -1.0 / (order_ + 1)));
            change_step(factor);
            continue;
        }

        // Accept: advance the difference array.
        stats_.steps++;
        n_equal_steps_++;
        const double t_old = t_;
        t_ = t_new;
        u_ = u_new;
        D_[order_ + 2] = d - D_[order_ + 1];
        D_[order_ + 1] = d;
        for (int j = order_; j >= 0; --j)
            D_[j] += D_[j + 1];
        emit_until(t_old, t_new);
        current_jac_ = false;
        accepted = true;

        if (n_equal_steps_ < order_ + 1)
            return; // keep h and order; the factored matrix stays valid

        // Consider an order change based on the scaled differences.
        const double inf = std::numeric_limits<double>::infinity();
        double err_m = inf, err_p = inf;
        if (order_ > 1)
            err_m = rms_norm((error_const(order_ - 1) * D_[order_]).cwiseQuotient(scale_new));
        if (order_ < opts_.max_order)
            err_p = rms_norm((error_const(order_ + 1) * D_[order_ + 2]).cwiseQuotient(scale_new));

        const double f_m = err_m > 0 ? std::pow(err_m, -1.0 / order_) : kMaxFactor / safety;
        const double f_0 =
            err_norm > 0 ? std::pow(err_norm, -1.0 / (order_ + 1)) : kMaxFactor / safety;
        const double f_p = err_p > 0 ? std::pow(err_p, -1.0 / (order_ + 2)) : kMaxFactor / safety;

        int delta = 0;
        double best = f_0;
        if (f_m > best) {
            best = f_m;
            delta = -1;
        }
        if (f_p > best) {
            best = f_p;
            delta = 1;
        }
        order_ += delta;

        double factor = std::min(kMaxFactor, safety * best);
        if (h_abs_ * factor > opts_.h_max)
            factor = opts_.h_max / h_abs_;
        factor = std::max(factor, kMinFactor);
        change_step(factor);
    }
}

DaeSolution BdfDaeSolver::run() {
    validate();
    t_ = prob_.t_start;
    t_end_ = prob_.t_end;
    span_ = t_end_ - t_;
    min_step_ = 1e-14 * span_;
    u_ = prob_.u0;

    // Emit schedule points at the start time.
    if (observer_) {
        while (sched_idx_ < prob_.schedule.size() &&
               prob_.schedule[sched_idx_] <= t_ + 1e-12 * span_) {
            observer_(prob_.schedule[sched_idx_], u_);
            ++sched_idx_;
        }
    }

    // Initial slope: differential rows of f; algebraic rows start flat.
    Eigen::VectorXd r0(n_);
    prob_.residual(u_, Eigen::VectorXd::Zero(n_), t_, r0);
    stats_.residual_evals++;
    if (!r0.allFinite())
        throw NumericalBreakdownError("solve_dae: residual nonfinite at the initial state");
    const Eigen::VectorXd udot0 = prob_.mass_diag.cwiseProduct(-r0);

    h_abs_ = initial_step(udot0);
    order_ = 1;
    n_equal_steps_ = 0;
    D_.assign(kMaxOrder + 3, Eigen::VectorXd::Zero(n_));
    D_[0] = u_;
    D_[1] = h_abs_ * udot0;

    while (t_ < t_end_ - 1e-12 * span_)
        step();

    // Flush schedule points that float fuzz left behind.
    if (observer_) {
        while (sched_idx_ < prob_.schedule.size()) {
            observer_(prob_.schedule[sched_idx_], u_);
            ++sched_idx_;
        }
    }
    return {t_, u_, stats_};
}

} // namespace

Eigen::VectorXd make_consistent(const Eigen::VectorXd& u0, double t0, const DaeProblem& problem,
                                double atol, int max_iter) {
    const int n = int(u0.size());
    std::vector<int> alg;
    for (int i = 0; i < n; ++i)
        if (problem.mass_diag[i] == 0.0)
            alg.push_back(i);
    if (alg.empty())
        return u0;

    Eigen::VectorXd u = u0;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r(n), rp(n);
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
    const int nb = int(alg.size());

    for (int it = 0; it < max_iter; ++it) {
        problem.residual(u, zero, t0, r);
        double rmax = 0.0;
        for (int b : alg)
            rmax = std::max(rmax, std::abs(r[b]));
        if (!std::isfinite(rmax))
            throw InconsistentInitialDataError("make_consistent: nonfinite algebraic residual");
        if (rmax < atol)
            return u;

        Eigen::MatrixXd Jb(nb, nb);
        for (int col = 0; col < nb; ++col) {
            const int idx = alg[col];
            const double delta = eps * std::max(std::abs(u[idx]), 1.0);
            const double saved = u[idx];
            u[idx] = saved + delta;
            problem.residual(u, zero, t0, rp);
            u[idx] = saved;
            for (int row = 0; row < nb; ++row)
                Jb(row, col) = (rp[alg[row]] - r[alg[row]]) / delta;
        }
        Eigen::VectorXd rb(nb);
        for (int row = 0; row < nb; ++row)
            rb[row] = r[alg[row]];
        const Eigen::VectorXd db = Jb.partialPivLu().solve(-rb);
        if (!db.allFinite())
            throw InconsistentInitialDataError("make_consistent: Newton step nonfinite");
        for (int row = 0; row < nb; ++row)
            u[alg[row]] += db[row];
    }
    throw InconsistentInitialDataError(
        "make_consistent: algebraic residual not below atol after Newton iteration");
}

Eigen::MatrixXd fd_jacobian(const DaeResidualFn& residual, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& udot, double t, double typical_scale) {
    const int n = int(u.size());
    Eigen::VectorXd r0(n), rp(n);
    residual(u, udot, t, r0);
    if (!r0.allFinite())
        throw JacobianEvalError("fd_jacobian: residual nonfinite at the base point");
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd up = u;
    for (int j = 0; j < n; ++j) {
        const double delta = eps * std::max(std::abs(u[j]), typical_scale);
        up[j] = u[j] + delta;
        residual(up, udot, t, rp);
        up[j] = u[j];
        if (!rp.allFinite())
            throw JacobianEvalError("fd_jacobian: residual nonfinite at a perturbed point");
        // J is the Jacobian of f = M*udot - res, so columns get a sign flip.
        J.col(j) = (r0 - rp) / delta;
    }
    return J;
}

DaeSolution solve_dae(const DaeProblem& problem, const DaeOptions& opts,
                      const DaeObserver& observer) {
    BdfDaeSolver solver(problem, opts, observer);
    return solver.run();
}

} // namespace blink
