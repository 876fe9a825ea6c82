#include "blink/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "blink/errors.hpp"

namespace blink {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * double(i) / double(n - 1);
    return v;
}

FluxModel make_flux(const ExperimentConfig& cfg) {
    switch (cfg.flux_kind) {
    case FluxModel::Kind::LinearHeat:
        return FluxModel::linear_heat(cfg.kappa);
    case FluxModel::Kind::PorousLinear:
        return FluxModel::porous_linear(cfg.kappa);
    case FluxModel::Kind::ThinFilmAnalog:
        return FluxModel::thin_film(cfg.A, cfg.B);
    }
    throw std::logic_error("make_flux: unknown kind");
}

BoundaryCondition make_bc(const ExperimentConfig& cfg) {
    if (cfg.bc == BoundaryCondition::Kind::DirichletHeatKernel)
        return BoundaryCondition::dirichlet_heat_kernel(cfg.kernel_t0, cfg.kernel_x0,
                                                        cfg.kernel_y0, cfg.kappa);
    return BoundaryCondition::no_flux();
}

Eigen::MatrixXd initial_field(const ExperimentConfig& cfg, const EyeDiffusionDae& dae) {
    const MappedGrid mg = dae.grid_at(0.0);
    Eigen::MatrixXd H(cfg.nx, cfg.ny);
    switch (cfg.ic) {
    case ExperimentConfig::InitialCondition::HeatKernel:
        for (int j = 0; j < cfg.ny; ++j)
            for (int i = 0; i < cfg.nx; ++i)
                H(i, j) = heat_kernel(cfg.kernel_t0, mg.x(i, j) - cfg.kernel_x0,
                                      mg.y(i, j) - cfg.kernel_y0, cfg.kappa);
        break;
    case ExperimentConfig::InitialCondition::StripBump:
        for (int j = 0; j < cfg.ny; ++j)
            for (int i = 0; i < cfg.nx; ++i) {
                const double xt = mg.xtilde(i, j), yt = mg.ytilde(i, j);
                H(i, j) = 1.0 - 0.8 * std::exp(-6.0 * (yt + 0.2) * (yt + 0.2)
                                               - 4.0 * (xt - 1.0) * (xt - 1.0));
            }
        break;
    case ExperimentConfig::InitialCondition::Uniform:
        H.setConstant(cfg.h0);
        break;
    }
    return H;
}

bool probes_lid(const ExperimentConfig& cfg) {
    return cfg.experiment == ExperimentConfig::Kind::Film && cfg.nx % 2 == 1;
}

double porous_mass_bound(double kappa) {
    if (kappa == 1.0)
        return 2e-6;
    if (kappa == 0.5)
        return 5e-6;
    return 1e-5;
}

void evaluate_thresholds(const ExperimentConfig& cfg, RunResult& res) {
    auto add = [&res](const std::string& name, bool pass, const std::string& detail) {
        res.checks.push_back({name, pass, detail});
    };

    switch (cfg.experiment) {
    case ExperimentConfig::Kind::Heat: {
        double emax = 0.0;
        for (double e : res.error_values)
            emax = std::max(emax, e);
        add("relative L2 error <= 1e-4 at all output times", emax <= 1e-4,
            "max relerr = " + fmtg(emax));

        // Nonincreasing trend after t ~ 0.02: no sample rises above 1.05x the
        // level at 0.02 and the final value sits at or below it.
        double e02 = -1.0;
        bool no_resurgence = true;
        for (size_t k = 0; k < res.error_times.size(); ++k) {
            if (res.error_times[k] < 0.02)
                continue;
            if (e02 < 0.0)
                e02 = res.error_values[k];
            else if (res.error_values[k] > 1.05 * e02)
                no_resurgence = false;
        }
        const bool final_below = !res.error_values.empty() && e02 > 0.0 &&
                                 res.error_values.back() <= e02;
        add("error trend nonincreasing after t=0.02", no_resurgence && final_below,
            "level at 0.02 = " + fmtg(e02) + ", final = " +
                (res.error_values.empty() ? "n/a" : fmtg(res.error_values.back())));
        break;
    }
    case ExperimentConfig::Kind::Porous: {
        double drift = 0.0;
        for (double r : res.mass_series.relative_change)
            drift = std::max(drift, std::abs(r));
        const double bound = porous_mass_bound(cfg.kappa);
        add("|M(t)-M(0)|/M(0) <= " + fmtg(bound) + " (kappa=" + fmtg(cfg.kappa) + ")",
            drift <= bound, "max |relchange| = " + fmtg(drift));
        break;
    }
    case ExperimentConfig::Kind::Film: {
        auto snap = res.snapshots.find(0.5);
        if (snap == res.snapshots.end()) {
            for (auto& [ts, Hs] : res.snapshots)
                if (std::abs(ts - 0.5) < 1e-9)
                    snap = res.snapshots.find(ts);
        }
        if (snap != res.snapshots.end()) {
            const auto& Hs = snap->second;
            // area-weighted mean; a plain node average would over-weight the
            // edge-crowded Chebyshev nodes
            const auto gx = make_cheb_grid(cfg.nx);
            const auto gy = make_cheb_grid(cfg.ny);
            const MappedGrid mg = build_mapped_grid(gx, gy, cfg.map, cfg.lid, 0.5);
            const double mean = mass(Hs, mg, gx, gy) /
                                mass(Eigen::MatrixXd::Ones(cfg.nx, cfg.ny), mg, gx, gy);
            const double spread = (Hs.maxCoeff() - Hs.minCoeff()) / mean;
            add("t=0.5 field uniform within 2% spread", spread <= 0.02,
                "spread = " + fmtg(spread));
            add("t=0.5 value 0.42 +- 0.02", std::abs(mean - 0.42) <= 0.02,
                "area-weighted mean = " + fmtg(mean));
        } else {
            add("t=0.5 snapshot present", false, "missing");
        }

        double umin = std::numeric_limits<double>::infinity();
        double tmin = 0.0;
        for (size_t k = 0; k < res.lid_times.size(); ++k) {
            if (res.lid_times[k] > 1.0 + 1e-9)
                break; // first cycle only
            if (res.lid_upper[k] < umin) {
                umin = res.lid_upper[k];
                tmin = res.lid_times[k];
            }
        }
        add("first-cycle upper-lid minimum 0.01067 +- 10%",
            std::abs(umin - 0.01067) <= 0.1 * 0.01067,
            "min = " + fmtg(umin) + " at t = " + fmtg(tmin));
        add("minimum attained at t = 0.78 +- 0.02", std::abs(tmin - 0.78) <= 0.02 + 1e-12,
            "t = " + fmtg(tmin));

        double drift = 0.0;
        for (double r : res.mass_series.relative_change)
            drift = std::max(drift, std::abs(r));
        add("|M(t)-M(0)|/M(0) <= 5e-5", drift <= 5e-5, "max |relchange| = " + fmtg(drift));
        break;
    }
    }
}

double paper_reference_seconds(const std::string& preset_name) {
    if (preset_name == "heat51")
        return 11.3;
    if (preset_name == "porous52")
        return 73.0;
    if (preset_name == "film53")
        return 40.0;
    return 0.0;
}

void write_summary(const ExperimentConfig& cfg, const RunResult& res) {
    std::ofstream f(std::filesystem::path(cfg.out_dir) / "summary.txt");
    f << "experiment: " << cfg.preset_name << "\n";
    f << "grid: " << cfg.nx << "x" << cfg.ny << "\n";
    f << "lid: c=" << fmtg(cfg.lid.c) << " nu=" << fmtg(cfg.lid.nu) << "\n";
    f << "map: alpha=" << fmtg(cfg.map.alpha) << " gamma=" << fmtg(cfg.map.gamma) << "\n";
    f << "tolerances: rtol=" << fmtg(cfg.rtol) << " atol=" << fmtg(cfg.atol) << "\n";
    f << "wall time: " << fmtg(res.wall_seconds) << " s\n";
    const double ref = paper_reference_seconds(cfg.preset_name);
    if (ref > 0.0)
        f << "reference wall time (2014 hardware, not gated): " << fmtg(ref) << " s\n";
    f << "steps: " << res.stats.steps << "\n";
    f << "rejected steps (error/newton): " << res.stats.rejected_error << "/"
      << res.stats.rejected_newton << "\n";
    f << "newton iterations: " << res.stats.newton_iters << "\n";
    f << "residual evaluations: " << res.stats.residual_evals << "\n";
    f << "jacobian evaluations: " << res.stats.jacobian_evals << "\n";
    f << "lu factorizations: " << res.stats.lu_factorizations << "\n";
    if (res.exit_code == kStagnation) {
        f << "stagnation: integrator stalled at t = " << fmt17(res.stagnation_t) << "\n";
        return;
    }
    for (const auto& c : res.checks)
        f << (c.pass ? "PASS" : "FAIL") << ": " << c.name << " (" << c.detail << ")\n";
}

void write_series(const std::string& path, const std::string& header,
                  const std::vector<std::vector<double>>& columns) {
    std::ofstream f(path);
    f << header << "\n";
    const size_t rows = columns.empty() ? 0 : columns[0].size();
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c)
            f << (c ? "," : "") << fmt17(columns[c][r]);
        f << "\n";
    }
}

void write_snapshot(const std::string& path, const Eigen::MatrixXd& H, const MappedGrid& mg) {
    std::ofstream f(path);
    f << "x,y,h\n";
    for (Eigen::Index j = 0; j < H.cols(); ++j)
        for (Eigen::Index i = 0; i < H.rows(); ++i)
            f << fmt17(mg.x(i, j)) << "," << fmt17(mg.y(i, j)) << "," << fmt17(H(i, j))
              << "\n";
}

} // namespace

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.preset_name = name;
    if (name == "heat51") {
        cfg.experiment = ExperimentConfig::Kind::Heat;
        cfg.nx = 28;
        cfg.ny = 24;
        cfg.lid = {0.8, 16.0};
        cfg.flux_kind = FluxModel::Kind::LinearHeat;
        cfg.kappa = 1.0;
        cfg.bc = BoundaryCondition::Kind::DirichletHeatKernel;
        cfg.kernel_t0 = 0.01;
        cfg.kernel_x0 = 0.1;
        cfg.kernel_y0 = 0.2;
        cfg.ic = ExperimentConfig::InitialCondition::HeatKernel;
        cfg.t_end = 0.125;
        cfg.snapshot_times = {0.0, 0.03125, 0.0625, 0.09375, 0.125};
        cfg.series_samples = 65;
        cfg.rtol = cfg.atol = 1e-9;
    } else if (name == "porous52") {
        cfg.experiment = ExperimentConfig::Kind::Porous;
        cfg.nx = 32;
        cfg.ny = 48;
        cfg.lid = {0.7, 1.0};
        cfg.flux_kind = FluxModel::Kind::PorousLinear;
        cfg.kappa = 0.5;
        cfg.bc = BoundaryCondition::Kind::NoFlux;
        cfg.ic = ExperimentConfig::InitialCondition::StripBump;
        cfg.t_end = 2.0;
        cfg.snapshot_times = {0.0, 0.25, 0.5, 0.75, 1.0};
        cfg.series_samples = 201;
        cfg.rtol = cfg.atol = 1e-9;
    } else if (name == "film53") {
        cfg.experiment = ExperimentConfig::Kind::Film;
        cfg.nx = 31;
        cfg.ny = 40;
        cfg.lid = {0.8, 1.0};
        cfg.flux_kind = FluxModel::Kind::ThinFilmAnalog;
        cfg.A = 1.0;
        cfg.B = 1e-9;
        cfg.bc = BoundaryCondition::Kind::NoFlux;
        cfg.ic = ExperimentConfig::InitialCondition::Uniform;
        cfg.h0 = 0.1;
        cfg.t_end = 2.0;
        cfg.snapshot_times = {0.0, 0.25, 0.5, 0.75, 1.0};
        cfg.series_samples = 201;
        cfg.rtol = cfg.atol = 1e-7;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return cfg;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
    std::vector<std::string> v;
    if (cfg.nx < 4)
        v.push_back("grid.nx: need at least 4 nodes");
    if (cfg.ny < 4)
        v.push_back("grid.ny: need at least 4 nodes");
    if (!(cfg.lid.c > 0.0) || cfg.lid.c > 1.0)
        v.push_back("lid.c: closure fraction must lie in (0, 1]");
    if (!(cfg.lid.nu > 0.0))
        v.push_back("lid.nu: blink frequency must be positive");
    if (!(cfg.map.alpha > 1.0))
        v.push_back("map.alpha: must exceed 1 for a truncated strip");
    if (!(cfg.map.gamma > 0.0))
        v.push_back("map.gamma: must be positive");
    switch (cfg.flux_kind) {
    case FluxModel::Kind::LinearHeat:
        if (!(cfg.kappa > 0.0))
            v.push_back("flux.kappa: diffusivity must be positive");
        break;
    case FluxModel::Kind::PorousLinear:
        if (!(cfg.kappa > 0.0) || cfg.kappa > 1.0)
            v.push_back("flux.kappa: porous weight must lie in (0, 1]");
        break;
    case FluxModel::Kind::ThinFilmAnalog:
        if (!(cfg.A > 0.0))
            v.push_back("flux.A: must be positive");
        if (cfg.B < 0.0)
            v.push_back("flux.B: must be nonnegative");
        break;
    }
    if (cfg.bc == BoundaryCondition::Kind::DirichletHeatKernel) {
        if (!(cfg.kernel_t0 > 0.0))
            v.push_back("kernel.t0: must be positive");
        // Source must lie inside the initial eye domain: pull back through
        // the inverse map and check the strip bounds.
        const std::complex<double> z(cfg.kernel_x0, cfg.kernel_y0);
        if (std::abs(z) >= 1.0) {
            v.push_back("kernel.x0/kernel.y0: source must lie inside the eye domain");
        } else {
            const std::complex<double> zt = 2.0 * std::atanh(z);
            const double lam0 = lid_lambda(cfg.lid, 0.0);
            if (!(zt.imag() > -1.0) || !(zt.imag() < lam0) ||
                std::abs(zt.real()) >= cfg.map.xtilde_max())
                v.push_back("kernel.x0/kernel.y0: source must lie inside the eye domain");
        }
    }
    if (cfg.ic == ExperimentConfig::InitialCondition::Uniform && !(cfg.h0 > 0.0))
        v.push_back("ic.h0: uniform initial value must be positive");
    if (!(cfg.t_end > 0.0))
        v.push_back("time.t_end: must be positive");
    for (double ts : cfg.snapshot_times)
        if (ts < 0.0 || ts > cfg.t_end + 1e-12)
            v.push_back("time.snapshots: time " + fmtg(ts) + " outside [0, t_end]");
    if (cfg.series_samples < 2)
        v.push_back("series.n: need at least 2 samples");
    if (!(cfg.rtol > 0.0))
        v.push_back("solver.rtol: must be positive");
    if (!(cfg.atol > 0.0))
        v.push_back("solver.atol: must be positive");
    if (cfg.experiment == ExperimentConfig::Kind::Film && cfg.nx % 2 == 0)
        v.push_back("grid.nx: must be odd for film runs (lid-center probe needs xhat=0)");
    return v;
}

namespace {

ExperimentConfig::Kind parse_kind(const std::string& s) {
    if (s == "heat")
        return ExperimentConfig::Kind::Heat;
    if (s == "porous")
        return ExperimentConfig::Kind::Porous;
    if (s == "film")
        return ExperimentConfig::Kind::Film;
    throw std::invalid_argument("experiment: expected heat|porous|film, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    return out;
}

} // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "preset") {
        const std::string dir = cfg.out_dir;
        cfg = preset(value);
        cfg.out_dir = dir;
    } else if (key == "experiment") {
        cfg.experiment = parse_kind(value);
        switch (cfg.experiment) {
        case ExperimentConfig::Kind::Heat:
            cfg.flux_kind = FluxModel::Kind::LinearHeat;
            break;
        case ExperimentConfig::Kind::Porous:
            cfg.flux_kind = FluxModel::Kind::PorousLinear;
            break;
        case ExperimentConfig::Kind::Film:
            cfg.flux_kind = FluxModel::Kind::ThinFilmAnalog;
            break;
        }
    } else if (key == "grid.nx") {
        cfg.nx = std::stoi(value);
    } else if (key == "grid.ny") {
        cfg.ny = std::stoi(value);
    } else if (key == "lid.c") {
        cfg.lid.c = std::stod(value);
    } else if (key == "lid.nu") {
        cfg.lid.nu = std::stod(value);
    } else if (key == "map.alpha") {
        cfg.map.alpha = std::stod(value);
    } else if (key == "map.gamma") {
        cfg.map.gamma = std::stod(value);
    } else if (key == "flux.kappa") {
        cfg.kappa = std::stod(value);
    } else if (key == "flux.A") {
        cfg.A = std::stod(value);
    } else if (key == "flux.B") {
        cfg.B = std::stod(value);
    } else if (key == "bc") {
        if (value == "dirichlet-kernel")
            cfg.bc = BoundaryCondition::Kind::DirichletHeatKernel;
        else if (value == "no-flux")
            cfg.bc = BoundaryCondition::Kind::NoFlux;
        else
            throw std::invalid_argument("bc: expected dirichlet-kernel|no-flux");
    } else if (key == "kernel.t0") {
        cfg.kernel_t0 = std::stod(value);
    } else if (key == "kernel.x0") {
        cfg.kernel_x0 = std::stod(value);
    } else if (key == "kernel.y0") {
        cfg.kernel_y0 = std::stod(value);
    } else if (key == "ic") {
        if (value == "kernel")
            cfg.ic = ExperimentConfig::InitialCondition::HeatKernel;
        else if (value == "strip-bump")
            cfg.ic = ExperimentConfig::InitialCondition::StripBump;
        else if (value == "uniform")
            cfg.ic = ExperimentConfig::InitialCondition::Uniform;
        else
            throw std::invalid_argument("ic: expected kernel|strip-bump|uniform");
    } else if (key == "ic.h0") {
        cfg.h0 = std::stod(value);
    } else if (key == "time.t_end") {
        cfg.t_end = std::stod(value);
    } else if (key == "time.snapshots") {
        cfg.snapshot_times = parse_list(value);
    } else if (key == "series.n") {
        cfg.series_samples = std::stoi(value);
    } else if (key == "solver.rtol") {
        cfg.rtol = std::stod(value);
    } else if (key == "solver.atol") {
        cfg.atol = std::stod(value);
    } else if (key == "output.dir") {
        cfg.out_dir = value;
    } else if (key == "sweep.kappa") {
        cfg.sweep_kappas = parse_list(value);
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::invalid_argument("cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        if (eq == std::string::npos) {
            if (!trim(line).empty())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
    return cfg;
}

RunResult run(const ExperimentConfig& cfg) {
    RunResult res;
    const auto violations = validate(cfg);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::fprintf(stderr, "config error: %s\n", v.c_str());
        res.exit_code = kConfigError;
        return res;
    }

    namespace fs = std::filesystem;
    fs::create_directories(fs::path(cfg.out_dir) / "snapshots");

    EyeDiffusionDae dae(cfg.nx, cfg.ny, cfg.map, cfg.lid, make_flux(cfg), make_bc(cfg));

    DaeProblem problem;
    problem.residual = [&dae](const Eigen::VectorXd& u, const Eigen::VectorXd& udot, double t,
                              Eigen::VectorXd& out) { dae.residual(u, udot, t, out); };
    problem.mass_diag = dae.mass_diagonal();
    problem.t_start = 0.0;
    problem.t_end = cfg.t_end;

    const std::vector<double> series = linspace(0.0, cfg.t_end, cfg.series_samples);
    std::vector<double> schedule = series;
    schedule.insert(schedule.end(), cfg.snapshot_times.begin(), cfg.snapshot_times.end());
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end(),
                               [&](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   schedule.end());
    problem.schedule = schedule;

    const Eigen::MatrixXd H0 = initial_field(cfg, dae);
    Eigen::VectorXd u0 = Eigen::Map<const Eigen::VectorXd>(H0.data(), H0.size());
    u0 = make_consistent(u0, 0.0, problem, cfg.atol);
    problem.u0 = u0;

    DaeOptions opts;
    opts.rtol = cfg.rtol;
    opts.atol = cfg.atol;

    const bool dirichlet = cfg.bc == BoundaryCondition::Kind::DirichletHeatKernel;
    const bool lid_probe = probes_lid(cfg);
    auto is_series_time = [&series](double t) {
        auto it = std::lower_bound(series.begin(), series.end(), t - 1e-12);
        return it != series.end() && std::abs(*it - t) < 1e-9;
    };
    auto snapshot_time = [&cfg](double t) {
        for (double ts : cfg.snapshot_times)
            if (std::abs(ts - t) < 1e-12)
                return true;
        return false;
    };

    DaeObserver observer = [&](double t, const Eigen::VectorXd& u) {
        const Eigen::Map<const Eigen::MatrixXd> H(u.data(), cfg.nx, cfg.ny);
        const MappedGrid mg = dae.grid_at(t);
        if (is_series_time(t)) {
            res.mass_series.append(t, mass(H, mg, dae.grid_x(), dae.grid_y()));
            if (dirichlet) {
                auto exact = [&cfg, t](double x, double y) {
                    return heat_kernel(t + cfg.kernel_t0, x - cfg.kernel_x0, y - cfg.kernel_y0,
                                       cfg.kappa);
                };
                res.error_times.push_back(t);
                res.error_values.push_back(
                    l2_relative_error(H, exact, mg, dae.grid_x(), dae.grid_y()));
            }
            if (lid_probe) {
                const auto [up, lo] = lid_center_values(H, dae.grid_x(), dae.grid_y());
                res.lid_times.push_back(t);
                res.lid_upper.push_back(up);
                res.lid_lower.push_back(lo);
            }
        }
        if (snapshot_time(t)) {
            res.snapshots[t] = H;
            write_snapshot((fs::path(cfg.out_dir) / "snapshots" / ("t=" + fmtg(t) + ".csv"))
                               .string(),
                           H, mg);
        }
    };

    const auto t_begin = std::chrono::steady_clock::now();
    try {
        res.stats = solve_dae(problem, opts, observer).stats;
    } catch (const StagnationError& e) {
        res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                         t_begin)
                               .count();
        res.exit_code = kStagnation;
        res.stagnation_t = e.t_reached();
        std::fprintf(stderr, "integrator stagnation: last t reached = %.6g\n",
                     e.t_reached());
        write_summary(cfg, res);
        return res;
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();

    write_series((fs::path(cfg.out_dir) / "mass.csv").string(), "t,M,relchange",
                 {res.mass_series.times, res.mass_series.mass,
                  res.mass_series.relative_change});
    if (dirichlet)
        write_series((fs::path(cfg.out_dir) / "error.csv").string(), "t,relerr",
                     {res.error_times, res.error_values});
    if (lid_probe)
        write_series((fs::path(cfg.out_dir) / "lid.csv").string(), "t,upper,lower",
                     {res.lid_times, res.lid_upper, res.lid_lower});

    evaluate_thresholds(cfg, res);
    write_summary(cfg, res);
    for (const auto& c : res.checks)
        if (!c.pass)
            res.exit_code = kThresholdsViolated;
    return res;
}

int sweep(const ExperimentConfig& cfg) {
    if (cfg.sweep_kappas.empty()) {
        std::fprintf(stderr, "config error: sweep.kappa: no values given\n");
        return kConfigError;
    }
    std::vector<int> codes(cfg.sweep_kappas.size(), 0);
    std::vector<std::thread> workers;
    for (size_t i = 0; i < cfg.sweep_kappas.size(); ++i) {
        workers.emplace_back([&cfg, &codes, i]() {
            ExperimentConfig c = cfg;
            c.kappa = cfg.sweep_kappas[i];
            c.sweep_kappas.clear();
            c.out_dir = (std::filesystem::path(cfg.out_dir) /
                         ("kappa_" + fmtg(c.kappa)))
                            .string();
            codes[i] = run(c).exit_code;
        });
    }
    for (auto& w : workers)
        w.join();
    return *std::max_element(codes.begin(), codes.end());
}

} // namespace blink
