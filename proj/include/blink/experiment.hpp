#pragma once

#include <map>
#include <string>
#include <vector>

#include "blink/diagnostics.hpp"
#include "blink/integrator.hpp"
#include "blink/pde.hpp"

namespace blink {

/// One experiment: grid, lid, map, flux, boundary condition, schedules,
/// solver tolerances and output location.
struct ExperimentConfig {
    enum class Kind { Heat, Porous, Film };
    enum class InitialCondition { HeatKernel, StripBump, Uniform };

    std::string preset_name = "custom";
    Kind experiment = Kind::Heat;
    int nx = 28;
    int ny = 24;
    LidMotion lid{0.8, 16.0};
    StripMap map{1.2, 3.0};
    FluxModel::Kind flux_kind = FluxModel::Kind::LinearHeat;
    double kappa = 1.0;
    double A = 1.0;
    double B = 0.0;
    BoundaryCondition::Kind bc = BoundaryCondition::Kind::DirichletHeatKernel;
    double kernel_t0 = 0.01;
    double kernel_x0 = 0.1;
    double kernel_y0 = 0.2;
    InitialCondition ic = InitialCondition::HeatKernel;
    double h0 = 0.1; // uniform initial value (film)
    double t_end = 0.125;
    std::vector<double> snapshot_times;
    int series_samples = 65; // time-series rows, uniformly spaced over [0, t_end]
    double rtol = 1e-9;
    double atol = 1e-9;
    std::string out_dir = "out";
    std::vector<double> sweep_kappas; // sweep mode only
};

/// Built-in presets: heat51, porous52, film53.
ExperimentConfig preset(const std::string& name);

/// Empty iff the configuration is valid; otherwise one message per violated
/// field, each starting with the field name (e.g. "lid.c: ...").
std::vector<std::string> validate(const ExperimentConfig& cfg);

/// Flat key = value text format; '#' starts a comment. An optional
/// "preset" key seeds the configuration before the remaining keys override.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

enum ExitCode : int {
    kOk = 0,
    kThresholdsViolated = 2,
    kStagnation = 3,
    kConfigError = 4,
};

struct ThresholdCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    int exit_code = kOk;
    double stagnation_t = 0.0; // meaningful when exit_code == kStagnation
    MassSeries mass_series;
    std::vector<double> error_times, error_values; // Dirichlet runs
    std::vector<double> lid_times, lid_upper, lid_lower; // film probe runs
    std::map<double, Eigen::MatrixXd> snapshots;
    SolveStats stats;
    double wall_seconds = 0.0;
    std::vector<ThresholdCheck> checks;
};

/// Runs one experiment and writes snapshots/, mass.csv, error.csv / lid.csv
/// and summary.txt into cfg.out_dir. Exit code semantics: 0 ok, 2 thresholds
/// violated, 3 integrator stagnation, 4 invalid configuration.
RunResult run(const ExperimentConfig& cfg);

/// Runs cfg once per kappa in cfg.sweep_kappas, in parallel, each into
/// out_dir/kappa_<value>/. Returns the worst exit code.
int sweep(const ExperimentConfig& cfg);

} // namespace blink
