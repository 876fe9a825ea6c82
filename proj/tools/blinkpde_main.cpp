// Experiment driver for diffusion problems on the blinking eye-shaped domain.
//
//   blinkpde run --preset heat51 [--kappa X] [--grid 32x48] [--rtol R] [--out DIR]
//   blinkpde validate --config FILE
//   blinkpde sweep --config FILE
//
// Exit codes: 0 success with thresholds met, 2 thresholds violated,
// 3 integrator stagnation, 4 configuration error.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "blink/experiment.hpp"

namespace {

int parse_grid(const std::string& s, blink::ExperimentConfig& cfg) {
    const auto x = s.find('x');
    if (x == std::string::npos)
        return -1;
    try {
        cfg.nx = std::stoi(s.substr(0, x));
        cfg.ny = std::stoi(s.substr(x + 1));
    } catch (const std::exception&) {
        return -1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion PDEs on a blinking eye-shaped domain"};
    app.require_subcommand(1);

    std::string preset_name, config_file, grid_spec, out_dir;
    double kappa = -1.0, rtol = -1.0, atol = -1.0, h0 = -1.0;

    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    run_cmd->add_option("--preset", preset_name, "heat51 | porous52 | film53");
    run_cmd->add_option("--config", config_file, "key = value config file");
    run_cmd->add_option("--kappa", kappa, "override flux.kappa");
    run_cmd->add_option("--grid", grid_spec, "override grid, e.g. 32x48");
    run_cmd->add_option("--rtol", rtol, "override solver.rtol");
    run_cmd->add_option("--atol", atol, "override solver.atol");
    run_cmd->add_option("--h0", h0, "override the uniform initial value");
    run_cmd->add_option("--out", out_dir, "output directory");

    std::string validate_file;
    auto* val_cmd = app.add_subcommand("validate", "check a config file");
    val_cmd->add_option("--config", validate_file, "config file")->required();

    std::string sweep_file, sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a kappa sweep in parallel");
    sweep_cmd->add_option("--config", sweep_file, "config file with sweep.kappa")->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            blink::ExperimentConfig cfg;
            if (!preset_name.empty())
                cfg = blink::preset(preset_name);
            else if (!config_file.empty())
                cfg = blink::parse_config_file(config_file);
            else {
                std::fprintf(stderr, "run: need --preset or --config\n");
                return blink::kConfigError;
            }
            if (!config_file.empty() && !preset_name.empty())
                cfg = blink::parse_config_file(config_file);
            if (kappa >= 0.0)
                cfg.kappa = kappa;
            if (rtol > 0.0)
                cfg.rtol = rtol;
            if (atol > 0.0)
                cfg.atol = atol;
            if (h0 > 0.0)
                cfg.h0 = h0;
            if (!grid_spec.empty() && parse_grid(grid_spec, cfg) != 0) {
                std::fprintf(stderr, "run: bad --grid '%s', expected NxM\n",
                             grid_spec.c_str());
                return blink::kConfigError;
            }
            if (!out_dir.empty())
                cfg.out_dir = out_dir;

            const blink::RunResult res = blink::run(cfg);
            for (const auto& c : res.checks)
                std::printf("%s: %s (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                            c.detail.c_str());
            if (res.exit_code == blink::kOk)
                std::printf("ok: results in %s (%.1f s, %ld steps)\n", cfg.out_dir.c_str(),
                            res.wall_seconds, res.stats.steps);
            return res.exit_code;
        }
        if (val_cmd->parsed()) {
            const auto cfg = blink::parse_config_file(validate_file);
            const auto violations = blink::validate(cfg);
            for (const auto& v : violations)
                std::printf("violation: %s\n", v.c_str());
            if (violations.empty()) {
                std::printf("config ok\n");
                return blink::kOk;
            }
            return blink::kConfigError;
        }
        if (sweep_cmd->parsed()) {
            auto cfg = blink::parse_config_file(sweep_file);
            if (!sweep_out.empty())
                cfg.out_dir = sweep_out;
            return blink::sweep(cfg);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return blink::kConfigError;
    }
    return blink::kConfigError;
}
