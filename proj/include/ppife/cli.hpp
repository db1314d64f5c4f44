#pragma once

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppife/study.hpp"

namespace ppife {

inline const char* valid_keys_help() {
    return "valid keys: ns, study, theta, epsilon, sigma0, alpha, beta_minus, beta_plus, "
           "dt_rule, t_final, init, csv, field, export, config";
}

/// Parses command-line flags and an optional `key = value` config file
/// (# comments). Flags override file entries; unknown keys are rejected.
inline RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"PPIFE convergence-study driver"};
    app.allow_config_extras(CLI::config_extras_mode::error);

    int ns = 0;
    std::vector<int> study;
    std::string init = "interpolation";

    app.set_config("--config", "", "config file (key = value lines, # comments)");
    app.add_option("--ns", ns, "single mesh size (overrides the study list)");
    app.add_option("--study", study, "mesh sizes, strictly increasing")->delimiter(',');
    app.add_option("--theta", cfg.theta, "time scheme parameter in [0,1]; 1 = backward Euler, 0.5 = Crank-Nicolson");
    app.add_option("--epsilon", cfg.epsilon, "bilinear form symmetrization parameter")
        ->check(CLI::IsMember({-1, 0, 1}));
    app.add_option("--sigma0", cfg.sigma0, "penalty strength on interface edges");
    app.add_option("--alpha", cfg.alpha, "penalty edge-length exponent");
    app.add_option("--beta-minus,--beta_minus", cfg.beta_minus, "diffusion coefficient inside the interface");
    app.add_option("--beta-plus,--beta_plus", cfg.beta_plus, "diffusion coefficient outside the interface");
    app.add_option("--dt-rule,--dt_rule", cfg.dt_rule, "time step rule: dt = c * h");
    app.add_option("--t-final,--t_final", cfg.t_final, "final time");
    app.add_option("--init", init, "initial condition: interpolation | projection")
        ->check(CLI::IsMember({"interpolation", "projection"}));
    app.add_option("--csv", cfg.csv_path, "CSV output path");
    app.add_option("--field", cfg.field_path, "field dump output path");
    app.add_flag("--export,--export_field", cfg.export_field, "write the field dump");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + valid_keys_help());
    }

    if (ns > 0) cfg.study = {ns};
    else if (!study.empty()) cfg.study = study;
    cfg.init = (init == "projection") ? InitMode::EllipticProjection : InitMode::Interpolation;
    try {
        cfg.validate();
    } catch (const UsageError& e) {
        throw UsageError(std::string(e.what()) + "\n" + valid_keys_help());
    }
    return cfg;
}

inline RunConfig parse_config(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return parse_config(args);
}

}  // namespace ppife
