// Command-line front end. Exit codes: 0 pass, 2 verification failure, 1 error.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bubble/bubble.hpp"

namespace {

using namespace bubble;

struct ParamSource {
    std::string config;
    std::vector<std::string> overrides;  // key=value
    double mass = 0.0;                   // 0: from config, else R_star = 1
};

void add_param_options(CLI::App* cmd, ParamSource& src) {
    cmd->add_option("--config", src.config, "INI file providing [params] and [equilibrium]");
    cmd->add_option("--param", src.overrides, "override one parameter, key=value")->take_all();
}

PhysicalParams resolve_params(const ParamSource& src, double* mass_out) {
    PhysicalParams p;
    double mass = 0.0;
    if (!src.config.empty()) {
        const SimulationConfig cfg = load_config(src.config);
        p = cfg.params;
        mass = cfg.mass;
    }
    std::map<std::string, double> kv{{"rho_l", p.rho_l}, {"mu_l", p.mu_l},   {"kappa_g", p.kappa_g},
                                     {"sigma", p.sigma}, {"T_inf", p.T_inf}, {"R_gas", p.R_gas},
                                     {"c_v", p.c_v},     {"gamma", p.gamma}, {"p_inf", p.p_inf}};
    for (const std::string& o : src.overrides) {
        const auto eqpos = o.find('=');
        if (eqpos == std::string::npos) throw Error(ErrorCode::ConfigInvalid, "--param expects key=value, got " + o);
        const std::string key = o.substr(0, eqpos);
        if (!kv.count(key)) throw Error(ErrorCode::ConfigInvalid, "unknown parameter " + key);
        kv[key] = detail::parse_double(o.substr(eqpos + 1), key);
    }
    p = params_from_map(kv);
    if (mass_out) *mass_out = src.mass > 0.0 ? src.mass : (mass > 0.0 ? mass : mass_for_radius(1.0, p));
    return p;
}

std::string fmt(double v) { return format_double(v); }

void print_report(const RunReport& rep) {
    for (const auto& e : rep.entries) {
        std::printf("%-32s %-15s value=%-24s tol=%-10s %s\n", e.name.c_str(), to_string(e.status).c_str(),
                    fmt(e.value).c_str(), fmt(e.tolerance).c_str(), e.detail.c_str());
    }
    std::printf("overall: %s\n", rep.passed() ? "PASS" : "FAIL");
}

std::pair<int, int> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const int v = detail::parse_int(text, "--l");
        return {v, v};
    }
    return {detail::parse_int(text.substr(0, dots), "--l"), detail::parse_int(text.substr(dots + 2), "--l")};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linearized gas-bubble dynamics: simulation and verification"};
    app.require_subcommand(1);

    ParamSource eq_src;
    std::vector<double> masses;
    auto* eq_cmd = app.add_subcommand("equilibrium", "equilibrium radius, pressure and density for given masses");
    add_param_options(eq_cmd, eq_src);
    eq_cmd->add_option("--mass", masses, "bubble mass (repeatable)")->required();

    ParamSource fr_src;
    std::string l_range = "2..6";
    auto* fr_cmd = app.add_subcommand("frequencies", "Lamb frequencies of shape modes");
    add_param_options(fr_cmd, fr_src);
    fr_cmd->add_option("--mass", fr_src.mass, "bubble mass (default: radius 1)");
    fr_cmd->add_option("--l", l_range, "degree or range a..b")->capture_default_str();

    std::string sim_config, sim_out;
    bool sim_project = false, sim_demo = false;
    auto* sim_cmd = app.add_subcommand("simulate", "run a configured simulation and write series and report");
    sim_cmd->add_option("config", sim_config, "INI configuration")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--out", sim_out, "output directory (overrides [output] dir)");
    sim_cmd->add_flag("--project-radial", sim_project, "drop l >= 1 data when mu_l > 0 and run the radial system");
    sim_cmd->add_flag("--viscous-demo", sim_demo, "evolve viscous shape modes despite incompatible data");

    ParamSource sp_src;
    int sp_n = 101, sp_count = 5;
    std::string sp_export;
    auto* sp_cmd = app.add_subcommand("spectrum", "slowest eigenvalues of the monopole operator");
    add_param_options(sp_cmd, sp_src);
    sp_cmd->add_option("--mass", sp_src.mass, "bubble mass (default: radius 1)");
    sp_cmd->add_option("--n", sp_n, "radial nodes")->capture_default_str();
    sp_cmd->add_option("--count", sp_count, "eigenvalues to print")->capture_default_str();
    sp_cmd->add_option("--export-operator", sp_export, "write the dense operator as CSV");

    std::string cv_file, cv_json;
    auto* cv_cmd = app.add_subcommand("check-viscous", "tangential-stress compatibility of multipole data");
    cv_cmd->add_option("coefficients", cv_file, "CSV with columns ell,m,re,im")->required()->check(CLI::ExistingFile);
    cv_cmd->add_option("--json", cv_json, "also write the report as JSON");

    std::string vf_dir;
    auto* vf_cmd = app.add_subcommand("verify", "re-verify a finished run directory");
    vf_cmd->add_option("run_dir", vf_dir, "directory written by simulate")->required()->check(CLI::ExistingDirectory);

    int eb_l = 0, eb_count = 10;
    std::string eb_out;
    auto* eb_cmd = app.add_subcommand("eigenbasis", "dump Dirichlet Bessel zeros and norms");
    eb_cmd->add_option("--l", eb_l, "degree")->capture_default_str();
    eb_cmd->add_option("--count", eb_count, "number of zeros")->capture_default_str();
    eb_cmd->add_option("--out", eb_out, "CSV file (default: stdout table)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*eq_cmd) {
            const PhysicalParams p = resolve_params(eq_src, nullptr);
            std::printf("%-24s %-24s %-24s %-24s %-24s %s\n", "mass", "R_star", "p_star", "rho_star", "kappa_bar",
                        "cubic_residual");
            for (double M : masses) {
                const EquilibriumState e = equilibrium_from_mass(M, p);
                std::printf("%-24s %-24s %-24s %-24s %-24s %s\n", fmt(M).c_str(), fmt(e.R_star).c_str(),
                            fmt(e.p_star).c_str(), fmt(e.rho_star).c_str(), fmt(thermal_diffusivity(p, e)).c_str(),
                            fmt(equilibrium_cubic_relative_residual(e.R_star, M, p)).c_str());
            }
            return 0;
        }
        if (*fr_cmd) {
            double mass = 0.0;
            const PhysicalParams p = resolve_params(fr_src, &mass);
            const EquilibriumState e = equilibrium_from_mass(mass, p);
            const auto [lo, hi] = parse_range(l_range);
            std::printf("%-6s %-24s %s\n", "ell", "omega", "period");
            for (int l = lo; l <= hi; ++l) {
                const double w = lamb_frequency(l, p, e);
                std::printf("%-6d %-24s %s\n", l, fmt(w).c_str(), fmt(2.0 * std::numbers::pi / w).c_str());
            }
            return 0;
        }
        if (*sim_cmd) {
            SimulationConfig cfg = load_config(sim_config);
            if (!sim_out.empty()) cfg.output.dir = sim_out;
            cfg.project_radial = cfg.project_radial || sim_project;
            cfg.viscous_demo = cfg.viscous_demo || sim_demo;
            try {
                const RunOutput run = run_simulation(cfg);
                print_report(run.report);
                std::printf("report: %s/report.json\n", cfg.output.dir.c_str());
                return run.report.passed() ? 0 : 2;
            } catch (const ViscousRejection& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                std::fprintf(stderr, "%s\n", viscous_report_json(e.report()).dump(2).c_str());
                return 1;
            }
        }
        if (*sp_cmd) {
            double mass = 0.0;
            const PhysicalParams p = resolve_params(sp_src, &mass);
            const EquilibriumState e = equilibrium_from_mass(mass, p);
            const MonopoleOperator op = assemble_monopole_operator(RadialGrid::uniform(sp_n), p, e);
            if (!sp_export.empty()) write_matrix_csv(sp_export, op.matrix());
            const auto ev = admissible_spectrum(op);
            std::printf("kappa_bar %s\n", fmt(op.kappa_bar()).c_str());
            std::printf("%-6s %-24s %s\n", "k", "re", "im");
            for (int k = 0; k < sp_count && k < int(ev.size()); ++k) {
                std::printf("%-6d %-24s %s\n", k, fmt(ev[k].real()).c_str(), fmt(ev[k].imag()).c_str());
            }
            return ev.front().real() < 0.0 ? 0 : 2;
        }
        if (*cv_cmd) {
            const auto rep = check_viscous_compatibility(read_multipole_csv(cv_file));
            const auto j = viscous_report_json(rep);
            std::printf("%s\n", j.dump(2).c_str());
            if (!cv_json.empty()) write_json(cv_json, j);
            return rep.compatible ? 0 : 2;
        }
        if (*vf_cmd) {
            const RunReport rep = verify_run(vf_dir);
            print_report(rep);
            return rep.passed() ? 0 : 2;
        }
        if (*eb_cmd) {
            const BesselEigenbasis basis(eb_l, eb_count);
            if (!eb_out.empty()) {
                write_eigenbasis(eb_out, basis);
            } else {
                std::printf("%-6s %-6s %-24s %s\n", "ell", "n", "zero", "norm");
                for (int n = 0; n < basis.size(); ++n) {
                    std::printf("%-6d %-6d %-24s %s\n", eb_l, n + 1, fmt(basis.zeros[n]).c_str(),
                                fmt(basis.norms[n]).c_str());
                }
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
