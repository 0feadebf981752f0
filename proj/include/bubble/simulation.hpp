#pragma once

/**
 * @file simulation.hpp
 * @brief Config-driven runs: the coupled monopole system, all shape modes and
 * the shape-mode gas densities, followed by every verification that applies.
 *
 * Files written to the output directory:
 *   monopole.csv       t, a, a_dot, f_at_1, P_g, mass_residual, l2_norm_f
 *   mode_L_M.csv       t, re_a, im_a, re_adot, im_adot, re_b, im_b
 *   density_L_M.csv    r, t, value
 *   report.json        schema 1
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bubble/config.hpp"
#include "bubble/diagnostics.hpp"
#include "bubble/gas_interior.hpp"
#include "bubble/io.hpp"
#include "bubble/radial_thermal.hpp"
#include "bubble/shape_dynamics.hpp"

namespace bubble {

enum class Status { Pass, Fail, Info, NotApplicable };

inline std::string to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Info: return "info";
        case Status::NotApplicable: return "not_applicable";
    }
    return "unknown";
}

struct VerificationEntry {
    std::string name;
    Status status = Status::Info;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct RunReport {
    std::vector<VerificationEntry> entries;
    long steps = 0;
    std::size_t rows = 0;
    double wall_seconds = 0.0;
    double spectral_abscissa = 0.0;
    nlohmann::ordered_json config;

    void add(std::string name, Status status, double value, double tolerance, std::string detail = {}) {
        entries.push_back({std::move(name), status, value, tolerance, std::move(detail)});
    }

    void add_check(std::string name, bool ok, double value, double tolerance, std::string detail = {}) {
        add(std::move(name), ok ? Status::Pass : Status::Fail, value, tolerance, std::move(detail));
    }

    const VerificationEntry* find(const std::string& name) const {
        for (const auto& e : entries) {
            if (e.name == name) return &e;
        }
        return nullptr;
    }

    bool passed() const {
        return std::none_of(entries.begin(), entries.end(), [](const auto& e) { return e.status == Status::Fail; });
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["schema"] = 1;
        j["passed"] = passed();
        j["config"] = config;
        j["steps"] = steps;
        j["rows"] = rows;
        j["wall_seconds"] = wall_seconds;
        j["spectral_abscissa"] = spectral_abscissa;
        auto& arr = j["entries"] = nlohmann::ordered_json::array();
        for (const auto& e : entries) {
            arr.push_back({{"name", e.name},
                           {"status", to_string(e.status)},
                           {"value", e.value},
                           {"tolerance", e.tolerance},
                           {"detail", e.detail}});
        }
        return j;
    }
};

/// Raised when viscous runs receive data with a non-radial component.
class ViscousRejection : public Error {
  public:
    ViscousRejection(ViscousCompatibilityReport report, const std::string& what)
        : Error(ErrorCode::ViscousGeneralDataRejected, what), report_(std::move(report)) {}

    const ViscousCompatibilityReport& report() const { return report_; }

  private:
    ViscousCompatibilityReport report_;
};

struct MonopoleSample {
    double t, a, a_dot, f_at_1, P_g, mass_residual, l2_norm_f;
};

struct RunOutput {
    RunReport report;
    std::vector<MonopoleSample> monopole;                 ///< every step
    std::map<ModeIndex, std::vector<ModeState>> modes;    ///< saved rows
    std::vector<double> saved_times;
};

inline std::string mode_file_name(const std::string& stem, ModeIndex idx) {
    return stem + "_" + std::to_string(idx.ell) + "_" + std::to_string(idx.m) + ".csv";
}

/// Initial monopole density profile from its config string.
inline std::function<double(double)> monopole_profile(const std::string& spec) {
    if (spec == "zero") return [](double) { return 0.0; };
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ConfigInvalid, "unknown f0 '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const double amp = detail::parse_double(spec.substr(colon + 1), "f0");
    if (kind == "constant") return [amp](double) { return amp; };
    if (kind == "cos") return [amp](double r) { return amp * std::cos(std::numbers::pi * r); };
    if (kind == "bessel") return [amp](double r) { return amp * sph_bessel(0, std::numbers::pi * r); };
    throw Error(ErrorCode::ConfigInvalid, "unknown f0 kind '" + kind + "'");
}

inline std::function<double(double)> density_profile(ModeIndex idx, const DensityInit& d) {
    if (d.shape == DensityShape::Poly) {
        // triple zero at r = 1 so the Laplacian also vanishes there and the expansion converges fast
        return [idx, a = d.amplitude](double r) { return a * std::pow(r, idx.ell) * std::pow(1.0 - r * r, 3); };
    }
    const double z = bessel_zero(idx.ell, d.n);
    return [idx, z, a = d.amplitude](double r) { return r >= 1.0 ? 0.0 : a * sph_bessel(idx.ell, z * r); };
}

namespace detail {

inline nlohmann::ordered_json config_json(const SimulationConfig& c) {
    nlohmann::ordered_json j;
    const PhysicalParams& p = c.params;
    j["params"] = {{"rho_l", p.rho_l}, {"mu_l", p.mu_l},   {"kappa_g", p.kappa_g},
                   {"sigma", p.sigma}, {"T_inf", p.T_inf}, {"R_gas", p.R_gas},
                   {"c_v", p.c_v},     {"gamma", p.gamma}, {"p_inf", p.p_inf}};
    j["mass"] = c.mass;
    j["L_max"] = c.L_max;
    j["grid_n"] = c.grid_n;
    j["dt"] = c.dt;
    j["t_end"] = c.t_end;
    j["n_terms"] = c.n_terms;
    j["viscous_demo"] = c.viscous_demo;
    j["project_radial"] = c.project_radial;
    return j;
}

/// Zero crossings of a sampled signal by linear interpolation.
inline std::vector<double> zero_crossings(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<double> out;
    for (std::size_t i = 1; i < y.size(); ++i) {
        if ((y[i - 1] < 0.0 && y[i] >= 0.0) || (y[i - 1] > 0.0 && y[i] <= 0.0)) {
            out.push_back(t[i - 1] + (t[i] - t[i - 1]) * y[i - 1] / (y[i - 1] - y[i]));
        }
    }
    return out;
}

inline double mean_spacing(const std::vector<double>& x) {
    return (x.back() - x.front()) / double(x.size() - 1);
}

inline cplx b_dot_of(const ModeState& s, const PhysicalParams& p, const EquilibriumState& eq, double a_ddot0) {
    if (s.idx.ell == 0) return -a_ddot0;
    const Eigen::Matrix2d m = mode_system_matrix(s.idx.ell, p, eq);
    return m(1, 0) * s.a + m(1, 1) * s.b;
}

}  // namespace detail

inline RunOutput run_simulation(const SimulationConfig& cfg, bool write_files = true) {
    const auto wall_start = std::chrono::steady_clock::now();
    const PhysicalParams p = validate_params(cfg.params);
    const EquilibriumState eq = equilibrium_from_mass(cfg.mass, p);
    RunOutput out;
    RunReport& rep = out.report;
    rep.config = detail::config_json(cfg);
    const double cubic = equilibrium_cubic_relative_residual(eq.R_star, cfg.mass, p);
    rep.add_check("equilibrium_cubic", cubic <= 1e-12, cubic, 1e-12, "relative residual of the radius cubic");

    // interface modes
    std::map<ModeIndex, std::pair<cplx, cplx>> data;
    for (const auto& [idx, v] : cfg.a0) data[idx].first = v;
    for (const auto& [idx, v] : cfg.adot0) data[idx].second = v;
    data[{0, 0}];
    const auto [a00, adot00] = data[{0, 0}];
    if (a00.imag() != 0.0 || adot00.imag() != 0.0) {
        throw Error(ErrorCode::ConfigInvalid, "the monopole amplitude is real");
    }
    std::map<ModeIndex, DensityInit> rho0 = cfg.rho0;

    // viscous admissibility
    MultipoleCoefficients b0(cfg.L_max);
    bool shape_data = false;
    for (const auto& [idx, ad] : data) {
        b0.set(idx, -ad.second / double(idx.ell + 1));
        if (idx.ell >= 1 && (ad.first != cplx{} || ad.second != cplx{})) shape_data = true;
    }
    const ViscousCompatibilityReport vreport = check_viscous_compatibility(b0);
    const bool viscous = p.mu_l > 0.0;
    bool viscous_demo_active = false;
    if (viscous && shape_data) {
        if (cfg.project_radial) {
            double discarded = 0.0;
            for (auto it = data.begin(); it != data.end();) {
                if (it->first.ell >= 1) {
                    discarded += std::norm(it->second.first) + std::norm(it->second.second);
                    it = data.erase(it);
                } else {
                    ++it;
                }
            }
            rho0.clear();
            rep.add("radial_projection", Status::Info, discarded, 0.0,
                    "discarded sum |a|^2 + |a_dot|^2 of all l >= 1 modes");
        } else if (cfg.viscous_demo) {
            viscous_demo_active = true;
        } else {
            std::string msg = "mu_l > 0 admits only radial data; tangential stress residuals:";
            for (const auto& e : vreport.entries) {
                if (e.idx.ell >= 1 && e.b != cplx{}) msg += " " + to_string(e.idx) + "=" + format_double(e.residual);
            }
            if (vreport.compatible) msg += " (multipole data radial, but l >= 1 interface amplitudes are nonzero)";
            throw ViscousRejection(vreport, msg);
        }
    }

    std::vector<ModeState> shape;
    bool dipole_data = false;
    for (const auto& [idx, ad] : data) {
        if (idx.ell == 0) continue;
        if (idx.ell == 1 && (ad.first != cplx{} || ad.second != cplx{})) dipole_data = true;
        shape.push_back(make_mode_state(idx, ad.first, ad.second, cfg.allow_dipole));
    }

    // monopole system
    const auto grid = RadialGrid::uniform(cfg.grid_n);
    MonopoleSystemState mono{sample(grid, monopole_profile(cfg.f0)), a00.real(), adot00.real(), 0.0};
    const AdmissibleProjection proj = project_admissible(mono, eq);
    mono = proj.state;
    rep.add("admissibility_defect", Status::Info, proj.defect, 0.0, "mass defect removed from the initial f profile");
    const MonopoleOperator op = assemble_monopole_operator(grid, p, eq);
    rep.spectral_abscissa = spectral_abscissa(op);
    rep.add_check("monopole_spectral_abscissa", rep.spectral_abscissa < 0.0, rep.spectral_abscissa, 0.0,
                  "largest real part on the admissible subspace");
    const MonopoleStepper stepper(op, cfg.dt);

    // shape-mode gas densities
    const double kbar = thermal_diffusivity(p, eq);
    std::map<ModeIndex, HeatModeSolution> heat;
    for (const auto& [idx, d] : rho0) {
        heat.emplace(idx, solve_heat_mode(density_profile(idx, d), idx.ell, idx.m, kbar, cfg.n_terms));
    }

    // cadence
    const long nsteps = std::max(1L, std::lround(cfg.t_end / cfg.dt));
    long stride = std::max(1, cfg.output.every);
    stride = std::max(stride, (nsteps + cfg.output.max_rows - 2) / (cfg.output.max_rows - 1));
    const long density_stride = std::max(stride, (nsteps + 99) / 100);
    const int density_points = 21;

    std::filesystem::path dir(cfg.output.dir);
    std::optional<CsvWriter> mono_csv;
    std::map<ModeIndex, CsvWriter> mode_csv;
    std::map<ModeIndex, CsvWriter> density_csv;
    if (write_files) {
        std::filesystem::create_directories(dir);
        mono_csv.emplace(dir / "monopole.csv",
                         std::vector<std::string>{"t", "a", "a_dot", "f_at_1", "P_g", "mass_residual", "l2_norm_f"});
        const std::vector<std::string> mh{"t", "re_a", "im_a", "re_adot", "im_adot", "re_b", "im_b"};
        mode_csv.emplace(ModeIndex{0, 0}, CsvWriter(dir / mode_file_name("mode", {0, 0}), mh));
        for (const ModeState& s : shape) mode_csv.emplace(s.idx, CsvWriter(dir / mode_file_name("mode", s.idx), mh));
        for (const auto& [idx, _] : heat) {
            density_csv.emplace(idx, CsvWriter(dir / mode_file_name("density", idx), {"r", "t", "value"}));
        }
    }

    std::vector<double> all_t;
    std::map<ModeIndex, std::vector<double>> trace;  // Re a (or Im a) of shape modes, every step
    std::map<ModeIndex, double> energy0, energy_drift;
    for (const ModeState& s : shape) {
        if (s.idx.ell >= 2) energy0[s.idx] = shape_mode_energy(s, p, eq);
    }
    double max_kinematic = 0.0;
    double max_mass = 0.0;
    double max_f = 0.0;
    std::vector<double> norms;

    auto record = [&](long step) {
        const double t = mono.t;
        const double f1 = mono.f.at_boundary();
        const MonopoleSample ms{t, mono.a, mono.a_dot, f1, gas_pressure(mono, p).P_g, mass_residual(mono, eq),
                                l2_norm(mono.f)};
        out.monopole.push_back(ms);
        all_t.push_back(t);
        norms.push_back(state_norm(mono));
        max_mass = std::max(max_mass, std::abs(ms.mass_residual));
        max_f = std::max(max_f, ms.l2_norm_f);
        const ModeState m0 = make_mode_state({0, 0}, mono.a, mono.a_dot);
        max_kinematic = std::max(max_kinematic, kinematic_residual(m0));
        for (const ModeState& s : shape) {
            max_kinematic = std::max(max_kinematic, kinematic_residual(s));
            if (s.idx.ell >= 2) {
                trace[s.idx].push_back(s.a.real() != 0.0 || data[s.idx].first.real() != 0.0 ||
                                               data[s.idx].second.real() != 0.0
                                           ? s.a.real()
                                           : s.a.imag());
                const double e0 = energy0[s.idx];
                if (e0 > 0.0) {
                    energy_drift[s.idx] =
                        std::max(energy_drift[s.idx], std::abs(shape_mode_energy(s, p, eq) - e0) / e0);
                }
            }
        }
        if (step % stride != 0 && step != nsteps) return;
        out.saved_times.push_back(t);
        out.modes[{0, 0}].push_back(m0);
        for (const ModeState& s : shape) out.modes[s.idx].push_back(s);
        if (!write_files) return;
        mono_csv->row({ms.t, ms.a, ms.a_dot, ms.f_at_1, ms.P_g, ms.mass_residual, ms.l2_norm_f});
        auto mode_row = [&](const ModeState& s) {
            mode_csv.at(s.idx).row({t, s.a.real(), s.a.imag(), s.a_dot.real(), s.a_dot.imag(), s.b.real(), s.b.imag()});
        };
        mode_row(m0);
        for (const ModeState& s : shape) mode_row(s);
        if (step % density_stride == 0 || step == nsteps) {
            for (const auto& [idx, sol] : heat) {
                for (int k = 0; k < density_points; ++k) {
                    const double r = double(k) / (density_points - 1);
                    density_csv.at(idx).row({r, t, sol.evaluate(r, t)});
                }
            }
        }
    };

    record(0);
    for (long step = 1; step <= nsteps; ++step) {
        const GasPressurePerturbation pg = gas_pressure(mono, p);
        if (!shape.empty()) {
            shape = viscous_demo_active ? step_viscous(shape, pg, p, eq, cfg.dt) : step_inviscid(shape, pg, p, eq, cfg.dt);
        }
        mono = stepper.step(mono);
        mono.t = step * cfg.dt;
        record(step);
    }
    rep.steps = nsteps;
    rep.rows = out.saved_times.size();

    // ---- verifications
    rep.add_check("kinematic_identity", max_kinematic <= kKinematicTolerance, max_kinematic, kKinematicTolerance,
                  "max |a_dot + (l+1) b| over every step and mode");

    {
        std::vector<HarmonicCoefficients> snaps;
        for (std::size_t k = 0; k < out.saved_times.size(); ++k) {
            HarmonicCoefficients c(cfg.L_max);
            for (const auto& [idx, series] : out.modes) c.set(idx, series[k].a);
            snaps.push_back(std::move(c));
        }
        const CentroidReport cr = verify_centroid(snaps);
        if (dipole_data) {
            rep.add("centroid_frame", Status::Info, cr.max_dipole, kCentroidTolerance,
                    "dipole data supplied with allow_dipole; l = 1 is frozen after the first step");
        } else {
            rep.add_check("centroid_frame", cr.passed, cr.max_dipole, kCentroidTolerance, "max |<R, Y_1^m>| over saved rows");
        }

        // realness needs conjugate-paired initial data
        HarmonicCoefficients init(cfg.L_max);
        for (const auto& [idx, ad] : data) init.set(idx, ad.first);
        if (conjugate_symmetry_defect(init) == 0.0) {
            double worst = 0.0;
            const std::size_t every = std::max<std::size_t>(1, snaps.size() / 200);
            for (std::size_t k = 0; k < snaps.size(); k += every) worst = std::max(worst, realness_defect(snaps[k]));
            worst = std::max(worst, realness_defect(snaps.back()));
            rep.add_check("realness", worst <= kRealnessTolerance, worst, kRealnessTolerance,
                          "max |Im R| / max |R| over saved rows");
        } else {
            rep.add("realness", Status::NotApplicable, conjugate_symmetry_defect(init), 0.0,
                    "initial coefficients are not conjugate-paired");
        }
    }

    const double mass_rel = max_mass / std::max(max_f, 1e-300);
    rep.add_check("mass_constraint", max_f == 0.0 || mass_rel <= 1e-9, max_f == 0.0 ? 0.0 : mass_rel, 1e-9,
                  "max |int f dy + 4 pi (rho*/R*) a| relative to max ||f||");

    if (norms.front() == 0.0) {
        rep.add("monopole_decay", Status::NotApplicable, 0.0, 0.02, "monopole starts at equilibrium");
    } else if (-rep.spectral_abscissa * all_t.back() < 3.0) {
        rep.add("monopole_decay", Status::Info, 0.0, 0.02,
                "run spans fewer than 3 e-folds of the spectral abscissa; no rate check");
    } else {
        try {
            const DecayFit fit = measure_decay_rate(all_t, norms);
            const double rel = std::abs(fit.rate - rep.spectral_abscissa) / std::abs(rep.spectral_abscissa);
            if (fit.efolds < 3.0) {
                rep.add("monopole_decay", Status::Info, fit.rate, 0.02,
                        "run spans " + format_double(fit.efolds) + " e-folds; at least 3 needed for a rate check");
            } else {
                rep.add_check("monopole_decay", rel <= 0.02, fit.rate, 0.02,
                              "fitted rate vs spectral abscissa, relative deviation " + format_double(rel));
            }
        } catch (const Error& e) {
            rep.add("monopole_decay", Status::Fail, 0.0, 0.02, e.what());
        }
    }

    for (const ModeState& s : shape) {
        if (s.idx.ell < 2) continue;
        const std::string tag = std::to_string(s.idx.ell) + "_" + std::to_string(s.idx.m);
        if (energy0[s.idx] == 0.0) {
            rep.add("shape_period_" + tag, Status::NotApplicable, 0.0, 1e-4, "mode at rest");
            continue;
        }
        const double half = std::numbers::pi / lamb_frequency(s.idx.ell, p, eq);
        const auto zc = detail::zero_crossings(all_t, trace[s.idx]);
        if (viscous_demo_active) {
            rep.add("shape_period_" + tag, Status::Info, zc.size() >= 2 ? detail::mean_spacing(zc) : 0.0, 0.0,
                    "viscous demonstration run");
        } else if (zc.size() < 2) {
            rep.add("shape_period_" + tag, Status::Info, 0.0, 1e-4, "fewer than two zero crossings");
        } else {
            const double spacing = detail::mean_spacing(zc);
            const double rel = std::abs(spacing - half) / half;
            rep.add_check("shape_period_" + tag, rel <= 1e-4, spacing, 1e-4,
                          "zero-crossing spacing vs pi / omega = " + format_double(half));
        }
        if (!viscous_demo_active) {
            rep.add_check("shape_energy_" + tag, energy_drift[s.idx] <= 1e-6, energy_drift[s.idx], 1e-6,
                          "max relative drift of the shape-mode energy");
        }
    }

    for (const auto& [idx, sol] : heat) {
        const std::string tag = std::to_string(idx.ell) + "_" + std::to_string(idx.m);
        std::vector<double> times;
        for (int k = 0; k <= 40; ++k) times.push_back(cfg.t_end * k / 40.0);
        if (sol.is_zero()) {
            rep.add("heat_decay_" + tag, Status::Pass, 0.0, 0.01, "zero data");
        } else if (sol.slowest_rate() * cfg.t_end < 2.0) {
            rep.add("heat_decay_" + tag, Status::NotApplicable, sol.slowest_rate(), 0.01,
                    "run spans fewer than 2 e-folds of the slowest mode");
        } else {
            try {
                const DecayCertificate cert = uniform_decay_certificate(sol, times);
                rep.add_check("heat_decay_" + tag, cert.certified, cert.fitted_rate, 0.01,
                              "sup-norm rate vs kbar z_1^2 = " + format_double(cert.slowest_rate) +
                                  (cert.monotone ? "" : " (sup-norm not monotone)"));
            } catch (const Error& e) {
                rep.add("heat_decay_" + tag, Status::Fail, 0.0, 0.01, e.what());
            }
        }
        double flux = 0.0;
        for (int k = 0; k < 10; ++k) flux = std::max(flux, std::abs(temperature_flux(sol, cfg.t_end * k / 9.0, p, eq)));
        rep.add_check("zero_flux_" + tag, flux <= 1e-10, flux, 1e-10, "boundary temperature flux");
        if (idx.ell >= 2 && !viscous_demo_active) {
            const auto it = std::find_if(shape.begin(), shape.end(), [&](const ModeState& s) { return s.idx == idx; });
            const ModeState m0 = it == shape.end() ? make_mode_state(idx, {}, {})
                                                   : make_mode_state(idx, data[idx].first, data[idx].second);
            const PeriodicityReport pr = gas_potential_periodicity(sol, m0, p, eq, grid);
            rep.add("gas_potential_periodicity_" + tag,
                    pr.applicable ? (pr.passed ? Status::Pass : Status::Fail) : Status::NotApplicable,
                    pr.early_defect == 0.0 ? 0.0 : pr.late_defect / pr.early_defect, 0.1,
                    "defect ratio at 10 T vs T");
        }
    }

    {
        MultipoleCoefficients b(cfg.L_max), bd(cfg.L_max);
        const double a_ddot0 = monopole_acceleration(mono, p, eq);
        for (const auto& [idx, series] : out.modes) {
            const ModeState& s = series.back();
            b.set(idx, s.b);
            bd.set(idx, detail::b_dot_of(s, p, eq, a_ddot0));
        }
        const std::vector<double> radii{8.0, 16.0, 32.0};
        const FarFieldReport ff = verify_far_field(b, bd, radii, p.rho_l * eq.R_star);
        const double worst = std::max({ff.gradient.slope - ff.gradient.bound, ff.hessian.slope - ff.hessian.bound,
                                       ff.pressure.slope - ff.pressure.bound});
        rep.add_check("far_field", ff.within_bounds, ff.vacuous ? 0.0 : worst, kGradientSlopeTol,
                      ff.vacuous ? "zero potential"
                                 : "slopes at r = 8, 16, 32: grad " + format_double(ff.gradient.slope) + " hess " +
                                       format_double(ff.hessian.slope) + " pressure " +
                                       format_double(ff.pressure.slope) + "; bounds -2, -3, -1");
    }

    if (!viscous) {
        rep.add("viscous_compatibility", Status::Info, vreport.max_residual, 0.0,
                vreport.compatible ? "radial data" : "non-radial data, admissible only because mu_l = 0");
    } else if (viscous_demo_active) {
        rep.add("viscous_compatibility", Status::Info, vreport.max_residual, 0.0, "viscous demonstration run");
    } else {
        rep.add_check("viscous_compatibility", true, vreport.max_residual, 0.0, "radial data");
    }

    {
        MonopoleSeries ms;
        for (const auto& s : out.monopole) {
            ms.t.push_back(s.t);
            ms.a_dot.push_back(s.a_dot);
            ms.b.push_back(-s.a_dot);
        }
        const VolumeReport vr = verify_volume_conservation({}, ms);
        rep.add("volume_drift", Status::Info, vr.volume_drift, 0.0, "-4 pi int b_0^0 dt");
    }

    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    if (write_files) write_json(dir / "report.json", rep.to_json());
    return out;
}

/// Reads a multipole coefficient file with columns ell, m, re, im.
inline MultipoleCoefficients read_multipole_csv(const std::filesystem::path& path, int L_max = 64) {
    const CsvTable t = read_csv(path);
    const int cl = t.column("ell"), cm = t.column("m"), cre = t.column("re"), cim = t.column("im");
    MultipoleCoefficients c(L_max);
    for (const auto& row : t.rows) c.set({int(row[cl]), int(row[cm])}, {row[cre], row[cim]});
    return c;
}

inline nlohmann::ordered_json viscous_report_json(const ViscousCompatibilityReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["compatible"] = r.compatible;
    j["max_residual"] = r.max_residual;
    auto& arr = j["modes"] = nlohmann::ordered_json::array();
    for (const auto& e : r.entries) {
        arr.push_back({{"ell", e.idx.ell}, {"m", e.idx.m}, {"re_b", e.b.real()}, {"im_b", e.b.imag()},
                       {"factor", e.factor}, {"residual", e.residual}});
    }
    return j;
}

/// Re-verifies a finished run from its files alone.
inline RunReport verify_run(const std::filesystem::path& dir) {
    RunReport rep;
    const auto stored = read_json(dir / "report.json");
    rep.config = stored.at("config");
    const auto& pj = rep.config.at("params");
    std::map<std::string, double> kv;
    for (auto it = pj.begin(); it != pj.end(); ++it) kv[it.key()] = it.value().get<double>();
    const PhysicalParams p = params_from_map(kv);
    const double mass = rep.config.at("mass").get<double>();
    const EquilibriumState eq = equilibrium_from_mass(mass, p);
    rep.add_check("equilibrium_cubic", equilibrium_cubic_relative_residual(eq.R_star, mass, p) <= 1e-12,
                  equilibrium_cubic_relative_residual(eq.R_star, mass, p), 1e-12);

    const CsvTable mono = read_csv(dir / "monopole.csv");
    const auto t = mono.values("t");
    if (t.empty()) throw Error(ErrorCode::SeriesEmpty, "monopole.csv has no rows");
    const auto a = mono.values("a");
    const auto ad = mono.values("a_dot");
    const auto mres = mono.values("mass_residual");
    const auto l2 = mono.values("l2_norm_f");
    double max_mass = 0.0, max_f = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        max_mass = std::max(max_mass, std::abs(mres[i]));
        max_f = std::max(max_f, l2[i]);
    }
    rep.add_check("mass_constraint", max_f == 0.0 || max_mass / max_f <= 1e-9, max_f == 0.0 ? 0.0 : max_mass / max_f,
                  1e-9);

    const auto grid = RadialGrid::uniform(rep.config.at("grid_n").get<int>());
    rep.spectral_abscissa = spectral_abscissa(assemble_monopole_operator(grid, p, eq));
    std::vector<double> norms(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) norms[i] = std::sqrt(l2[i] * l2[i] + a[i] * a[i] + ad[i] * ad[i]);
    if (norms.front() == 0.0) {
        rep.add("monopole_decay", Status::NotApplicable, 0.0, 0.02, "monopole starts at equilibrium");
    } else if (-rep.spectral_abscissa * (t.back() - t.front()) < 3.0) {
        rep.add("monopole_decay", Status::Info, 0.0, 0.02,
                "run spans fewer than 3 e-folds of the spectral abscissa; no rate check");
    } else if (t.size() < 50) {
        rep.add("monopole_decay", Status::Info, 0.0, 0.02, "fewer than 50 saved rows");
    } else {
        try {
            const DecayFit fit = measure_decay_rate(t, norms);
            const double rel = std::abs(fit.rate - rep.spectral_abscissa) / std::abs(rep.spectral_abscissa);
            if (fit.efolds < 3.0) {
                rep.add("monopole_decay", Status::Info, fit.rate, 0.02, "fewer than 3 e-folds");
            } else {
                rep.add_check("monopole_decay", rel <= 0.02, fit.rate, 0.02,
                              "relative deviation " + format_double(rel));
            }
        } catch (const Error& e) {
            rep.add("monopole_decay", Status::Fail, 0.0, 0.02, e.what());
        }
    }

    // mode files
    double max_kin = 0.0, max_dipole = 0.0;
    const int L_max = rep.config.at("L_max").get<int>();
    MultipoleCoefficients b_first(L_max), b_last(L_max), bd_last(L_max);
    std::vector<ModeState> samples;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("mode_", 0) != 0) continue;
        int l = 0, m = 0;
        if (std::sscanf(name.c_str(), "mode_%d_%d.csv", &l, &m) != 2) continue;
        const CsvTable tab = read_csv(entry.path());
        if (tab.rows.empty()) continue;
        const ModeIndex idx{l, m};
        const auto tt = tab.values("t");
        const auto ra = tab.values("re_a"), ia = tab.values("im_a");
        const auto rad = tab.values("re_adot"), iad = tab.values("im_adot");
        const auto rb = tab.values("re_b"), ib = tab.values("im_b");
        for (std::size_t i = 0; i < tt.size(); ++i) {
            const ModeState s{idx, {ra[i], ia[i]}, {rad[i], iad[i]}, {rb[i], ib[i]}};
            max_kin = std::max(max_kin, kinematic_residual(s));
            if (l == 1) max_dipole = std::max(max_dipole, std::abs(s.a));
        }
        b_first.set(idx, {rb.front(), ib.front()});
        b_last.set(idx, {rb.back(), ib.back()});
        const std::size_t n = tt.size();
        if (n >= 2) {
            bd_last.set(idx, (cplx{rb[n - 1], ib[n - 1]} - cplx{rb[n - 2], ib[n - 2]}) / (tt[n - 1] - tt[n - 2]));
        }
    }
    rep.add_check("kinematic_identity", max_kin <= kKinematicTolerance, max_kin, kKinematicTolerance);
    rep.add_check("centroid_frame", max_dipole <= kCentroidTolerance, max_dipole, kCentroidTolerance);
    const std::vector<double> radii{8.0, 16.0, 32.0};
    const FarFieldReport ff = verify_far_field(b_last, bd_last, radii, p.rho_l * eq.R_star);
    rep.add_check("far_field", ff.within_bounds,
                  ff.vacuous ? 0.0 : std::max({ff.gradient.slope + 2.0, ff.hessian.slope + 3.0, ff.pressure.slope + 1.0}),
                  kGradientSlopeTol, "slopes vs bounds -2, -3, -1; b_dot by backward difference");
    const ViscousCompatibilityReport vr = check_viscous_compatibility(b_first);
    if (p.mu_l > 0.0 && !rep.config.value("viscous_demo", false)) {
        rep.add_check("viscous_compatibility", vr.compatible, vr.max_residual, 0.0);
    } else {
        rep.add("viscous_compatibility", Status::Info, vr.max_residual, 0.0);
    }
    MonopoleSeries ms{t, ad, {}};
    for (double v : ad) ms.b.push_back(-v);
    rep.add("volume_drift", Status::Info, verify_volume_conservation({}, ms).volume_drift, 0.0);
    rep.steps = stored.value("steps", 0L);
    rep.rows = t.size();
    return rep;
}

}  // namespace bubble
