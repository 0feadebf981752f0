#pragma once

/**
 * @file config.hpp
 * @brief INI run configuration.
 *
 *   [params]      rho_l mu_l kappa_g sigma T_inf R_gas c_v gamma p_inf   (all required)
 *   [equilibrium] mass                                                    (required)
 *   [simulation]  L_max=8 grid_n=101 dt=0.01 t_end=10 n_terms=32
 *                 viscous_demo=false project_radial=false
 *   [initial]     a.L.M = re[, im]      interface amplitude of mode (L, M)
 *                 adot.L.M = re[, im]   its rate
 *                 f0 = zero | constant:c | cos:amp | bessel:amp
 *                 rho.L.M = amp[@n] | poly:amp   shape-mode gas density, L >= 1
 *                 allow_dipole = false
 *   [output]      dir=run every=0 max_rows=20000
 */

#include <cmath>
#include <complex>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bubble/error.hpp"
#include "bubble/harmonics.hpp"
#include "bubble/params.hpp"

namespace bubble {

enum class DensityShape { Bessel, Poly };

struct DensityInit {
    DensityShape shape = DensityShape::Bessel;
    double amplitude = 0.0;
    int n = 1;  ///< Bessel zero index
};

struct OutputConfig {
    std::string dir = "run";
    int every = 0;  ///< 0 picks the stride from max_rows
    int max_rows = 20000;
};

struct SimulationConfig {
    PhysicalParams params;
    double mass = 0.0;
    int L_max = 8;
    int grid_n = 101;
    double dt = 0.01;
    double t_end = 10.0;
    int n_terms = 32;
    bool viscous_demo = false;
    bool project_radial = false;
    bool allow_dipole = false;
    std::map<ModeIndex, cplx> a0;
    std::map<ModeIndex, cplx> adot0;
    std::string f0 = "zero";
    std::map<ModeIndex, DensityInit> rho0;
    OutputConfig output;
};

namespace detail {

inline double parse_double(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigInvalid, "key '" + key + "': cannot parse '" + text + "' as a number");
    }
}

inline int parse_int(const std::string& text, const std::string& key) {
    const double v = parse_double(text, key);
    if (v != std::floor(v)) throw Error(ErrorCode::ConfigInvalid, "key '" + key + "' must be an integer");
    return int(v);
}

inline bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw Error(ErrorCode::ConfigInvalid, "key '" + key + "' must be true or false");
}

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline cplx parse_complex(const std::string& text, const std::string& key) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return {parse_double(trim(text), key), 0.0};
    return {parse_double(trim(text.substr(0, comma)), key), parse_double(trim(text.substr(comma + 1)), key)};
}

/// "prefix.L.M" -> (L, M).
inline ModeIndex parse_mode_key(const std::string& key, const std::string& prefix) {
    const std::string rest = key.substr(prefix.size() + 1);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) throw Error(ErrorCode::ConfigInvalid, "key '" + key + "' must look like " + prefix + ".L.M");
    ModeIndex idx{parse_int(rest.substr(0, dot), key), parse_int(rest.substr(dot + 1), key)};
    check_index(idx);
    return idx;
}

inline DensityInit parse_density(const std::string& text, const std::string& key) {
    DensityInit d;
    if (text.rfind("poly:", 0) == 0) {
        d.shape = DensityShape::Poly;
        d.amplitude = parse_double(text.substr(5), key);
        return d;
    }
    const auto at = text.find('@');
    d.amplitude = parse_double(trim(text.substr(0, at)), key);
    if (at != std::string::npos) d.n = parse_int(trim(text.substr(at + 1)), key);
    if (d.n < 1) throw Error(ErrorCode::ConfigInvalid, "key '" + key + "': Bessel index must be >= 1");
    return d;
}

}  // namespace detail

inline SimulationConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorCode::ConfigInvalid, e.what());
    }
    SimulationConfig cfg;
    auto section = [&](const std::string& name) -> const pt::ptree* {
        auto it = tree.find(name);
        return it == tree.not_found() ? nullptr : &it->second;
    };
    for (const auto& [name, _] : tree) {
        if (name != "params" && name != "equilibrium" && name != "simulation" && name != "initial" && name != "output") {
            throw Error(ErrorCode::ConfigInvalid, "unknown section [" + name + "]");
        }
    }

    const pt::ptree* params = section("params");
    if (!params) throw Error(ErrorCode::ConfigInvalid, "missing [params] section");
    std::map<std::string, double> kv;
    for (const auto& [k, v] : *params) kv[k] = detail::parse_double(v.data(), k);
    cfg.params = params_from_map(kv);

    const pt::ptree* eq = section("equilibrium");
    if (!eq || eq->find("mass") == eq->not_found()) throw Error(ErrorCode::ConfigInvalid, "missing [equilibrium] mass");
    for (const auto& [k, v] : *eq) {
        if (k != "mass") throw Error(ErrorCode::ConfigInvalid, "unknown key [equilibrium] " + k);
        cfg.mass = detail::parse_double(v.data(), k);
    }

    if (const pt::ptree* sim = section("simulation")) {
        for (const auto& [k, v] : *sim) {
            const std::string s = v.data();
            if (k == "L_max") cfg.L_max = detail::parse_int(s, k);
            else if (k == "grid_n") cfg.grid_n = detail::parse_int(s, k);
            else if (k == "dt") cfg.dt = detail::parse_double(s, k);
            else if (k == "t_end") cfg.t_end = detail::parse_double(s, k);
            else if (k == "n_terms") cfg.n_terms = detail::parse_int(s, k);
            else if (k == "viscous_demo") cfg.viscous_demo = detail::parse_bool(s, k);
            else if (k == "project_radial") cfg.project_radial = detail::parse_bool(s, k);
            else throw Error(ErrorCode::ConfigInvalid, "unknown key [simulation] " + k);
        }
    }

    if (const pt::ptree* init = section("initial")) {
        for (const auto& [k, v] : *init) {
            const std::string s = detail::trim(v.data());
            if (k.rfind("a.", 0) == 0) cfg.a0[detail::parse_mode_key(k, "a")] = detail::parse_complex(s, k);
            else if (k.rfind("adot.", 0) == 0) cfg.adot0[detail::parse_mode_key(k, "adot")] = detail::parse_complex(s, k);
            else if (k.rfind("rho.", 0) == 0) cfg.rho0[detail::parse_mode_key(k, "rho")] = detail::parse_density(s, k);
            else if (k == "f0") cfg.f0 = s;
            else if (k == "allow_dipole") cfg.allow_dipole = detail::parse_bool(s, k);
            else throw Error(ErrorCode::ConfigInvalid, "unknown key [initial] " + k);
        }
    }

    if (const pt::ptree* out = section("output")) {
        for (const auto& [k, v] : *out) {
            const std::string s = detail::trim(v.data());
            if (k == "dir") cfg.output.dir = s;
            else if (k == "every") cfg.output.every = detail::parse_int(s, k);
            else if (k == "max_rows") cfg.output.max_rows = detail::parse_int(s, k);
            else throw Error(ErrorCode::ConfigInvalid, "unknown key [output] " + k);
        }
    }

    if (!(cfg.mass > 0.0)) throw Error(ErrorCode::NonPositive, "mass must be > 0");
    if (cfg.L_max < 0) throw Error(ErrorCode::ConfigInvalid, "L_max must be >= 0");
    if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw Error(ErrorCode::ConfigInvalid, "dt and t_end must be > 0");
    if (cfg.output.every < 0 || cfg.output.max_rows < 2) throw Error(ErrorCode::ConfigInvalid, "bad output cadence");
    auto check_degree = [&](ModeIndex idx) {
        if (idx.ell > cfg.L_max) throw Error(ErrorCode::IndexInvalid, to_string(idx) + " exceeds L_max");
    };
    for (const auto& [idx, _] : cfg.a0) check_degree(idx);
    for (const auto& [idx, _] : cfg.adot0) check_degree(idx);
    for (const auto& [idx, _] : cfg.rho0) {
        check_degree(idx);
        if (idx.ell == 0) throw Error(ErrorCode::ConfigInvalid, "the l = 0 density is set with f0");
    }
    return cfg;
}

inline SimulationConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
    return parse_config(in);
}

inline SimulationConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace bubble
