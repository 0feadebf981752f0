#pragma once

/**
 * @file io.hpp
 * @brief CSV and JSON file formats. Numbers are written with 17 significant
 * digits so every double round-trips; fields are quoted per RFC 4180 only
 * when they contain a comma, quote or newline.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "bubble/bessel.hpp"
#include "bubble/error.hpp"
#include "bubble/harmonics.hpp"

namespace bubble {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Row-at-a-time CSV writer.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error(ErrorCode::Io, "cannot write " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << csv_quote(header[i]);
        out_ << "\r\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
        out_ << "\r\n";
    }

  private:
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return int(i);
        }
        throw Error(ErrorCode::Io, "missing CSV column '" + name + "'");
    }

    std::vector<double> values(const std::string& name) const {
        const int c = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

/// Reads a numeric CSV with one header line.
inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Io, path.string() + " is empty");
    table.header = detail::split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != table.header.size()) throw Error(ErrorCode::Io, "ragged row in " + path.string());
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            try {
                row.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw Error(ErrorCode::Io, "non-numeric field '" + f + "' in " + path.string());
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

inline nlohmann::ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// SurfaceField: theta,phi,re,im plus a JSON sidecar <path>.json with the grid

inline void write_surface_field(const std::filesystem::path& path, const SurfaceField& f) {
    const SphereGrid& g = *f.grid;
    {
        CsvWriter csv(path, {"theta", "phi", "re", "im"});
        for (int i = 0; i < g.n_theta(); ++i) {
            for (int j = 0; j < g.n_phi(); ++j) {
                const cplx v = f.values[g.flat(i, j)];
                csv.row({g.theta(i), g.phi(j), v.real(), v.imag()});
            }
        }
    }
    nlohmann::ordered_json meta;
    meta["schema"] = 1;
    meta["grid"] = "gauss-legendre-cos-theta x uniform-phi";
    meta["n_theta"] = g.n_theta();
    meta["n_phi"] = g.n_phi();
    meta["order"] = "row-major (theta, phi)";
    write_json(std::filesystem::path(path.string() + ".json"), meta);
}

inline SurfaceField read_surface_field(const std::filesystem::path& path) {
    const auto meta = read_json(std::filesystem::path(path.string() + ".json"));
    const int nt = meta.at("n_theta").get<int>();
    const int np = meta.at("n_phi").get<int>();
    auto grid = std::make_shared<const SphereGrid>(nt, np);
    const CsvTable t = read_csv(path);
    if (t.rows.size() != grid->size()) throw Error(ErrorCode::Io, "surface field size does not match its sidecar");
    const int cre = t.column("re");
    const int cim = t.column("im");
    SurfaceField f{grid, std::vector<cplx>(grid->size())};
    for (std::size_t k = 0; k < t.rows.size(); ++k) f.values[k] = {t.rows[k][cre], t.rows[k][cim]};
    return f;
}

/// Columns ell, n, zero, norm.
inline void write_eigenbasis(const std::filesystem::path& path, const BesselEigenbasis& basis) {
    CsvWriter csv(path, {"ell", "n", "zero", "norm"});
    for (int n = 0; n < basis.size(); ++n) csv.row({double(basis.ell), n + 1.0, basis.zeros[n], basis.norms[n]});
}

/// Dense matrix, one CSV row per matrix row, header c0..c{N-1}.
inline void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back("c" + std::to_string(j));
    CsvWriter csv(path, header);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(m.cols());
        for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
        csv.row(row);
    }
}

}  // namespace bubble
