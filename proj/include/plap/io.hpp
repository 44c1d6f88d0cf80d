#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plap/coefficients.hpp"
#include "plap/errors.hpp"
#include "plap/evolve.hpp"
#include "plap/grid.hpp"
#include "plap/particles.hpp"

namespace plap {

using json = nlohmann::json;

namespace io {

/// Shortest round-trippable decimal form; reruns of the same binary produce
/// byte-identical artifacts.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open for reading: " + path.string());
    return in;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

/// strtod-based: accepts subnormals (fields decay below DBL_MIN near the
/// support boundary), where std::stod would throw out_of_range.
inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw Error("csv: not a number: '" + s + "'");
    return v;
}

// ---- fields: x[,y],value -------------------------------------------------

inline void write_field_csv(const std::filesystem::path& path, const ScalarField& u) {
    std::ofstream out = open_out(path);
    const Grid& g = u.grid;
    out << (g.dim == 1 ? "x,value\n" : "x,y,value\n");
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < (g.dim == 1 ? 1 : g.n); ++iy) {
            out << fmt(g.coord(ix));
            if (g.dim == 2) out << ',' << fmt(g.coord(iy));
            out << ',' << fmt(u[g.index(ix, iy)]) << '\n';
        }
}

inline ScalarField read_field_csv(const std::filesystem::path& path, const Grid& g) {
    std::ifstream in = open_in(path);
    std::string line;
    std::getline(in, line);  // header
    ScalarField u(g);
    long row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cols = split_csv(line);
        if (static_cast<int>(cols.size()) != g.dim + 1)
            throw Error("field csv: wrong column count in " + path.string());
        if (row >= g.cells()) throw Error("field csv: too many rows in " + path.string());
        u[row] = parse_double(cols.back());
        // coordinates must match the grid layout
        const int ix = static_cast<int>(row / (g.dim == 1 ? 1 : g.n));
        const int iy = static_cast<int>(g.dim == 1 ? 0 : row % g.n);
        if (std::abs(parse_double(cols[0]) - g.coord(ix)) > 1e-9 * g.h ||
            (g.dim == 2 && std::abs(parse_double(cols[1]) - g.coord(iy)) > 1e-9 * g.h))
            throw Error("field csv: coordinates do not match the grid in " + path.string());
        ++row;
    }
    if (row != g.cells()) throw Error("field csv: wrong row count in " + path.string());
    return u;
}

// ---- coefficients: x[,y],b1[,b2],sigma ------------------------------------

inline void write_coefficients_csv(const std::filesystem::path& path,
                                   const CoefficientField& c) {
    std::ofstream out = open_out(path);
    const Grid& g = c.grid;
    out << (g.dim == 1 ? "x,b1,sigma\n" : "x,y,b1,b2,sigma\n");
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < (g.dim == 1 ? 1 : g.n); ++iy) {
            const long cell = g.index(ix, iy);
            out << fmt(g.coord(ix));
            if (g.dim == 2) out << ',' << fmt(g.coord(iy));
            out << ',' << fmt(c.drift[0][cell]);
            if (g.dim == 2) out << ',' << fmt(c.drift[1][cell]);
            out << ',' << fmt(c.sigma[cell]) << '\n';
        }
}

// ---- ensembles: id,x[,y] ---------------------------------------------------

inline void write_ensemble_csv(const std::filesystem::path& path, const ParticleEnsemble& e) {
    std::ofstream out = open_out(path);
    out << (e.dim == 1 ? "id,x\n" : "id,x,y\n");
    for (long i = 0; i < e.size(); ++i) {
        out << i << ',' << fmt(e.x(i));
        if (e.dim == 2) out << ',' << fmt(e.y(i));
        out << '\n';
    }
}

inline ParticleEnsemble read_ensemble_csv(const std::filesystem::path& path, int dim) {
    std::ifstream in = open_in(path);
    std::string line;
    std::getline(in, line);
    ParticleEnsemble e;
    e.dim = dim;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cols = split_csv(line);
        if (static_cast<int>(cols.size()) != dim + 1)
            throw Error("ensemble csv: wrong column count in " + path.string());
        e.pos.push_back(parse_double(cols[1]));
        if (dim == 2) e.pos.push_back(parse_double(cols[2]));
    }
    return e;
}

// ---- diagnostics / estimators ----------------------------------------------

inline void write_diagnostics_csv(const std::filesystem::path& path,
                                  const std::vector<double>& times,
                                  const std::vector<StepDiagnostics>& diag) {
    std::ofstream out = open_out(path);
    out << "t,mass,l1,l2,sup,phi,support_radius,residual,iters\n";
    for (size_t k = 0; k < times.size(); ++k) {
        const auto& d = diag[k];
        out << fmt(times[k]) << ',' << fmt(d.mass) << ',' << fmt(d.l1) << ',' << fmt(d.l2)
            << ',' << fmt(d.sup) << ',' << fmt(d.phi) << ',' << fmt(d.support_radius) << ','
            << fmt(d.residual) << ',' << d.iters << '\n';
    }
}

inline void write_estimators_csv(const std::filesystem::path& path, int dim,
                                 const std::vector<double>& times,
                                 const std::vector<StepDiagnostics>& diag) {
    std::ofstream out = open_out(path);
    out << (dim == 1 ? "t,min,gsup_x,grad_l2,int_pm2,int_drift_abs,int_gp2_sq\n"
                     : "t,min,gsup_x,gsup_y,grad_l2,int_pm2,int_drift_abs,int_gp2_sq\n");
    for (size_t k = 0; k < times.size(); ++k) {
        const auto& e = diag[k].extra;
        out << fmt(times[k]) << ',' << fmt(e.min) << ',' << fmt(e.gsup_x);
        if (dim == 2) out << ',' << fmt(e.gsup_y);
        out << ',' << fmt(e.grad_l2) << ',' << fmt(e.int_pm2) << ',' << fmt(e.int_drift_abs)
            << ',' << fmt(e.int_gp2_sq) << '\n';
    }
}

/// Reads diagnostics.csv and estimators.csv back into per-step records.
inline void read_run_history(const std::filesystem::path& dir, int dim,
                             std::vector<double>& times, std::vector<StepDiagnostics>& diag) {
    times.clear();
    diag.clear();
    {
        std::ifstream in = open_in(dir / "diagnostics.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto c = split_csv(line);
            if (c.size() != 9) throw Error("diagnostics.csv: wrong column count");
            StepDiagnostics d;
            times.push_back(parse_double(c[0]));
            d.t = times.back();
            d.mass = parse_double(c[1]);
            d.l1 = parse_double(c[2]);
            d.l2 = parse_double(c[3]);
            d.sup = parse_double(c[4]);
            d.phi = parse_double(c[5]);
            d.support_radius = parse_double(c[6]);
            d.residual = parse_double(c[7]);
            d.iters = std::stoi(c[8]);
            diag.push_back(d);
        }
    }
    {
        std::ifstream in = open_in(dir / "estimators.csv");
        std::string line;
        std::getline(in, line);
        size_t k = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto c = split_csv(line);
            const size_t expect = dim == 1 ? 7 : 8;
            if (c.size() != expect) throw Error("estimators.csv: wrong column count");
            if (k >= diag.size()) throw Error("estimators.csv: more rows than diagnostics.csv");
            FieldFunctionals& e = diag[k].extra;
            size_t i = 1;
            e.min = parse_double(c[i++]);
            e.gsup_x = parse_double(c[i++]);
            if (dim == 2) e.gsup_y = parse_double(c[i++]);
            e.grad_l2 = parse_double(c[i++]);
            e.int_pm2 = parse_double(c[i++]);
            e.int_drift_abs = parse_double(c[i++]);
            e.int_gp2_sq = parse_double(c[i++]);
            ++k;
        }
        if (k != diag.size()) throw Error("estimators.csv: fewer rows than diagnostics.csv");
    }
}

// ---- json artifacts ----------------------------------------------------------

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("invalid json in " + path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace io

/// Calibrated per-(p, d) oracle constants; C_support <= 0 means uncalibrated.
struct OracleConstants {
    double p = 0.0;
    int d = 0;
    double q = 0.0;
    double C1 = 0.0;
    double c_fb = 0.0;
    double C_support = 0.0;
};

inline json to_json(const OracleConstants& c) {
    return json{{"p", c.p},       {"d", c.d},       {"q", c.q},
                {"C1", c.C1},     {"c_fb", c.c_fb}, {"C_support", c.C_support}};
}

inline OracleConstants oracle_constants_from_json(const json& j) {
    OracleConstants c;
    c.p = j.at("p").get<double>();
    c.d = j.at("d").get<int>();
    c.q = j.at("q").get<double>();
    c.C1 = j.at("C1").get<double>();
    c.c_fb = j.at("c_fb").get<double>();
    c.C_support = j.at("C_support").get<double>();
    return c;
}

}  // namespace plap
