#pragma once

/** \file csv.hpp
 * \brief Plain CSV for point clouds, tables and Galerkin snapshots. Numbers
 * are printed with 17 significant digits so every file re-parses to the same
 * doubles. */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pullback/error.hpp"
#include "pullback/geometry.hpp"
#include "pullback/systems/nse.hpp"

namespace pullback::io {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(where + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw Error(where + ": trailing characters in '" + s + "'");
    return v;
}

inline std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline void write_table(const std::filesystem::path& path, const Table& t) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    auto emit = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
    };
    emit(t.header);
    for (const auto& r : t.rows) emit(r);
    if (!out) throw Error("write failed for " + path.string());
}

inline Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
    t.header = split_row(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto row = split_row(line);
        if (row.size() != t.header.size())
            throw Error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(t.header.size()) + " columns, got " + std::to_string(row.size()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Header x0..x{d-1}, one row per point, lexicographically sorted.
inline void write_cloud_csv(const std::filesystem::path& path, PointCloud cloud) {
    cloud.sort_lexicographic();
    Table t;
    for (std::size_t k = 0; k < cloud.dim(); ++k) t.header.push_back("x" + std::to_string(k));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        std::vector<std::string> row;
        for (const double v : cloud.point(i)) row.push_back(format_double(v));
        t.rows.push_back(std::move(row));
    }
    write_table(path, t);
}

inline PointCloud read_cloud_csv(const std::filesystem::path& path, double resolution = 0.0) {
    const Table t = read_table(path);
    const std::size_t d = t.header.size();
    for (std::size_t k = 0; k < d; ++k)
        if (t.header[k] != "x" + std::to_string(k)) throw Error(path.string() + ": unexpected header '" + t.header[k] + "'");
    if (t.rows.empty()) throw Error(path.string() + ": cloud has no points");
    std::vector<double> coords;
    coords.reserve(d * t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (const auto& cell : t.rows[r]) coords.push_back(parse_double(cell, path.string() + ":" + std::to_string(r + 2)));
    return PointCloud(d, std::move(coords), resolution);
}

inline void write_snapshot_csv(const std::filesystem::path& path, const std::vector<nse::SnapshotRow>& rows) {
    Table t{{"kx", "ky", "re_u1", "im_u1", "re_u2", "im_u2"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({std::to_string(r.kx), std::to_string(r.ky), format_double(r.u1.real()),
                          format_double(r.u1.imag()), format_double(r.u2.real()), format_double(r.u2.imag())});
    write_table(path, t);
}

inline std::vector<nse::SnapshotRow> read_snapshot_csv(const std::filesystem::path& path) {
    const Table t = read_table(path);
    if (t.header != std::vector<std::string>{"kx", "ky", "re_u1", "im_u1", "re_u2", "im_u2"})
        throw Error(path.string() + ": not a snapshot file");
    std::vector<nse::SnapshotRow> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto where = path.string() + ":" + std::to_string(r + 2);
        const auto& c = t.rows[r];
        out.push_back({static_cast<int>(parse_double(c[0], where)), static_cast<int>(parse_double(c[1], where)),
                       {parse_double(c[2], where), parse_double(c[3], where)},
                       {parse_double(c[4], where), parse_double(c[5], where)}});
    }
    return out;
}

}  // namespace pullback::io
