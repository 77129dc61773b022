#pragma once

/** \file metadata.hpp
 * \brief JSON sidecars for sections and uniform approximations, and loading
 * a section back from its CSV + JSON pair. */

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "pullback/attractors.hpp"
#include "pullback/io/csv.hpp"

namespace pullback::io {

using nlohmann::json;

inline json to_json(const ParameterPoint& p) {
    json j = json::array();
    for (const auto& [n, v] : p.coords()) j.push_back({{"name", n}, {"value", v}});
    return j;
}

inline ParameterPoint parameter_point_from_json(const json& j) {
    ParameterPoint p;
    for (const auto& e : j) p.set(e.at("name").get<std::string>(), e.at("value").get<double>());
    return p;
}

inline json history_json(const std::vector<HistoryEntry>& h, const char* key) {
    json a = json::array();
    for (const auto& e : h) a.push_back({{key, e.s}, {"delta", e.delta}});
    return a;
}

inline json to_json(const AttractorSection& s) {
    return {{"kind", "pullback_section"},
            {"t", s.t},
            {"lambda", to_json(s.lambda)},
            {"s_converged", s.s_converged},
            {"converged", s.converged},
            {"tol", s.tol},
            {"merge_radius", s.merge_radius},
            {"points", s.cloud.size()},
            {"dim", s.cloud.dim()},
            {"history", history_json(s.history, "s")}};
}

inline json to_json(const UniformAttractorApprox& u) {
    return {{"kind", "uniform_attractor"},
            {"lambda", to_json(u.lambda)},
            {"t_window", u.t_window},
            {"s_grid", u.s_grid},
            {"converged", u.converged},
            {"tol", u.tol},
            {"merge_radius", u.merge_radius},
            {"points", u.cloud.size()},
            {"dim", u.cloud.dim()},
            {"history", history_json(u.history, "t_window")}};
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

/// Writes <stem>.csv and <stem>.json.
inline void write_section(const std::filesystem::path& stem, const AttractorSection& s) {
    write_cloud_csv(stem.string() + ".csv", s.cloud);
    write_json(stem.string() + ".json", to_json(s));
}

inline void write_uniform(const std::filesystem::path& stem, const UniformAttractorApprox& u) {
    write_cloud_csv(stem.string() + ".csv", u.cloud);
    write_json(stem.string() + ".json", to_json(u));
}

inline std::vector<HistoryEntry> history_from_json(const json& a, const char* key) {
    std::vector<HistoryEntry> h;
    for (const auto& e : a) h.push_back({e.at(key).get<double>(), e.at("delta").get<double>()});
    return h;
}

inline AttractorSection read_section(const std::filesystem::path& stem) {
    const std::filesystem::path csv = stem.string() + ".csv", meta = stem.string() + ".json";
    for (const auto& p : {csv, meta})
        if (!std::filesystem::exists(p)) throw Error("missing artifact " + p.string());
    const json j = read_json(meta);
    try {
        if (j.at("kind") != "pullback_section") throw Error(meta.string() + ": not a pullback section");
        const double mr = j.at("merge_radius").get<double>();
        return {j.at("t").get<double>(), parameter_point_from_json(j.at("lambda")), read_cloud_csv(csv, mr),
                j.at("s_converged").get<double>(), history_from_json(j.at("history"), "s"),
                j.at("converged").get<bool>(), j.at("tol").get<double>(), mr, {}};
    } catch (const json::exception& e) {
        throw Error(meta.string() + ": " + e.what());
    }
}

inline UniformAttractorApprox read_uniform(const std::filesystem::path& stem) {
    const std::filesystem::path csv = stem.string() + ".csv", meta = stem.string() + ".json";
    for (const auto& p : {csv, meta})
        if (!std::filesystem::exists(p)) throw Error("missing artifact " + p.string());
    const json j = read_json(meta);
    try {
        if (j.at("kind") != "uniform_attractor") throw Error(meta.string() + ": not a uniform attractor");
        const double mr = j.at("merge_radius").get<double>();
        return {parameter_point_from_json(j.at("lambda")), read_cloud_csv(csv, mr), j.at("t_window").get<double>(),
                j.at("s_grid").get<std::vector<double>>(), history_from_json(j.at("history"), "t_window"),
                j.at("converged").get<bool>(), j.at("tol").get<double>(), mr};
    } catch (const json::exception& e) {
        throw Error(meta.string() + ": " + e.what());
    }
}

}  // namespace pullback::io
