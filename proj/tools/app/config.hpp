#pragma once

// Run configuration for the command-line tool: a TOML file checked against a
// fixed schema, then overridden by command-line flags.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pullback/continuity.hpp"
#include "pullback/process.hpp"
#include "pullback/systems/lorenz.hpp"
#include "pullback/systems/nse.hpp"

namespace pullback::app {

inline const std::vector<std::string>& known_systems() {
    static const std::vector<std::string> s{"lorenz_auto", "lorenz_nonauto", "linear_benchmark",
                                            "pitchfork_benchmark", "nse_galerkin"};
    return s;
}

struct DomainSpec {
    std::optional<std::vector<double>> center;
    std::optional<double> radius;
    std::optional<std::size_t> count;
};

struct PullbackSpec {
    double t = 0.0;
    std::optional<double> T0;
    std::size_t levels = 8;
    double tol = 1e-6;
    std::size_t consecutive = 2;
    std::optional<double> merge_radius;
    std::vector<double> s_list;  ///< explicit schedule; overrides T0 / levels
};

struct UniformSpec {
    std::optional<double> t_window;  ///< default: 5 characteristic times, rounded up to whole forcing periods
    std::vector<double> s_grid;
    double tol = 1e-3;
    std::optional<double> merge_radius;
    std::size_t max_doublings = 8;
};

struct SweepSpec {
    std::string kind = "pullback";  ///< or "uniform"
    std::vector<GridAxis> axes;
    bool full_matrix = false;
};

struct EquiSpec {
    std::string kind = "pullback";
    std::filesystem::path sections;  ///< directory written by a previous sweep
    std::vector<double> s_values;
    std::vector<double> t_values;
};

struct BoundsSpec {
    std::size_t trials = 100;
    double horizon = 100.0;
    double v0_max = 50.0;
    std::vector<double> sigma_range{0.25, 4.0};
    std::vector<double> b_range{1.0, 4.0};
    std::optional<double> stride;  ///< sampling stride; default 0.01 (Lorenz), 0.1 (Galerkin)
    // Galerkin system
    std::size_t trajectories = 20;
    std::vector<double> rescale_nus{0.25, 0.5, 1.0, 2.0};
    double rescale_horizon = 20.0;
    double u0_scale = 1.0;
};

struct RunConfig {
    std::filesystem::path source;
    std::string system;
    ParameterPoint params;
    std::vector<lorenz::Sinusoid> forcing_terms;
    std::optional<double> forcing_R0;
    double pitchfork_eps = 0.0;
    int kmax = 8;
    std::vector<nse::ForcingEntry> nse_forcing;
    IntegratorConfig integrator;
    DomainSpec domain;
    PullbackSpec pullback;
    UniformSpec uniform;
    SweepSpec sweep;
    EquiSpec equi;
    BoundsSpec bounds;
    std::filesystem::path out = "out";
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

/// Parses TOML text; `origin` names the source in diagnostics.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);

/// Checks cross-field constraints that the parser cannot see locally.
void validate(const RunConfig& cfg);

struct Overrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<double> rel_tol;
    std::optional<unsigned> threads;
};

void apply(RunConfig& cfg, const Overrides& o);

}  // namespace pullback::app
