#pragma once

// Builds the process, default seed sets and time scales named by a RunConfig.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "pullback/geometry.hpp"
#include "pullback/process.hpp"
#include "pullback/systems/lorenz.hpp"
#include "pullback/systems/nse.hpp"

namespace pullback::app {

struct System {
    std::string name;
    ProcessDef proc;
    ParameterPoint base;                    ///< [params] with system defaults filled in
    std::optional<lorenz::ForcingR> r_forcing;  ///< Lorenz forcing
    std::shared_ptr<const nse::GalerkinSystem> galerkin;
    nse::Forcing nse_forcing;
    bool autonomous = true;
    std::vector<double> frequencies;        ///< nonzero forcing frequencies
};

System build_system(const RunConfig& cfg);

/// Time over which the system contracts by a factor e.
double characteristic_time(const System& sys, const ParameterPoint& lam);

/**
 * Seed set shared by every parameter in `lambdas`: the configured domain, or a
 * ball certified to absorb each member (Lorenz), or the interval [-2, 2]
 * (scalar benchmarks), or the energy ball of radius sqrt(2) nu G (Galerkin).
 */
PointCloud default_domain(const RunConfig& cfg, const System& sys, const std::vector<ParameterPoint>& lambdas);

/// Smallest common period of the forcing, when the frequencies are commensurate.
std::optional<double> common_period(const std::vector<double>& frequencies);

}  // namespace pullback::app
