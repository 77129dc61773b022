#include "app/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pullback/sampling.hpp"
#include "pullback/systems/benchmarks.hpp"

namespace pullback::app {

namespace {

void require(const ParameterPoint& p, const char* name) {
    if (!p.has(name)) throw ConfigError(std::string("params.") + name, "missing");
}

std::vector<double> nonzero_frequencies(const std::vector<lorenz::Sinusoid>& terms) {
    std::vector<double> f;
    for (const auto& t : terms)
        if (t.frequency != 0.0 && t.amplitude != 0.0) f.push_back(std::abs(t.frequency));
    return f;
}

}  // namespace

System build_system(const RunConfig& cfg) {
    System s;
    s.name = cfg.system;
    s.base = cfg.params;
    if (cfg.system == "lorenz_auto") {
        s.proc = lorenz::autonomous_process();
    } else if (cfg.system == "lorenz_nonauto") {
        s.r_forcing = lorenz::ForcingR::from_sinusoids(cfg.forcing_terms, cfg.forcing_R0);
        s.proc = lorenz::nonautonomous_process(*s.r_forcing);
        s.frequencies = nonzero_frequencies(cfg.forcing_terms);
    } else if (cfg.system == "linear_benchmark") {
        if (!s.base.has("lambda")) s.base.set("lambda", 1.0);
        s.proc = benchmarks::linear_process(cfg.forcing_terms);
        s.frequencies = nonzero_frequencies(cfg.forcing_terms);
    } else if (cfg.system == "pitchfork_benchmark") {
        s.proc = benchmarks::pitchfork_process(cfg.pitchfork_eps);
        if (cfg.pitchfork_eps != 0.0) s.frequencies = {1.0};
    } else if (cfg.system == "nse_galerkin") {
        auto gal = std::make_shared<const nse::GalerkinSystem>(cfg.kmax);
        s.galerkin = gal;
        s.nse_forcing = nse::Forcing(gal->modes(), cfg.nse_forcing);
        if (!s.base.has("nu")) throw ConfigError("params.nu", "missing");
        s.proc = nse::galerkin_process(gal, s.nse_forcing);
        for (const auto& e : cfg.nse_forcing)
            if (e.mod_amplitude != 0.0 && e.mod_frequency != 0.0) s.frequencies.push_back(std::abs(e.mod_frequency));
    } else {
        throw ConfigError("system", "unknown system '" + cfg.system + "'");
    }
    s.autonomous = s.frequencies.empty();
    return s;
}

double characteristic_time(const System& sys, const ParameterPoint& lam) {
    if (sys.name == "lorenz_auto" || sys.name == "lorenz_nonauto") {
        require(lam, "sigma");
        require(lam, "b");
        return 1.0 / std::min({1.0, lam.get("sigma"), lam.get("b") / 2.0});
    }
    if (sys.name == "linear_benchmark") return 1.0 / lam.get_or("lambda", 1.0);
    if (sys.name == "nse_galerkin") return 1.0 / lam.get("nu");
    return 1.0;
}

PointCloud default_domain(const RunConfig& cfg, const System& sys, const std::vector<ParameterPoint>& lambdas) {
    const std::size_t dim = sys.proc.dim;
    std::vector<double> center(dim, 0.0);
    double radius = 0.0;

    if (sys.name == "lorenz_auto" || sys.name == "lorenz_nonauto") {
        // One ball containing the certified absorbing ball of every member.
        bool first = true;
        for (const auto& lam : lambdas) {
            require(lam, "sigma");
            require(lam, "b");
            const auto f = sys.r_forcing ? *sys.r_forcing : lorenz::ForcingR::constant(lam.get("r"));
            const auto ball = lorenz::absorbing_ball(lam.get("sigma"), lam.get("b"), f);
            if (first) {
                center.assign(ball.center.begin(), ball.center.end());
                first = false;
            }
            radius = std::max(radius, ball.radius + std::sqrt(squared_distance(center, ball.center)));
        }
    } else if (sys.name == "nse_galerkin") {
        for (const auto& lam : lambdas) {
            const auto p = nse::make_params(lam.get("nu"), sys.nse_forcing);
            radius = std::max(radius, std::sqrt(2.0) * p.nu * p.G * lam.get_or("forcing_scale", 1.0));
        }
        if (radius == 0.0) radius = 1.0;
    } else {
        radius = 2.0;
    }

    if (cfg.domain.center) {
        if (cfg.domain.center->size() != dim)
            throw ConfigError("domain.center", "expected " + std::to_string(dim) + " coordinates");
        center = *cfg.domain.center;
    }
    if (cfg.domain.radius) radius = *cfg.domain.radius;
    const std::size_t fallback = dim == 1 ? 1024 : dim <= 3 ? 4096 : 64;
    return sample_ball(center, radius, cfg.domain.count.value_or(fallback), cfg.seed);
}

std::optional<double> common_period(const std::vector<double>& frequencies) {
    if (frequencies.empty()) return std::nullopt;
    const double w1 = frequencies.front();
    std::vector<std::pair<long, long>> ratios;
    for (const double w : frequencies) {
        const double r = w / w1;
        bool found = false;
        for (long q = 1; q <= 64 && !found; ++q) {
            const double p = std::round(r * static_cast<double>(q));
            if (p >= 1.0 && std::abs(r * static_cast<double>(q) - p) <= 1e-9 * static_cast<double>(q)) {
                ratios.emplace_back(static_cast<long>(p), q);
                found = true;
            }
        }
        if (!found) return std::nullopt;
    }
    long L = 1;
    for (const auto& r : ratios) L = std::lcm(L, r.second);
    long g = 0;
    for (const auto& r : ratios) g = std::gcd(g, r.first * (L / r.second));
    const double w0 = w1 * static_cast<double>(g) / static_cast<double>(L);
    return 2.0 * std::numbers::pi / w0;
}

}  // namespace pullback::app
