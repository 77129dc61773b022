#include "app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "app/systems.hpp"
#include "pullback/attractors.hpp"
#include "pullback/continuity.hpp"
#include "pullback/io/csv.hpp"
#include "pullback/io/metadata.hpp"
#include "pullback/parallel.hpp"
#include "pullback/sampling.hpp"
#include "pullback/systems/benchmarks.hpp"

namespace pullback::app {

namespace fs = std::filesystem;
using io::format_double;
using io::json;

namespace {

std::vector<ParameterPoint> grid_points(const ParameterGrid& grid, const ParameterPoint& base) {
    std::vector<ParameterPoint> out;
    for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(grid.point(i, base));
    return out;
}

PullbackSchedule schedule_for(const RunConfig& cfg, const System& sys, const std::vector<ParameterPoint>& lams) {
    const auto& p = cfg.pullback;
    if (!p.s_list.empty()) return {p.s_list, p.tol, p.consecutive};
    double T0 = 0.0;
    if (p.T0) T0 = *p.T0;
    else
        for (const auto& l : lams) T0 = std::max(T0, 5.0 * characteristic_time(sys, l));
    return PullbackSchedule::geometric(p.t, T0, p.levels, p.tol, p.consecutive);
}

double pullback_merge(const RunConfig& cfg) { return cfg.pullback.merge_radius.value_or(cfg.pullback.tol / 4.0); }
double uniform_merge(const RunConfig& cfg) { return cfg.uniform.merge_radius.value_or(cfg.uniform.tol / 4.0); }

struct Window {
    double t_window;
    std::vector<double> s_grid;
};

Window window_for(const RunConfig& cfg, const System& sys, const std::vector<ParameterPoint>& lams,
                  std::ostream& log) {
    Window w;
    double tc = 0.0;
    for (const auto& l : lams) tc = std::max(tc, characteristic_time(sys, l));
    const auto period = common_period(sys.frequencies);
    if (!sys.autonomous && !period)
        log << "warning: forcing frequencies are incommensurate; the s-grid samples a window, not every phase\n";
    if (!cfg.uniform.s_grid.empty()) {
        w.s_grid = cfg.uniform.s_grid;
    } else if (sys.autonomous) {
        w.s_grid = {0.0};
    } else {
        const double P = period ? *period : 2.0 * std::numbers::pi / *std::min_element(sys.frequencies.begin(), sys.frequencies.end());
        for (std::size_t i = 0; i < 32; ++i) w.s_grid.push_back(P * static_cast<double>(i) / 32.0);
    }
    if (cfg.uniform.t_window) {
        w.t_window = *cfg.uniform.t_window;
    } else {
        w.t_window = 5.0 * tc;
        // Whole periods keep the end phases s + T on the same grid as T doubles.
        if (period) w.t_window = std::ceil(w.t_window / *period) * *period;
    }
    return w;
}

std::string index_name(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04zu", prefix, i);
    return buf;
}

std::vector<std::string> grid_coord_cells(const ParameterGrid& grid, std::size_t i) {
    std::vector<std::string> out;
    for (const double v : grid.coords(i)) out.push_back(format_double(v));
    return out;
}

json grid_json(const ParameterGrid& grid) {
    json axes = json::array();
    for (const auto& a : grid.axes()) axes.push_back({{"name", a.name}, {"values", a.values}});
    return {{"axes", axes}, {"points", grid.size()}};
}

json schedule_json(const PullbackSchedule& s) {
    return {{"s_list", s.s_list}, {"tol", s.tol}, {"consecutive_required", s.consecutive_required}};
}

io::Table pair_table(const ParameterGrid& grid, const std::vector<PairDistance>& pairs, double resolution) {
    io::Table t;
    for (const auto& a : grid.axes()) t.header.push_back(a.name + "_from");
    for (const auto& a : grid.axes()) t.header.push_back(a.name + "_to");
    for (const char* h : {"forward", "backward", "symmetric", "resolution"}) t.header.emplace_back(h);
    for (const auto& p : pairs) {
        auto row = grid_coord_cells(grid, p.i);
        const auto to = grid_coord_cells(grid, p.j);
        row.insert(row.end(), to.begin(), to.end());
        for (const double v : {p.d.forward, p.d.backward, p.d.symmetric, resolution}) row.push_back(format_double(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs_for(const ParameterGrid& grid, bool full) {
    if (!full) return grid.adjacent_pairs();
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j) out.emplace_back(i, j);
    return out;
}

}  // namespace

int cmd_pullback(const RunConfig& cfg, std::ostream& log) {
    const auto sys = build_system(cfg);
    const auto lam = sys.base;
    const auto D = default_domain(cfg, sys, {lam});
    const auto sched = schedule_for(cfg, sys, {lam});
    const auto sec = pullback_section(sys.proc, lam, cfg.pullback.t, D, sched, pullback_merge(cfg), cfg.integrator);
    io::write_section(cfg.out / "section", sec);
    auto meta = io::to_json(sec);
    meta["schedule"] = schedule_json(sched);
    meta["system"] = sys.name;
    meta["domain_points"] = D.size();
    meta["seed"] = cfg.seed;
    io::write_json(cfg.out / "section.json", meta);
    if (sys.galerkin && sec.cloud.size() == 1)
        io::write_snapshot_csv(cfg.out / "section_snapshot.csv", nse::snapshot(sys.galerkin->modes(), sec.cloud.point(0)));
    log << "pullback " << sys.name << " at " << describe(lam) << ", t=" << sec.t << ": "
        << (sec.converged ? "converged" : "NOT converged") << " at s=" << sec.s_converged << ", "
        << sec.cloud.size() << " points\n";
    return sec.converged ? kExitOk : kExitNotConverged;
}

int cmd_uniform(const RunConfig& cfg, std::ostream& log) {
    const auto sys = build_system(cfg);
    const auto lam = sys.base;
    const auto K = default_domain(cfg, sys, {lam});
    const auto win = window_for(cfg, sys, {lam}, log);
    const auto u = uniform_attractor(sys.proc, lam, K, win.t_window, win.s_grid, uniform_merge(cfg), cfg.uniform.tol,
                                     cfg.uniform.max_doublings, cfg.integrator);
    io::write_cloud_csv(cfg.out / "uniform.csv", u.cloud);
    auto meta = io::to_json(u);
    meta["system"] = sys.name;
    meta["initial_window"] = win.t_window;
    meta["domain_points"] = K.size();
    meta["seed"] = cfg.seed;
    io::write_json(cfg.out / "uniform.json", meta);
    log << "uniform " << sys.name << " at " << describe(lam) << ": " << (u.converged ? "converged" : "NOT converged")
        << " with window " << u.t_window << ", " << u.cloud.size() << " points\n";
    return u.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    const auto sys = build_system(cfg);
    const ParameterGrid grid(cfg.sweep.axes);
    const auto lams = grid_points(grid, sys.base);
    const auto D = default_domain(cfg, sys, lams);
    bool all_converged = true;
    json meta{{"system", sys.name}, {"grid", grid_json(grid)}, {"kind", cfg.sweep.kind},
              {"full_matrix", cfg.sweep.full_matrix}, {"domain_points", D.size()}, {"seed", cfg.seed}};
    json points = json::array();
    std::vector<PairDistance> pairs;
    double resolution = 0.0;

    if (cfg.sweep.kind == "pullback") {
        const auto sched = schedule_for(cfg, sys, lams);
        const auto sw = sweep_pullback(sys.proc, grid, cfg.pullback.t, D, sched, pullback_merge(cfg), cfg.integrator,
                                       sys.base, cfg.sweep.full_matrix);
        resolution = pullback_merge(cfg);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto name = index_name("point", i);
            json pj{{"index", i}, {"lambda", io::to_json(lams[i])}};
            if (sw.sections[i]) {
                io::write_section(cfg.out / "sections" / name, *sw.sections[i]);
                pj["artifact"] = "sections/" + name;
                pj["converged"] = sw.sections[i]->converged;
                all_converged = all_converged && sw.sections[i]->converged;
            } else {
                pj["error"] = sw.failures[i];
                all_converged = false;
                log << "grid point " << describe(lams[i]) << " failed: " << sw.failures[i] << "\n";
            }
            points.push_back(pj);
        }
        pairs = sw.pairwise;
        meta["t"] = cfg.pullback.t;
        meta["schedule"] = schedule_json(sched);
    } else {
        const auto win = window_for(cfg, sys, lams, log);
        resolution = uniform_merge(cfg);
        std::vector<std::optional<UniformAttractorApprox>> us(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto name = index_name("uniform", i);
            json pj{{"index", i}, {"lambda", io::to_json(lams[i])}};
            try {
                us[i] = uniform_attractor(sys.proc, lams[i], D, win.t_window, win.s_grid, resolution, cfg.uniform.tol,
                                          cfg.uniform.max_doublings, cfg.integrator);
                io::write_uniform(cfg.out / "sections" / name, *us[i]);
                pj["artifact"] = "sections/" + name;
                pj["converged"] = us[i]->converged;
                all_converged = all_converged && us[i]->converged;
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                pj["error"] = e.what();
                all_converged = false;
                log << "grid point " << describe(lams[i]) << " failed: " << e.what() << "\n";
            }
            points.push_back(pj);
        }
        if (std::none_of(us.begin(), us.end(), [](const auto& u) { return u.has_value(); }))
            throw Error("sweep: every grid point failed");
        for (const auto& [i, j] : pairs_for(grid, cfg.sweep.full_matrix))
            if (us[i] && us[j]) pairs.push_back({i, j, hausdorff(us[i]->cloud, us[j]->cloud)});
        meta["t_window"] = win.t_window;
        meta["s_grid"] = win.s_grid;
    }
    meta["points_detail"] = points;
    io::write_json(cfg.out / "sweep.json", meta);
    io::write_table(cfg.out / "summary.csv", pair_table(grid, pairs, resolution));
    log << "sweep " << sys.name << ": " << grid.size() << " grid points, " << pairs.size() << " pairs"
        << (all_converged ? "" : " (some points did not converge)") << "\n";
    return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_equi(const RunConfig& cfg, std::ostream& log) {
    const auto sys = build_system(cfg);
    const ParameterGrid grid(cfg.sweep.axes);
    const auto lams = grid_points(grid, sys.base);
    if (cfg.equi.sections.empty()) throw ConfigError("equi.sections", "missing: directory of precomputed sections");
    const auto D = default_domain(cfg, sys, lams);

    io::Table t;
    const bool pullback_kind = cfg.equi.kind == "pullback";
    t.header.emplace_back(pullback_kind ? "s" : "t");
    t.header.emplace_back("sup_rate");
    for (const auto& a : grid.axes()) t.header.push_back("argmax_" + a.name);
    if (!pullback_kind) t.header.emplace_back("argmax_s");

    auto check_lambda = [&](const ParameterPoint& got, std::size_t i, const fs::path& where) {
        for (const auto& [n, v] : lams[i].coords())
            if (!got.has(n) || got.get(n) != v)
                throw Error(where.string() + ": artifact belongs to " + describe(got) + ", expected " + describe(lams[i]));
    };

    if (pullback_kind) {
        std::vector<AttractorSection> secs;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto stem = cfg.equi.sections / "sections" / index_name("point", i);
            secs.push_back(io::read_section(stem));
            check_lambda(secs.back().lambda, i, stem);
        }
        const double t_obs = secs.front().t;
        std::vector<double> s_values = cfg.equi.s_values;
        if (s_values.empty()) s_values = schedule_for(cfg, sys, lams).s_list;
        const auto rep = equi_attraction_rate(sys.proc, grid, t_obs, D, s_values, secs, cfg.integrator, sys.base);
        io::Table per;
        per.header = {"s"};
        for (const auto& a : grid.axes()) per.header.push_back(a.name);
        per.header.emplace_back("rate");
        for (std::size_t k = 0; k < rep.s_values.size(); ++k) {
            std::vector<std::string> row{format_double(rep.s_values[k]), format_double(rep.rates[k])};
            for (const auto& c : grid_coord_cells(grid, rep.argmax[k])) row.push_back(c);
            t.rows.push_back(std::move(row));
            for (std::size_t i = 0; i < grid.size(); ++i) {
                std::vector<std::string> r{format_double(rep.s_values[k])};
                for (const auto& c : grid_coord_cells(grid, i)) r.push_back(c);
                r.push_back(format_double(rep.per_lambda[k][i]));
                per.rows.push_back(std::move(r));
            }
        }
        io::write_table(cfg.out / "equi_per_lambda.csv", per);
    } else {
        std::vector<UniformAttractorApprox> us;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto stem = cfg.equi.sections / "sections" / index_name("uniform", i);
            us.push_back(io::read_uniform(stem));
            check_lambda(us.back().lambda, i, stem);
        }
        std::vector<double> t_values = cfg.equi.t_values;
        const auto win = window_for(cfg, sys, lams, log);
        if (t_values.empty())
            for (int k = 0; k < 4; ++k) t_values.push_back(win.t_window * std::ldexp(1.0, k));
        const auto rep = uniform_equi_attraction_rate(sys.proc, grid, D, t_values, us.front().s_grid, us,
                                                      cfg.integrator, sys.base);
        for (std::size_t k = 0; k < rep.t_values.size(); ++k) {
            std::vector<std::string> row{format_double(rep.t_values[k]), format_double(rep.rates[k])};
            for (const auto& c : grid_coord_cells(grid, rep.argmax_lambda[k])) row.push_back(c);
            row.push_back(format_double(rep.argmax_s[k]));
            t.rows.push_back(std::move(row));
        }
    }
    io::write_table(cfg.out / "equi.csv", t);
    io::write_json(cfg.out / "equi.json", {{"system", sys.name}, {"kind", cfg.equi.kind}, {"grid", grid_json(grid)},
                                           {"sections", cfg.equi.sections.generic_string()}, {"seed", cfg.seed}});
    log << "equi " << sys.name << ": " << t.rows.size() << " rows over " << grid.size() << " grid points\n";
    return kExitOk;
}

namespace {

int verify_lorenz(const RunConfig& cfg, const System& sys, std::ostream& log) {
    const auto& b = cfg.bounds;
    const double stride = b.stride.value_or(0.01);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto in_range = [&](const std::vector<double>& r) { return r[0] + (r[1] - r[0]) * unit(rng); };
    const auto forcing = sys.r_forcing ? *sys.r_forcing : lorenz::ForcingR::constant(sys.base.get_or("r", 28.0));

    io::Table t{{"trial", "sigma", "b", "sigma2", "b2", "v0_norm", "horizon", "F0", "sigma0", "R1", "R2", "R3",
                 "max_u", "max_v", "envelope_min_slack", "absorbing_violations", "max_gap", "difference_violations",
                 "near_misses"},
                {}};
    std::size_t violations = 0, near = 0, samples = 0;
    for (std::size_t k = 0; k < b.trials; ++k) {
        const double s1 = in_range(b.sigma_range), b1 = in_range(b.b_range);
        const double s2 = std::clamp(s1 + 0.1 * (2.0 * unit(rng) - 1.0), b.sigma_range[0], b.sigma_range[1]);
        const double b2 = std::clamp(b1 + 0.1 * (2.0 * unit(rng) - 1.0), b.b_range[0], b.b_range[1]);
        lorenz::Vec3 v0{gauss(rng), gauss(rng), gauss(rng)};
        const double scale = b.v0_max * std::cbrt(unit(rng)) / std::max(lorenz::norm3(v0), 1e-300);
        for (auto& c : v0) c *= scale;
        const double horizon = b.horizon * (0.1 + 0.9 * unit(rng));

        const auto ab = lorenz::verify_absorbing_bound(s1, b1, forcing, v0, horizon, cfg.integrator, stride);
        const auto df = lorenz::verify_difference_bound(s1, b1, s2, b2, forcing, v0, horizon, cfg.integrator, stride);
        const std::size_t av = ab.r1_u.violations + ab.r1_v.violations + ab.envelope.violations;
        const std::size_t nm = ab.r1_u.near_misses + ab.r1_v.near_misses + ab.envelope.near_misses + df.gronwall.near_misses;
        violations += av + df.gronwall.violations;
        near += nm;
        samples += ab.r1_u.samples + ab.envelope.samples + df.gronwall.samples;
        const auto& bd = ab.bounds;
        std::vector<double> nums{s1, b1, s2, b2, lorenz::norm3(v0), horizon, bd.F0, bd.sigma0, bd.R1, df.bounds.R2,
                                 df.bounds.R3, ab.max_u, ab.max_v, ab.envelope.min_slack};
        std::vector<std::string> row{std::to_string(k)};
        for (const double v : nums) row.push_back(format_double(v));
        row.push_back(std::to_string(av));
        row.push_back(format_double(df.max_gap));
        row.push_back(std::to_string(df.gronwall.violations));
        row.push_back(std::to_string(nm));
        t.rows.push_back(std::move(row));
    }
    io::write_table(cfg.out / "bounds_trials.csv", t);
    const auto ref = lorenz::compute_bounds(sys.base.get_or("sigma", 10.0), sys.base.get_or("b", 8.0 / 3.0),
                                            sys.base.get_or("sigma", 10.0), sys.base.get_or("b", 8.0 / 3.0),
                                            forcing.R0(), 0.0);
    io::write_json(cfg.out / "bounds.json",
                   {{"system", sys.name},
                    {"trials", b.trials},
                    {"samples", samples},
                    {"violations", violations},
                    {"near_misses", near},
                    {"margin", "10 (rel_tol |bound| + abs_tol)"},
                    {"holds", violations == 0},
                    {"R0", forcing.R0()},
                    {"reference_constants",
                     {{"F0", ref.F0}, {"sigma0", ref.sigma0}, {"absorbing_radius", ref.absorbing_radius},
                      {"R1_at_v0_0", ref.R1}, {"R2_at_v0_0", ref.R2}, {"R3", ref.R3}}},
                    {"seed", cfg.seed}});
    log << "verify-bounds " << sys.name << ": " << b.trials << " trials, " << samples << " samples, " << violations
        << " violations, " << near << " near misses\n";
    return violations == 0 ? kExitOk : kExitNotConverged;
}

/// Random field supported on |k|^2 <= 4 with ||u|| = norm.
std::vector<double> low_mode_state(const nse::ModeSet& modes, double norm, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(modes.state_dim(), 0.0);
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i].norm2() <= 4.0) {
            x[2 * i] = gauss(rng);
            x[2 * i + 1] = gauss(rng);
        }
    const double e = std::sqrt(nse::energy(x));
    for (auto& v : x) v *= norm / e;
    return x;
}

int verify_nse(const RunConfig& cfg, const System& sys, std::ostream& log) {
    const auto& b = cfg.bounds;
    const double stride = b.stride.value_or(0.1);
    const double nu = sys.base.get("nu");
    const auto& gal = *sys.galerkin;
    const auto params = nse::make_params(nu, sys.nse_forcing);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    io::Table t{{"trajectory", "u0_energy", "horizon", "differential_violations", "gronwall_violations",
                 "dissipation_violations", "near_misses", "gronwall_min_slack", "entry_time", "stays_in_ball"},
                {}};
    std::size_t violations = 0, near = 0;
    for (std::size_t k = 0; k < b.trajectories; ++k) {
        const double norm = b.u0_scale * std::max(2.0 * params.nu * params.G, 1.0) * (0.5 + 0.5 * unit(rng));
        const auto u0 = low_mode_state(gal.modes(), norm, rng);
        const auto rep = nse::verify_energy_estimates(gal, nu, sys.nse_forcing, u0, b.horizon, cfg.integrator, stride);
        const std::size_t v = rep.differential.violations + rep.gronwall.violations + rep.dissipation.violations +
                              (rep.stays_in_ball ? 0 : 1);
        violations += v;
        const std::size_t nm = rep.differential.near_misses + rep.gronwall.near_misses + rep.dissipation.near_misses;
        near += nm;
        t.rows.push_back({std::to_string(k), format_double(rep.u0_energy), format_double(b.horizon),
                          std::to_string(rep.differential.violations), std::to_string(rep.gronwall.violations),
                          std::to_string(rep.dissipation.violations), std::to_string(nm),
                          format_double(rep.gronwall.min_slack),
                          rep.entry_time ? format_double(*rep.entry_time) : std::string("none"),
                          rep.stays_in_ball ? "true" : "false"});
    }
    io::write_table(cfg.out / "energy_trials.csv", t);

    io::Table rs{{"nu", "samples", "max_residual", "max_ratio"}, {}};
    bool rescale_ok = true;
    for (const double n : b.rescale_nus) {
        const auto u0 = low_mode_state(gal.modes(), 1.0, rng);
        const auto rep = nse::viscosity_rescale_check(gal, n, sys.nse_forcing, u0, b.rescale_horizon, cfg.integrator);
        rescale_ok = rescale_ok && rep.holds();
        rs.rows.push_back({format_double(n), std::to_string(rep.samples), format_double(rep.max_residual),
                           format_double(rep.max_ratio)});
    }
    io::write_table(cfg.out / "rescale.csv", rs);
    const bool ok = violations == 0 && rescale_ok;
    io::write_json(cfg.out / "bounds.json", {{"system", sys.name},
                                             {"nu", nu},
                                             {"lambda1", params.lambda1},
                                             {"f_sup", params.f_sup},
                                             {"G", params.G},
                                             {"rho0", params.nu * params.G},
                                             {"trajectories", b.trajectories},
                                             {"violations", violations},
                                             {"near_misses", near},
                                             {"rescale_holds", rescale_ok},
                                             {"holds", ok},
                                             {"seed", cfg.seed}});
    log << "verify-bounds " << sys.name << ": G=" << params.G << ", " << b.trajectories << " trajectories, "
        << violations << " violations, rescale " << (rescale_ok ? "ok" : "FAILED") << "\n";
    return ok ? kExitOk : kExitNotConverged;
}

}  // namespace

int cmd_verify_bounds(const RunConfig& cfg, std::ostream& log) {
    const auto sys = build_system(cfg);
    if (sys.name == "lorenz_auto" || sys.name == "lorenz_nonauto") return verify_lorenz(cfg, sys, log);
    if (sys.name == "nse_galerkin") return verify_nse(cfg, sys, log);
    throw ConfigError("system", "verify-bounds supports lorenz_auto, lorenz_nonauto and nse_galerkin");
}

int cmd_oracle(const RunConfig& cfg, std::ostream& log) {
    struct Row {
        std::string name;
        double expected;
        double observed;
        double error;
        double tolerance;
        bool pass() const { return error <= tolerance; }
    };
    std::vector<Row> rows;
    const auto& ic = cfg.integrator;

    {
        VectorField decay = [](double, std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; };
        const double x = evolve_field(decay, 1, 1e6, ic, 0.0, 1.0, std::vector<double>{1.0})[0];
        rows.push_back({"evolve x'=-x to t=1", std::exp(-1.0), x, std::abs(x - std::exp(-1.0)), 1e-8});
    }
    const std::vector<lorenz::Sinusoid> sin_t{{1.0, 1.0, 0.0}};
    const auto lin = benchmarks::linear_process(sin_t);
    const auto D = sample_interval(-2.0, 2.0, 1025);
    const auto sched = PullbackSchedule::geometric(0.0, 5.0, 8, 1e-8);
    for (const double lam : {1.0, 2.0}) {
        const auto sec = pullback_section(lin, {{"lambda", lam}}, 0.0, D, sched, 1e-9, ic);
        const double want = -1.0 / (1.0 + lam * lam);
        const double err = hausdorff_distance(sec.cloud, PointCloud(1, {want}));
        rows.push_back({"linear pullback section, lambda=" + format_double(lam), want, sec.cloud.point(0)[0], err, 1e-6});
    }
    {
        std::vector<double> s_grid;
        for (int i = 0; i < 32; ++i) s_grid.push_back(2.0 * std::numbers::pi * i / 32.0);
        const auto u = uniform_attractor(lin, {{"lambda", 1.0}}, sample_interval(-2.0, 2.0, 65),
                                         4.0 * std::numbers::pi, s_grid, 1e-4, 1e-4, 6, ic);
        const double h = std::sqrt(0.5);
        const double err = hausdorff_distance(u.cloud, sample_interval(-h, h, 2001));
        rows.push_back({"linear uniform attractor vs [-sqrt(1/2) sqrt(1/2)]", 0.0, err, err,
                        2.0 * 2.0 * std::numbers::pi / 32.0});
    }
    {
        const auto pf = benchmarks::pitchfork_process();
        const auto sec = pullback_section(pf, {{"lambda", 1.0}}, 0.0, sample_interval(-2.0, 2.0, 9),
                                          PullbackSchedule::geometric(0.0, 5.0, 6, 1e-8), 1e-6, ic);
        const double err = hausdorff_distance(sec.cloud, PointCloud(1, {-1.0, 0.0, 1.0}));
        rows.push_back({"pitchfork lambda=1 section vs {-1 0 1}", 0.0, err, err, 1e-6});
    }
    {
        const auto v = lorenz::lorenz_field({10.0, 8.0 / 3.0, 28.0}, {1.0, 2.0, 3.0});
        const double err = lorenz::norm3({v[0] - 10.0, v[1] - 23.0, v[2] + 6.0});
        rows.push_back({"Lorenz field at (1 2 3)", 0.0, err, err, 1e-12});
    }
    {
        const double G = nse::grashof(0.1, 1.0, 2.0);
        rows.push_back({"Grashof number nu=0.1 f=2", 200.0, G, std::abs(G - 200.0), 1e-9});
    }

    bool ok = true;
    io::Table t{{"check", "expected", "observed", "error", "tolerance", "result"}, {}};
    log << std::left << std::setw(54) << "check" << std::setw(14) << "error" << "result\n";
    for (const auto& r : rows) {
        ok = ok && r.pass();
        log << std::left << std::setw(54) << r.name << std::setw(14) << std::setprecision(3) << r.error
            << (r.pass() ? "PASS" : "FAIL") << "\n";
        t.rows.push_back({r.name, format_double(r.expected), format_double(r.observed),
                          format_double(r.error), format_double(r.tolerance), r.pass() ? "pass" : "fail"});
    }
    io::write_table(cfg.out / "oracle.csv", t);
    return ok ? kExitOk : kExitNotConverged;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pullback and uniform attractor approximation for parameterised non-autonomous systems"};
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        std::string out;
        std::uint64_t seed = 0;
        double tol = 0.0;
        double rel_tol = 0.0;
        unsigned threads = 0;
    };
    Flags f;
    using Cmd = int (*)(const RunConfig&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Cmd>> verbs{
        {"pullback", "Approximate a pullback attractor section A(t)", cmd_pullback},
        {"uniform", "Approximate the uniform attractor", cmd_uniform},
        {"sweep", "Sections over a parameter grid with adjacent-pair distances", cmd_sweep},
        {"equi", "Equi-attraction rates from precomputed sweep artifacts", cmd_equi},
        {"verify-bounds", "Check the a priori bounds along sampled trajectories", cmd_verify_bounds},
        {"oracle", "Closed-form benchmark checks", cmd_oracle},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help, fn] : verbs) {
        auto* sub = app.add_subcommand(name, help);
        auto* c = sub->add_option("--config", f.config, "TOML run configuration");
        if (name != "oracle") c->required();
        sub->add_option("--out", f.out, "Output directory");
        sub->add_option("--seed", f.seed, "Seed for random sampling");
        sub->add_option("--tol", f.tol, "Hausdorff convergence tolerance");
        sub->add_option("--rel-tol", f.rel_tol, "Integrator relative tolerance");
        sub->add_option("--threads", f.threads, "Worker threads (0: all cores)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            RunConfig cfg = f.config.empty() ? parse_config("system = \"linear_benchmark\"\n", "defaults")
                                             : load_config(f.config);
            Overrides o;
            if (subs[i]->count("--out")) o.out = f.out;
            if (subs[i]->count("--seed")) o.seed = f.seed;
            if (subs[i]->count("--tol")) o.tol = f.tol;
            if (subs[i]->count("--rel-tol")) o.rel_tol = f.rel_tol;
            if (subs[i]->count("--threads")) o.threads = f.threads;
            apply(cfg, o);
            set_thread_count(cfg.threads);
            return std::get<2>(verbs[i])(cfg, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace pullback::app
