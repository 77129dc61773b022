// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "pullback/attractors.hpp"
#include "pullback/continuity.hpp"
#include "pullback/io/csv.hpp"
#include "pullback/io/metadata.hpp"
#include "pullback/sampling.hpp"
#include "pullback/systems/benchmarks.hpp"
#include "pullback/systems/lorenz.hpp"
#include "pullback/systems/nse.hpp"

namespace fs = std::filesystem;
using namespace pullback;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pullback_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path source_config(const char* name) { return fs::path(PULLBACK_SOURCE_DIR) / "configs" / name; }

app::RunConfig load(const char* name, const fs::path& out) {
    auto cfg = app::load_config(source_config(name));
    cfg.out = out;
    return cfg;
}

const std::vector<lorenz::Sinusoid> kSin{{1.0, 1.0, 0.0}};

// 1 -------------------------------------------------------------------------

Outcome hausdorff_oracle() {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> size(1, 500);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t dim = 1 + trial % 3;
        auto cloud = [&](std::size_t n, double shift) {
            std::vector<double> c(dim * n);
            for (auto& v : c) v = u(rng) + shift;
            return PointCloud(dim, std::move(c));
        };
        const auto a = cloud(size(rng), 0.0);
        const auto b = cloud(size(rng), 0.3 * u(rng));
        const auto fast = hausdorff(a, b);
        const auto slow = hausdorff_brute(a, b);
        if (fast.forward != slow.forward || fast.backward != slow.backward || fast.symmetric != slow.symmetric)
            ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " of 100 pairs differ from brute force"};
}

// 2 -------------------------------------------------------------------------

Outcome process_laws() {
    struct Case {
        std::string name;
        ProcessDef proc;
        ParameterPoint lam;
        std::function<std::vector<double>(std::mt19937_64&)> x0;
    };
    auto box = [](std::vector<double> lo, std::vector<double> hi) {
        return [lo, hi](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            std::vector<double> x(lo.size());
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
            return x;
        };
    };
    auto gal = std::make_shared<const nse::GalerkinSystem>(8);
    const nse::Forcing nf(gal->modes(), {{1, 2, {0.2, -0.1}, 1.0, 0.5, 1.0, 0.0}});
    std::vector<Case> cases{
        {"linear", benchmarks::linear_process(kSin), {{"lambda", 1.0}}, box({-2.0}, {2.0})},
        {"pitchfork", benchmarks::pitchfork_process(0.3), {{"lambda", 1.0}}, box({-2.0}, {2.0})},
        {"lorenz_auto", lorenz::autonomous_process(), {{"sigma", 10.0}, {"b", 8.0 / 3.0}, {"r", 28.0}},
         box({-15.0, -15.0, 10.0}, {15.0, 15.0, 40.0})},
        {"lorenz_nonauto",
         lorenz::nonautonomous_process(lorenz::ForcingR::from_sinusoids({{28.0, 0.0, M_PI / 2}, {4.0, 1.0, 0.0}})),
         {{"sigma", 10.0}, {"b", 8.0 / 3.0}},
         box({-15.0, -15.0, 10.0}, {15.0, 15.0, 40.0})},
        // Low-mode states of unit energy norm.
        {"nse_galerkin", nse::galerkin_process(gal, nf), {{"nu", 0.2}},
         [&](std::mt19937_64& rng) {
             std::normal_distribution<double> g(0.0, 1.0);
             std::vector<double> x(gal->state_dim(), 0.0);
             for (std::size_t i = 0; i < gal->modes().size(); ++i)
                 if (gal->modes()[i].norm2() <= 8) x[2 * i] = g(rng), x[2 * i + 1] = g(rng);
             const double n = euclidean_norm(x);
             for (auto& v : x) v /= n;
             return x;
         }},
    };
    const IntegratorConfig cfg;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t p1_fail = 0, p2_fail = 0;
    double worst = 0.0;
    std::string worst_case;
    std::string timing;
    for (const auto& c : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        for (int trial = 0; trial < 100; ++trial) {
            const auto x0 = c.x0(rng);
            const double s = -5.0 + 10.0 * u(rng);
            if (evolve(c.proc, c.lam, s, s, x0, cfg) != x0) ++p1_fail;
            const double tau = s + u(rng);
            const double t = tau + u(rng);
            const auto direct = evolve(c.proc, c.lam, s, t, x0, cfg);
            const auto split = evolve(c.proc, c.lam, tau, t, evolve(c.proc, c.lam, s, tau, x0, cfg), cfg);
            const double ratio =
                std::sqrt(squared_distance(direct, split)) / (10.0 * cfg.rel_tol * (1.0 + euclidean_norm(direct)));
            if (ratio > 1.0) ++p2_fail;
            if (ratio > worst) worst = ratio, worst_case = c.name;
        }
        timing += " " + c.name + fmt(" %.1fs", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return {p1_fail == 0 && p2_fail == 0,
            "identity failures " + std::to_string(p1_fail) + "/500, cocycle failures " + std::to_string(p2_fail) +
                "/500, worst residual " + fmt("%.3g", worst) + " of allowance (" + worst_case + ");" + timing};
}

// 3 -------------------------------------------------------------------------

Outcome pullback_oracle() {
    const auto p = benchmarks::linear_process(kSin);
    const auto D = sample_interval(-2.0, 2.0, 1024);
    bool ok = true;
    std::string detail;
    for (const double l : {1.0, 2.0}) {
        const auto sec = pullback_section(p, {{"lambda", l}}, 0.0, D, PullbackSchedule::geometric(0.0, 5.0, 8, 1e-8),
                                          2.5e-9);
        const double want = -1.0 / (1.0 + l * l);
        const double err = hausdorff_distance(sec.cloud, PointCloud(1, {want}));
        ok = ok && sec.converged && sec.s_converged <= -40.0 && err <= 1e-6;
        detail += fmt("lambda=%g: error %.2e, s=%g; ", l, err, sec.s_converged);
    }
    return {ok, detail};
}

// 4 -------------------------------------------------------------------------

Outcome uniform_oracle() {
    const auto p = benchmarks::linear_process(kSin);
    const auto K = sample_interval(-2.0, 2.0, 65);
    std::vector<double> grid;
    for (int i = 0; i < 32; ++i) grid.push_back(2.0 * std::numbers::pi * i / 32.0);
    const double h = grid[1] - grid[0];
    const auto u = uniform_attractor(p, {{"lambda", 1.0}}, K, 4.0 * std::numbers::pi, grid, 1e-4, 1e-3);
    const double r = std::numbers::sqrt2 / 2.0;
    const double err = hausdorff_distance(u.cloud, sample_interval(-r, r, 200001));

    // Autonomous restrictions: the forcing removed, and the unforced pitchfork.
    const double tol = 1e-6;
    const auto lin0 = benchmarks::linear_process({});
    const auto u0 = uniform_attractor(lin0, {{"lambda", 1.0}}, K, 5.0, {0.0, 1.0, 2.0}, tol / 4, tol, 8);
    const double d0 = hausdorff_distance(u0.cloud, PointCloud(1, {0.0}));
    const auto pf = benchmarks::pitchfork_process(0.0);
    const auto K9 = sample_interval(-2.0, 2.0, 9);
    const auto upf = uniform_attractor(pf, {{"lambda", 1.0}}, K9, 5.0, {0.0, 1.0, 2.0}, tol / 4, tol, 8);
    const auto gpf = pullback_section(pf, {{"lambda", 1.0}}, 0.0, K9, PullbackSchedule::geometric(0.0, 5.0, 8, tol),
                                      tol / 4);
    const double dpf = hausdorff_distance(upf.cloud, gpf.cloud);
    const bool ok = u.converged && err <= 2.0 * h && u0.converged && d0 <= 2.0 * tol && upf.converged &&
                    gpf.converged && dpf <= 2.0 * tol;
    return {ok, fmt("interval distance %.3g (limit %.3g); autonomous |U-A|: linear %.2e, pitchfork %.2e", err, 2.0 * h,
                    d0, dpf) +
                    fmt(" (limit %.0e)", 2.0 * tol)};
}

// 5 -------------------------------------------------------------------------

Outcome lorenz_bounds() {
    const auto dir = scratch("lorenz_bounds");
    std::ostringstream log;
    const int rc = app::cmd_verify_bounds(load("lorenz_bounds.toml", dir), log);
    auto cfg2 = load("lorenz_bounds.toml", dir / "auto");
    cfg2.system = "lorenz_auto";
    cfg2.params.set("r", 28.0);
    fs::create_directories(cfg2.out);
    const int rc2 = app::cmd_verify_bounds(cfg2, log);
    const auto j1 = io::read_json(dir / "bounds.json");
    const auto j2 = io::read_json(dir / "auto" / "bounds.json");
    const std::size_t trials = j1["trials"].get<std::size_t>() + j2["trials"].get<std::size_t>();
    const std::size_t viol = j1["violations"].get<std::size_t>() + j2["violations"].get<std::size_t>();
    const std::size_t samples = j1["samples"].get<std::size_t>() + j2["samples"].get<std::size_t>();
    return {rc == 0 && rc2 == 0 && viol == 0 && trials >= 100,
            std::to_string(trials) + " trials (forced and autonomous), " + std::to_string(samples) + " samples, " +
                std::to_string(viol) + " violations beyond margin"};
}

// 6 -------------------------------------------------------------------------

Outcome dini_monotone() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t monotone = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double l = 0.5 + 2.5 * u(rng);
        const std::vector<lorenz::Sinusoid> g{{0.5 + u(rng), 0.5 + 2.0 * u(rng), 2.0 * std::numbers::pi * u(rng)}};
        const auto p = benchmarks::linear_process(g);
        // The hull of D contains [-a/lambda, a/lambda], which the flow maps into itself.
        const double reach = g[0].amplitude / l;
        const double lo = -reach - 2.0 * u(rng), hi = reach + 2.0 * u(rng);
        const auto D = sample_interval(lo, hi, 2 + static_cast<std::size_t>(60 * u(rng)));
        const double tol = std::pow(10.0, -4.0 - 4.0 * u(rng));
        const double merge = tol / 4;
        const auto sec = pullback_section(p, {{"lambda", l}}, 0.0, D,
                                          PullbackSchedule::geometric(0.0, 0.5 / l, 12, tol), merge, {}, true);
        if (check_monotone_convergence(distances_to_final(sec), 2.0 * merge).monotone) ++monotone;
    }
    return {monotone == 100, std::to_string(monotone) + "/100 distance-to-limit histories non-increasing within 2 merge radii"};
}

// 7 -------------------------------------------------------------------------

Outcome invariance() {
    const double tol = 1e-3;
    const auto p = benchmarks::linear_process(kSin);
    const auto D = sample_interval(-2.0, 2.0, 256);
    const auto a1 = pullback_section(p, {{"lambda", 1.0}}, 0.0, D, PullbackSchedule::geometric(0.0, 5.0, 8, tol), tol / 4);
    const auto a2 = pullback_section(p, {{"lambda", 1.0}}, 1.0, D, PullbackSchedule::geometric(1.0, 5.0, 8, tol), tol / 4);
    const double lin = invariance_residual(p, a1, a2);
    const bool lin_ok = a1.converged && a2.converged && lin <= 5.0 * tol;

    // Classic Lorenz: 512 seeds in the absorbing ball, start times down to -40.
    const auto lp = lorenz::autonomous_process();
    const ParameterPoint lam{{"sigma", 10.0}, {"b", 8.0 / 3.0}, {"r", 28.0}};
    const auto ball = lorenz::absorbing_ball(10.0, 8.0 / 3.0, lorenz::ForcingR::constant(28.0));
    const auto LD = sample_ball(ball.center, ball.radius, 512, 1);
    const auto l1 = pullback_section(lp, lam, 0.0, LD, PullbackSchedule::geometric(0.0, 5.0, 4, tol), tol / 4);
    const auto l2 = pullback_section(lp, lam, 0.5, LD, PullbackSchedule::geometric(0.5, 5.0, 4, tol), tol / 4);
    // The sections are not converged, so the residual is evaluated on the deepest iterates directly.
    const auto image = evolve_cloud(lp, lam, 0.0, 0.5, l1.cloud, tol / 4).cloud;
    const double lor = hausdorff_distance(image, l2.cloud);
    const bool lor_ok = l1.converged && l2.converged && lor <= 5.0 * tol;
    return {lin_ok && lor_ok,
            fmt("linear residual %.2e; Lorenz residual %.3g with last refinement step %.3g (limit %.0e); ", lin, lor,
                l1.history.back().delta, 5.0 * tol) +
                (l1.converged ? "Lorenz sections converged" : "Lorenz sections did not converge")};
}

// 8 -------------------------------------------------------------------------

Outcome nse_suite() {
    const nse::GalerkinSystem sys(8);
    std::mt19937_64 rng(808);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(sys.state_dim());
        const double decay = 0.5 * (trial % 4);
        for (std::size_t i = 0; i < sys.modes().size(); ++i) {
            const double w = std::pow(sys.modes()[i].norm2(), -decay);
            x[2 * i] = w * g(rng);
            x[2 * i + 1] = w * g(rng);
        }
        const auto a = nse::amplitudes(x);
        std::vector<nse::cplx> nl(a.size());
        sys.nonlinear(a, nl);
        double nb = 0.0;
        for (const auto& v : nl) nb += 2.0 * std::norm(v);
        worst = std::max(worst, std::abs(nse::nonlinear_energy_transfer(sys, x)) / (std::sqrt(nb * nse::energy(x))));
    }

    const auto dir = scratch("nse_bounds");
    std::ostringstream log;
    const int rc = app::cmd_verify_bounds(load("nse_bounds.toml", dir), log);
    const auto j = io::read_json(dir / "bounds.json");
    const auto rs = io::read_table(dir / "rescale.csv");
    double max_ratio = 0.0;
    for (const auto& row : rs.rows) max_ratio = std::max(max_ratio, io::parse_double(row[3], "max_ratio"));
    const bool ok = worst <= 1e-12 && rc == 0 && j["holds"].get<bool>() && j["rescale_holds"].get<bool>() &&
                    rs.rows.size() == 4;
    return {ok, fmt("max relative <B(u,u),u> %.2e; ", worst) + std::to_string(j["trajectories"].get<std::size_t>()) +
                    " trajectories with " + std::to_string(j["violations"].get<std::size_t>()) +
                    " energy-estimate violations; rescale residual " + fmt("%.3g", max_ratio) +
                    " x (rel_tol |u| + abs_tol) over nu in {0.25, 0.5, 1, 2}"};
}

// 9 -------------------------------------------------------------------------

Outcome time_holder() {
    auto cfg = app::load_config(source_config("nse_pullback.toml"));
    auto gal = std::make_shared<const nse::GalerkinSystem>(cfg.kmax);
    const nse::Forcing f(gal->modes(), cfg.nse_forcing);
    const auto proc = nse::galerkin_process(gal, f);
    const ParameterPoint lam = cfg.params;
    const double nu = lam.get("nu");
    const auto params = nse::make_params(nu, f);
    const auto D = sample_ball(std::vector<double>(gal->state_dim(), 0.0), std::sqrt(2.0) * nu * params.G, 8, 3);
    auto section = [&](double t) {
        return pullback_section(proc, lam, t, D, PullbackSchedule::geometric(t, 5.0 / nu, 5, cfg.pullback.tol),
                                cfg.pullback.tol / 4);
    };
    const auto a0 = section(0.0);
    std::vector<double> ratios;
    bool converged = a0.converged;
    for (const double dt : {0.04, 0.16, 0.64}) {
        const auto a = section(dt);
        converged = converged && a.converged;
        ratios.push_back(nse::section_time_holder(a0, a));
    }
    const double mx = *std::max_element(ratios.begin(), ratios.end());
    const double mn = *std::min_element(ratios.begin(), ratios.end());
    const bool finite = std::isfinite(mx) && mn > 0.0;
    // No divergence as the gap shrinks: the smallest-gap ratio stays within a factor 2 of the largest-gap one.
    const bool ok = converged && finite && ratios.front() <= 2.0 * ratios.back();
    return {ok, fmt("ratios %.4g, %.4g, %.4g at dt 0.04, 0.16, 0.64", ratios[0], ratios[1], ratios[2]) +
                    fmt("; max/min %.3g; G=%.3g", mx / mn, params.G)};
}

// 10 ------------------------------------------------------------------------

int run_cli(const fs::path& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && '" PULLBACK_CLI_PATH "' " + args + " >> log.txt 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[fs::relative(e.path(), root).string()] = s.str();
    }
    return out;
}

Outcome determinism() {
    const auto dir = scratch("determinism");
    const fs::path cfgs = fs::path(PULLBACK_SOURCE_DIR) / "configs";
    std::ofstream(dir / "bounds_small.toml") << R"(system = "lorenz_nonauto"
seed = 4
[params]
sigma = 10.0
b = 2.6666666666666665
[forcing]
terms = [{ amplitude = 28.0, frequency = 0.0, phase = 1.5707963267948966 }, { amplitude = 4.0, frequency = 1.0, phase = 0.0 }]
[bounds]
trials = 5
horizon = 10.0
)";
    std::ofstream(dir / "nse_small.toml") << R"(system = "nse_galerkin"
seed = 6
[params]
nu = 0.5
[nse]
kmax = 4
[[nse.forcing]]
kx = 1
ky = 1
re = 0.3
offset = 1.0
mod_amplitude = 0.5
mod_frequency = 1.0
[bounds]
trajectories = 2
horizon = 4.0
rescale_nus = [0.5, 2.0]
rescale_horizon = 2.0
)";
    const std::string lin = (cfgs / "linear_pullback.toml").string();
    const std::string uni = (cfgs / "linear_uniform.toml").string();
    const std::string pf = (cfgs / "pitchfork_sweep.toml").string();
    const std::string eq = (cfgs / "linear_equi.toml").string();
    const std::string np = (cfgs / "nse_pullback.toml").string();
    struct Job {
        std::string name;
        std::string args;  // %s is replaced by the output directory
    };
    const std::vector<Job> jobs{
        {"pullback", "pullback --config '" + lin + "' --out %s"},
        {"pullback_nse", "pullback --config '" + np + "' --out %s"},
        {"uniform", "uniform --config '" + uni + "' --out %s"},
        {"sweep", "sweep --config '" + pf + "' --out %s"},
        {"equi_sweep", "sweep --config '" + eq + "' --out %s"},
        {"verify_lorenz", "verify-bounds --config bounds_small.toml --out %s"},
        {"verify_nse", "verify-bounds --config nse_small.toml --out %s"},
        {"oracle", "oracle --out %s"},
    };
    std::size_t files = 0;
    std::vector<std::string> bad;
    auto check = [&](const std::string& name, const std::string& args_a, const std::string& args_b,
                     const fs::path& out_a, const fs::path& out_b) {
        const int ra = run_cli(dir, args_a);
        const int rb = run_cli(dir, args_b);
        const auto ta = tree_bytes(dir / out_a);
        const auto tb = tree_bytes(dir / out_b);
        files += ta.size();
        if (ra != 0 || rb != 0 || ta.empty() || ta != tb) bad.push_back(name);
    };
    auto sub = [](std::string s, const std::string& out) { return s.replace(s.find("%s"), 2, out); };
    for (const auto& j : jobs) check(j.name, sub(j.args, j.name + "_a"), sub(j.args, j.name + "_b"), j.name + "_a", j.name + "_b");
    // equi reads the sweep artifacts named in the config, so point it at the first sweep copy.
    std::ofstream(dir / "equi.toml") << [&] {
        std::ifstream in(eq);
        std::ostringstream s;
        s << in.rdbuf();
        auto text = s.str();
        const std::string key = "sections = \"out/linear_equi\"";
        text.replace(text.find(key), key.size(), "sections = \"equi_sweep_a\"");
        return text;
    }();
    check("equi", "equi --config equi.toml --out equi_a", "equi --config equi.toml --out equi_b", "equi_a", "equi_b");
    std::string detail = std::to_string(jobs.size() + 1) + " runs compared, " + std::to_string(files) + " artifacts";
    if (!bad.empty()) {
        detail += "; differing or failing:";
        for (const auto& b : bad) detail += " " + b;
    }
    return {bad.empty(), detail};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        Outcome (*run)();
    };
    const std::vector<Criterion> all{
        {1, "Hausdorff oracle equivalence", 10.0, hausdorff_oracle},
        {2, "process identity and cocycle laws", 30.0, process_laws},
        {3, "pullback section oracle", 5.0, pullback_oracle},
        {4, "uniform attractor oracle", 30.0, uniform_oracle},
        {5, "Lorenz bound suite", 300.0, lorenz_bounds},
        {6, "monotone refinement histories", 0.0, dini_monotone},
        {7, "invariance residual", 120.0, invariance},
        {8, "Galerkin energy and rescaling suite", 300.0, nse_suite},
        {9, "time-Hoelder ratios", 0.0, time_holder},
        {10, "CLI determinism", 0.0, determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += fmt("; over the %.0f s budget", c.budget_s);
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %d: %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
