#include "app/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "toml++/toml.hpp"

namespace pullback::app {

namespace {

std::string line_of(const toml::node& n) {
    const auto& src = n.source();
    if (!src.begin) return "";
    return " (line " + std::to_string(src.begin.line) + ")";
}

// Typed view of one TOML table that remembers which keys were read, so
// unknown keys can be rejected afterwards.
class Section {
public:
    Section(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

    bool present() const { return t_ != nullptr; }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const toml::node* node(const std::string& key) {
        seen_.insert(key);
        if (!t_) return nullptr;
        return t_->get(key);
    }

    std::optional<double> number(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        if (const auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return *v;
        throw ConfigError(field(key), "expected a number" + line_of(*n));
    }

    std::optional<std::int64_t> integer(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        if (!n->is_integer()) throw ConfigError(field(key), "expected an integer" + line_of(*n));
        return n->value<std::int64_t>();
    }

    std::optional<std::size_t> count(const std::string& key) {
        const auto v = integer(key);
        if (!v) return std::nullopt;
        if (*v < 0) throw ConfigError(field(key), "must be nonnegative" + line_of(*node(key)));
        return static_cast<std::size_t>(*v);
    }

    std::optional<bool> boolean(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        if (!n->is_boolean()) throw ConfigError(field(key), "expected true or false" + line_of(*n));
        return n->value<bool>();
    }

    std::optional<std::string> string(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        if (!n->is_string()) throw ConfigError(field(key), "expected a string" + line_of(*n));
        return n->value<std::string>();
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        const auto* arr = n->as_array();
        if (!arr) throw ConfigError(field(key), "expected an array of numbers" + line_of(*n));
        std::vector<double> out;
        for (const auto& e : *arr) {
            if (!(e.is_floating_point() || e.is_integer()))
                throw ConfigError(field(key), "expected an array of numbers" + line_of(e));
            out.push_back(*e.value<double>());
        }
        return out;
    }

    Section table(const std::string& key) {
        const auto* n = node(key);
        if (!n) return {nullptr, field(key)};
        if (!n->is_table()) throw ConfigError(field(key), "expected a table" + line_of(*n));
        return {n->as_table(), field(key)};
    }

    /// Array of tables ([[key]] or key = [{...}, ...]).
    std::vector<Section> tables(const std::string& key) {
        const auto* n = node(key);
        std::vector<Section> out;
        if (!n) return out;
        const auto* arr = n->as_array();
        if (!arr) throw ConfigError(field(key), "expected an array of tables" + line_of(*n));
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const auto* t = (*arr)[i].as_table();
            if (!t) throw ConfigError(field(key), "expected an array of tables" + line_of((*arr)[i]));
            out.emplace_back(t, field(key) + "[" + std::to_string(i) + "]");
        }
        return out;
    }

    /// Every key of this table, for free-form tables such as [params].
    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        if (t_)
            for (const auto& [k, v] : *t_) out.emplace_back(k.str());
        return out;
    }

    void finish() const {
        if (!t_) return;
        for (const auto& [k, v] : *t_)
            if (!seen_.count(std::string(k.str())))
                throw ConfigError(field(std::string(k.str())), "unknown key" + line_of(v));
    }

private:
    const toml::table* t_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class T>
void assign(T& dst, const std::optional<T>& v) {
    if (v) dst = *v;
}

std::vector<double> linspace(double a, double b, std::size_t n, bool endpoint) {
    std::vector<double> v;
    if (n == 0) return v;
    if (n == 1) return {a};
    const double den = static_cast<double>(endpoint ? n - 1 : n);
    for (std::size_t i = 0; i < n; ++i) v.push_back(a + (b - a) * static_cast<double>(i) / den);
    return v;
}

std::vector<lorenz::Sinusoid> read_terms(Section& forcing) {
    std::vector<lorenz::Sinusoid> out;
    for (auto& t : forcing.tables("terms")) {
        lorenz::Sinusoid s;
        assign(s.amplitude, t.number("amplitude"));
        assign(s.frequency, t.number("frequency"));
        assign(s.phase, t.number("phase"));
        t.finish();
        out.push_back(s);
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "line " << e.source().begin.line << ", column " << e.source().begin.column << ": "
            << e.description();
        throw ConfigError(origin, msg.str());
    }

    RunConfig cfg;
    cfg.source = origin;
    Section top(&root, "");
    const auto sys = top.string("system");
    if (!sys) throw ConfigError("system", "missing");
    cfg.system = *sys;
    if (std::find(known_systems().begin(), known_systems().end(), cfg.system) == known_systems().end())
        throw ConfigError("system", "unknown system '" + cfg.system + "'");
    if (const auto s = top.integer("seed")) {
        if (*s < 0) throw ConfigError("seed", "must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(*s);
    }
    if (const auto n = top.count("threads")) cfg.threads = static_cast<unsigned>(*n);
    if (const auto o = top.string("out")) cfg.out = *o;

    {
        auto p = top.table("params");
        for (const auto& k : p.keys()) {
            const auto v = p.number(k);
            cfg.params.set(k, *v);
        }
        p.finish();
    }
    {
        auto f = top.table("forcing");
        cfg.forcing_terms = read_terms(f);
        cfg.forcing_R0 = f.number("R0");
        assign(cfg.pitchfork_eps, f.number("eps"));
        f.finish();
    }
    {
        auto n = top.table("nse");
        if (const auto k = n.integer("kmax")) cfg.kmax = static_cast<int>(*k);
        for (auto& e : n.tables("forcing")) {
            nse::ForcingEntry fe;
            if (const auto v = e.integer("kx")) fe.kx = static_cast<int>(*v);
            if (const auto v = e.integer("ky")) fe.ky = static_cast<int>(*v);
            double re = 0.0, im = 0.0;
            assign(re, e.number("re"));
            assign(im, e.number("im"));
            fe.amplitude = {re, im};
            assign(fe.offset, e.number("offset"));
            assign(fe.mod_amplitude, e.number("mod_amplitude"));
            assign(fe.mod_frequency, e.number("mod_frequency"));
            assign(fe.mod_phase, e.number("mod_phase"));
            e.finish();
            cfg.nse_forcing.push_back(fe);
        }
        n.finish();
    }
    {
        auto i = top.table("integrator");
        assign(cfg.integrator.rel_tol, i.number("rel_tol"));
        assign(cfg.integrator.abs_tol, i.number("abs_tol"));
        assign(cfg.integrator.max_step, i.number("max_step"));
        assign(cfg.integrator.max_steps, i.count("max_steps"));
        i.finish();
    }
    {
        auto d = top.table("domain");
        cfg.domain.center = d.numbers("center");
        cfg.domain.radius = d.number("radius");
        cfg.domain.count = d.count("count");
        d.finish();
    }
    {
        auto p = top.table("pullback");
        assign(cfg.pullback.t, p.number("t"));
        cfg.pullback.T0 = p.number("T0");
        assign(cfg.pullback.levels, p.count("levels"));
        assign(cfg.pullback.tol, p.number("tol"));
        assign(cfg.pullback.consecutive, p.count("consecutive"));
        cfg.pullback.merge_radius = p.number("merge_radius");
        if (const auto s = p.numbers("s_list")) cfg.pullback.s_list = *s;
        p.finish();
    }
    {
        auto u = top.table("uniform");
        cfg.uniform.t_window = u.number("t_window");
        assign(cfg.uniform.tol, u.number("tol"));
        cfg.uniform.merge_radius = u.number("merge_radius");
        assign(cfg.uniform.max_doublings, u.count("max_doublings"));
        const auto grid = u.numbers("s_grid");
        const auto start = u.number("s_start");
        const auto stop = u.number("s_stop");
        const auto n = u.count("s_count");
        if (grid && (start || stop || n))
            throw ConfigError("uniform.s_grid", "give either s_grid or s_start/s_stop/s_count, not both");
        if (grid) cfg.uniform.s_grid = *grid;
        else if (start || stop || n) {
            if (!(start && stop && n)) throw ConfigError("uniform.s_count", "s_start, s_stop and s_count go together");
            // The stop time is excluded: a grid over one period [0, P) should not repeat its first phase.
            cfg.uniform.s_grid = linspace(*start, *stop, *n, false);
        }
        u.finish();
    }
    {
        auto s = top.table("sweep");
        assign(cfg.sweep.kind, s.string("kind"));
        assign(cfg.sweep.full_matrix, s.boolean("full_matrix"));
        for (auto& a : s.tables("axes")) {
            GridAxis ax;
            const auto name = a.string("name");
            if (!name) throw ConfigError(a.field("name"), "missing");
            ax.name = *name;
            const auto values = a.numbers("values");
            const auto start = a.number("start");
            const auto stop = a.number("stop");
            const auto n = a.count("count");
            if (values) ax.values = *values;
            else if (start && stop && n) ax.values = linspace(*start, *stop, *n, true);
            else throw ConfigError(a.field("values"), "give values or start/stop/count");
            a.finish();
            cfg.sweep.axes.push_back(std::move(ax));
        }
        s.finish();
    }
    {
        auto e = top.table("equi");
        assign(cfg.equi.kind, e.string("kind"));
        if (const auto d = e.string("sections")) cfg.equi.sections = *d;
        if (const auto v = e.numbers("s_values")) cfg.equi.s_values = *v;
        if (const auto v = e.numbers("t_values")) cfg.equi.t_values = *v;
        e.finish();
    }
    {
        auto b = top.table("bounds");
        assign(cfg.bounds.trials, b.count("trials"));
        assign(cfg.bounds.horizon, b.number("horizon"));
        assign(cfg.bounds.v0_max, b.number("v0_max"));
        if (const auto v = b.numbers("sigma_range")) cfg.bounds.sigma_range = *v;
        if (const auto v = b.numbers("b_range")) cfg.bounds.b_range = *v;
        cfg.bounds.stride = b.number("stride");
        assign(cfg.bounds.trajectories, b.count("trajectories"));
        if (const auto v = b.numbers("rescale_nus")) cfg.bounds.rescale_nus = *v;
        assign(cfg.bounds.rescale_horizon, b.number("rescale_horizon"));
        assign(cfg.bounds.u0_scale, b.number("u0_scale"));
        b.finish();
    }
    top.finish();
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("--config", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

void validate(const RunConfig& cfg) {
    cfg.integrator.validate();
    auto positive = [&](const char* name) {
        if (cfg.params.has(name) && !(cfg.params.get(name) > 0.0))
            throw ConfigError(std::string("params.") + name, "must be positive");
    };
    if (cfg.system == "lorenz_auto") {
        for (const char* k : {"sigma", "b", "r"}) {
            if (!cfg.params.has(k) && cfg.sweep.axes.empty()) throw ConfigError(std::string("params.") + k, "missing");
            positive(k);
        }
    } else if (cfg.system == "lorenz_nonauto") {
        positive("sigma");
        positive("b");
        if (cfg.forcing_terms.empty()) throw ConfigError("forcing.terms", "r(t) needs at least one term");
    } else if (cfg.system == "linear_benchmark") {
        positive("lambda");
    } else if (cfg.system == "nse_galerkin") {
        positive("nu");
        if (cfg.kmax < 1 || cfg.kmax > 16) throw ConfigError("nse.kmax", "must lie in [1, 16]");
    }
    if (cfg.pullback.levels == 0 && cfg.pullback.s_list.empty()) throw ConfigError("pullback.levels", "must be positive");
    if (!(cfg.pullback.tol > 0.0)) throw ConfigError("pullback.tol", "must be positive");
    if (cfg.pullback.T0 && !(*cfg.pullback.T0 > 0.0)) throw ConfigError("pullback.T0", "must be positive");
    if (cfg.pullback.consecutive == 0) throw ConfigError("pullback.consecutive", "must be positive");
    if (cfg.pullback.merge_radius && !(*cfg.pullback.merge_radius >= 0.0))
        throw ConfigError("pullback.merge_radius", "must be nonnegative");
    if (cfg.uniform.t_window && !(*cfg.uniform.t_window > 0.0)) throw ConfigError("uniform.t_window", "must be positive");
    if (!(cfg.uniform.tol > 0.0)) throw ConfigError("uniform.tol", "must be positive");
    if (cfg.uniform.merge_radius && !(*cfg.uniform.merge_radius >= 0.0))
        throw ConfigError("uniform.merge_radius", "must be nonnegative");
    if (cfg.domain.radius && !(*cfg.domain.radius >= 0.0)) throw ConfigError("domain.radius", "must be nonnegative");
    if (cfg.domain.count && *cfg.domain.count == 0) throw ConfigError("domain.count", "must be positive");
    if (cfg.sweep.kind != "pullback" && cfg.sweep.kind != "uniform")
        throw ConfigError("sweep.kind", "must be \"pullback\" or \"uniform\"");
    if (cfg.equi.kind != "pullback" && cfg.equi.kind != "uniform")
        throw ConfigError("equi.kind", "must be \"pullback\" or \"uniform\"");
    if (cfg.bounds.sigma_range.size() != 2 || !(cfg.bounds.sigma_range[0] > 0.0) ||
        !(cfg.bounds.sigma_range[1] >= cfg.bounds.sigma_range[0]))
        throw ConfigError("bounds.sigma_range", "expected [lo, hi] with 0 < lo <= hi");
    if (cfg.bounds.b_range.size() != 2 || !(cfg.bounds.b_range[0] > 0.0) ||
        !(cfg.bounds.b_range[1] >= cfg.bounds.b_range[0]))
        throw ConfigError("bounds.b_range", "expected [lo, hi] with 0 < lo <= hi");
    if (!(cfg.bounds.horizon > 0.0)) throw ConfigError("bounds.horizon", "must be positive");
    if (cfg.bounds.stride && !(*cfg.bounds.stride > 0.0)) throw ConfigError("bounds.stride", "must be positive");
    if (!(cfg.bounds.v0_max >= 0.0)) throw ConfigError("bounds.v0_max", "must be nonnegative");
    for (const double nu : cfg.bounds.rescale_nus)
        if (!(nu > 0.0)) throw ConfigError("bounds.rescale_nus", "viscosities must be positive");
    // Constructing the grid checks axis ordering.
    ParameterGrid grid(cfg.sweep.axes);
    (void)grid;
}

void apply(RunConfig& cfg, const Overrides& o) {
    if (o.out) cfg.out = *o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.tol) {
        if (!(*o.tol > 0.0)) throw ConfigError("--tol", "must be positive");
        cfg.pullback.tol = *o.tol;
        cfg.uniform.tol = *o.tol;
    }
    if (o.rel_tol) {
        cfg.integrator.rel_tol = *o.rel_tol;
        cfg.integrator.validate();
    }
    if (o.threads) cfg.threads = *o.threads;
}

}  // namespace pullback::app
