#include "fdlab/scenario.hpp"

#include "fdlab/demo.hpp"
#include "fdlab/elliptic.hpp"
#include "fdlab/error.hpp"
#include "fdlab/estimates.hpp"
#include "fdlab/geometry.hpp"
#include "fdlab/io.hpp"
#include "fdlab/parabolic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <variant>

namespace fdlab {

namespace {

using json = nlohmann::ordered_json;

/// Typed access to one JSON object with field paths in error messages.
class Reader {
public:
    Reader(const json& obj, std::string path, std::set<std::string> allowed)
        : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            throw ValidationError(path_, "must be an object");
        for (const auto& [key, value] : obj_.items())
            if (!allowed.contains(key))
                throw ValidationError(field(key), "unknown key");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return obj_.contains(key); }

    double number(const std::string& key, std::optional<double> fallback = {}) const
    {
        if (!has(key)) {
            if (fallback)
                return *fallback;
            throw ValidationError(field(key), "required");
        }
        const json& v = obj_.at(key);
        if (!v.is_number())
            throw ValidationError(field(key), "must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw ValidationError(field(key), "must be finite");
        return x;
    }

    double positive(const std::string& key, std::optional<double> fallback = {}) const
    {
        const double x = number(key, fallback);
        if (!(x > 0.0))
            throw ValidationError(field(key), "must be positive");
        return x;
    }

    double in_open_unit(const std::string& key, std::optional<double> fallback = {}) const
    {
        const double x = number(key, fallback);
        if (!(x > 0.0 && x < 1.0))
            throw ValidationError(field(key), "must be in (0,1), got " + json(x).dump());
        return x;
    }

    long integer(const std::string& key, std::optional<long> fallback, long min) const
    {
        long x = 0;
        if (!has(key)) {
            if (!fallback)
                throw ValidationError(field(key), "required");
            x = *fallback;
        } else {
            const json& v = obj_.at(key);
            if (!v.is_number_integer())
                throw ValidationError(field(key), "must be an integer");
            x = v.get<long>();
        }
        if (x < min)
            throw ValidationError(field(key), "must be >= " + std::to_string(min));
        return x;
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = {}) const
    {
        if (!has(key)) {
            if (fallback)
                return *fallback;
            throw ValidationError(field(key), "required");
        }
        const json& v = obj_.at(key);
        if (!v.is_array() || v.empty())
            throw ValidationError(field(key), "must be a nonempty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number())
                throw ValidationError(field(key) + "[" + std::to_string(i) + "]", "must be a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = {}) const
    {
        if (!has(key)) {
            if (fallback)
                return *fallback;
            throw ValidationError(field(key), "required");
        }
        const json& v = obj_.at(key);
        if (!v.is_string())
            throw ValidationError(field(key), "must be a string");
        return v.get<std::string>();
    }

    const json& raw(const std::string& key) const { return obj_.at(key); }

private:
    const json& obj_;
    std::string path_;
};

const json empty_object = json::object();

Reader child(const Reader& parent, const std::string& key, std::set<std::string> allowed)
{
    return Reader(parent.has(key) ? parent.raw(key) : empty_object, parent.field(key), std::move(allowed));
}

ProfileDescriptor parse_profile(const json& j, const std::string& path, const std::filesystem::path& base_dir)
{
    const Reader r(j, path, {"kind", "n", "a", "q", "table"});
    ProfileDescriptor d;
    const long n = r.integer("n", std::nullopt, 2);
    if (n > 1000)
        throw ValidationError(r.field("n"), "must be <= 1000");
    d.dim = static_cast<int>(n);
    const std::string kind = r.string("kind");
    auto forbid = [&](const char* key) {
        if (r.has(key))
            throw ValidationError(r.field(key), "not used by profile kind '" + kind + "'");
    };
    if (kind == "euclidean") {
        d.kind = ProfileKind::euclidean;
        forbid("a"), forbid("q"), forbid("table");
    } else if (kind == "hyperbolic") {
        d.kind = ProfileKind::hyperbolic;
        d.curvature_scale = r.positive("a", 1.0);
        forbid("q"), forbid("table");
    } else if (kind == "power_exponential") {
        d.kind = ProfileKind::power_exponential;
        d.exponent = r.number("q");
        if (!(d.exponent > 1.0))
            throw ValidationError(r.field("q"), "must be in (1, inf)");
        forbid("a"), forbid("table");
    } else if (kind == "table") {
        d.kind = ProfileKind::table;
        forbid("a"), forbid("q");
        if (!r.has("table"))
            throw ValidationError(r.field("table"), "required for kind 'table'");
        const json& t = r.raw("table");
        if (t.is_string()) {
            std::filesystem::path p = t.get<std::string>();
            if (p.is_relative())
                p = base_dir / p;
            std::ifstream in(p);
            if (!in)
                throw ValidationError(r.field("table"), "cannot open " + p.string());
            try {
                const CsvTable csv = parse_csv(read_file(p));
                if (csv.header.size() < 2 || csv.header.size() > 3)
                    throw ValidationError(r.field("table"), "CSV must have 2 or 3 columns (r, psi[, dpsi])");
                for (const auto& row : csv.rows) {
                    d.table_r.push_back(row[0]);
                    d.table_psi.push_back(row[1]);
                    if (row.size() == 3)
                        d.table_dpsi.push_back(row[2]);
                }
            } catch (const std::runtime_error& e) {
                throw ValidationError(r.field("table"), e.what());
            }
        } else {
            const Reader tr(t, r.field("table"), {"r", "psi", "dpsi"});
            d.table_r = tr.numbers("r");
            d.table_psi = tr.numbers("psi");
            if (tr.has("dpsi"))
                d.table_dpsi = tr.numbers("dpsi");
        }
    } else {
        throw ValidationError(r.field("kind"), "must be one of euclidean, hyperbolic, power_exponential, table");
    }
    return d;
}

Profile build_profile(const ProfileDescriptor& d, const std::string& path)
{
    try {
        return make_profile(d);
    } catch (const ValidationError& e) {
        // the profile module reports "profile.<key>"; re-root it at this path
        std::string field = e.field();
        if (field.rfind("profile", 0) == 0)
            field = path + field.substr(7);
        const std::string what = e.what();
        throw ValidationError(field, what.substr(what.find(": ") + 2));
    }
}

json profile_json(const ProfileDescriptor& d)
{
    json j{{"kind", to_string(d.kind)}, {"n", d.dim}};
    if (d.kind == ProfileKind::hyperbolic)
        j["a"] = d.curvature_scale;
    if (d.kind == ProfileKind::power_exponential)
        j["q"] = d.exponent;
    if (d.kind == ProfileKind::table) {
        j["table"] = {{"r", d.table_r}, {"psi", d.table_psi}};
        if (!d.table_dpsi.empty())
            j["table"]["dpsi"] = d.table_dpsi;
    }
    return j;
}

// ---- experiment parameters -------------------------------------------------

Datum parse_datum(const Reader& parent, const std::string& key)
{
    const Reader r = child(parent, key, {"kind", "value", "height", "radius", "amplitude", "width", "exponent"});
    if (!parent.has(key))
        throw ValidationError(parent.field(key), "required");
    const std::string kind = r.string("kind");
    if (kind == "constant") {
        const double c = r.number("value");
        if (c < 0.0)
            throw ValidationError(r.field("value"), "must be >= 0");
        return Datum::constant(c);
    }
    if (kind == "tent")
        return Datum::tent(r.positive("height", 1.0), r.positive("radius", 1.0));
    if (kind == "gaussian")
        return Datum::gaussian(r.positive("amplitude", 1.0), r.positive("width", 1.0));
    if (kind == "power")
        return Datum::power(r.positive("amplitude", 1.0), r.positive("exponent"));
    throw ValidationError(r.field("kind"), "must be one of constant, tent, gaussian, power");
}

FdeConfig parse_fde_config(const Reader& r, double default_t_end = 1.0)
{
    FdeConfig cfg;
    cfg.m = r.in_open_unit("m");
    cfg.dt = r.positive("dt", 1e-2);
    cfg.t_end = r.positive("t_end", default_t_end);
    cfg.mobility_floor = r.number("delta", 0.0);
    if (cfg.mobility_floor < 0.0)
        throw ValidationError(r.field("delta"), "must be >= 0");
    cfg.store_every = static_cast<int>(r.integer("store_every", 1, 1));
    cfg.newton.tol = r.positive("newton_tol", cfg.newton.tol);
    cfg.newton.max_iter = static_cast<int>(r.integer("newton_max", cfg.newton.max_iter, 1));
    if (cfg.dt > cfg.t_end)
        throw ValidationError(r.field("dt"), "must not exceed t_end");
    return cfg;
}

LiftSchedule parse_ladder(const Reader& parent, const std::string& key, double datum_sup)
{
    const Reader r = child(parent, key,
                           {"R0", "radii", "ell0", "lifts", "beta0", "truncations", "cell_size", "probe_radius",
                            "tolerance"});
    if (!parent.has(key))
        throw ValidationError(parent.field(key), "required");
    LiftSchedule s = LiftSchedule::geometric(r.positive("R0", 1.0), static_cast<int>(r.integer("radii", 3, 1)),
                                             r.positive("ell0", 0.1), static_cast<int>(r.integer("lifts", 3, 1)),
                                             r.positive("beta0", 1.0),
                                             static_cast<int>(r.integer("truncations", 3, 1)),
                                             r.positive("cell_size", 0.02), datum_sup);
    if (r.has("probe_radius"))
        s.probe_radius = r.positive("probe_radius");
    if (r.has("tolerance"))
        s.tolerance = r.positive("tolerance");
    try {
        s.validate();
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        throw ValidationError(parent.field(key) + e.field().substr(6), what.substr(what.find(": ") + 2));
    }
    return s;
}

struct ClassifyParams {
    double horizon, eps_fit, max_fit_rms;
    int samples;
};

struct BarrierParams {
    BarrierSpec spec;
    double grid_radius, rel_tol;
    std::size_t cells;
};

struct NonexistenceParams {
    double p, alpha, probe_radius;
    std::vector<double> R_list;
    NonexistenceOptions opt;
};

struct FdeParams {
    FdeConfig cfg;
    Datum datum;
    double R, boundary;
    std::size_t cells;
    std::string format;
    bool delta_given;
};

struct MinimalParams {
    FdeConfig cfg;
    Datum datum;
    LiftSchedule ladder;
};

struct HpParams {
    FdeConfig cfg;
    Datum datum;
    double R, solve_radius, ell, beta_low, beta_high, cell_size, rel_tol;
    std::vector<std::pair<double, double>> pairs;
};

struct ProbeParams {
    FdeConfig cfg;
    Datum datum;
    LiftSchedule ladder_a, ladder_b;
    double t0, probe_radius;
    std::optional<double> alpha;
};

struct DemoParams {
    ProfileDescriptor incomplete;
    double m, t_star;
    std::vector<double> R_list;
    DemoOptions opt;
};

using Params = std::variant<ClassifyParams, BarrierParams, NonexistenceParams, FdeParams, MinimalParams, HpParams,
                            ProbeParams, DemoParams>;

double datum_sup(const Datum& d) { return d.sup_hint; }

Params parse_parameters(const std::string& experiment, const json& j, const ProfileDescriptor& profile,
                        const std::filesystem::path& base_dir)
{
    const std::string path = "parameters";
    if (experiment == "classify") {
        const Reader r(j, path, {"horizon", "samples", "eps_fit", "max_fit_rms"});
        ClassifyParams p{r.number("horizon", 50.0), r.positive("eps_fit", 0.1), r.positive("max_fit_rms", 0.05),
                         static_cast<int>(r.integer("samples", 200, 20))};
        if (p.horizon < 10.0)
            throw ValidationError(r.field("horizon"), "must be >= 10");
        return p;
    }
    if (experiment == "barrier") {
        const Reader r(j, path, {"p", "alpha", "R", "C", "grid_radius", "cells", "rel_tol"});
        BarrierParams p;
        const double pp = r.number("p");
        if (!(pp > 1.0))
            throw ValidationError(r.field("p"), "must be in (1, inf)");
        p.spec = BarrierSpec::with_default_constant(pp, r.positive("alpha", 1.0), r.positive("R"));
        if (r.has("C")) {
            p.spec.C = r.positive("C");
            if (p.spec.C < default_barrier_constant(pp) * (1.0 - 1e-12))
                throw ValidationError(r.field("C"), "must be >= default_barrier_constant(p) = " +
                                                        json(default_barrier_constant(pp)).dump());
        }
        p.grid_radius = r.positive("grid_radius", 0.9 * p.spec.R);
        if (p.grid_radius >= p.spec.R)
            throw ValidationError(r.field("grid_radius"), "must be < R");
        p.cells = static_cast<std::size_t>(r.integer("cells", 1000, 8));
        p.rel_tol = r.positive("rel_tol", 1e-2);
        return p;
    }
    if (experiment == "elliptic-nonexistence") {
        const Reader r(j, path, {"p", "alpha", "R_list", "probe_radius", "boundary_factor", "cells", "grading"});
        NonexistenceParams p;
        p.p = r.number("p");
        if (!(p.p > 1.0))
            throw ValidationError(r.field("p"), "must be in (1, inf)");
        p.alpha = r.positive("alpha", 1.0);
        p.R_list = r.numbers("R_list");
        p.probe_radius = r.positive("probe_radius", 1.0);
        for (std::size_t k = 0; k < p.R_list.size(); ++k)
            if (!(p.R_list[k] > p.probe_radius) || (k > 0 && !(p.R_list[k] > p.R_list[k - 1])))
                throw ValidationError(r.field("R_list"), "must be increasing and exceed probe_radius");
        p.opt.boundary_factor = r.positive("boundary_factor", p.opt.boundary_factor);
        p.opt.cells = static_cast<std::size_t>(r.integer("cells", static_cast<long>(p.opt.cells), 8));
        p.opt.grading = r.positive("grading", p.opt.grading);
        if (p.opt.grading < 1.0 || p.opt.grading > RadialGrid::max_grading)
            throw ValidationError(r.field("grading"), "must be in [1, 1000]");
        return p;
    }
    if (experiment == "fde") {
        const Reader r(j, path, {"m", "dt", "t_end", "delta", "store_every", "newton_tol", "newton_max", "datum", "R",
                                 "cells", "boundary", "format"});
        FdeParams p{parse_fde_config(r), parse_datum(r, "datum"), r.positive("R"), r.number("boundary"),
                    static_cast<std::size_t>(r.integer("cells", 200, 8)), r.string("format", "csv"), r.has("delta")};
        if (p.format != "csv" && p.format != "binary" && p.format != "both")
            throw ValidationError(r.field("format"), "must be one of csv, binary, both");
        if (p.delta_given && p.cfg.mobility_floor == 0.0 && !(p.boundary > 0.0))
            throw ValidationError(r.field("boundary"), "must be > 0 when delta is 0");
        return p;
    }
    if (experiment == "minimal") {
        const Reader r(j, path, {"m", "dt", "t_end", "delta", "store_every", "newton_tol", "newton_max", "datum",
                                 "ladder"});
        MinimalParams p{parse_fde_config(r), parse_datum(r, "datum"), {}};
        p.ladder = parse_ladder(r, "ladder", datum_sup(p.datum));
        return p;
    }
    if (experiment == "hp-check") {
        const Reader r(j, path, {"m", "dt", "t_end", "delta", "store_every", "newton_tol", "newton_max", "datum", "R",
                                 "solve_radius", "ell", "beta_low", "beta_high", "cell_size", "pairs", "rel_tol"});
        HpParams p{parse_fde_config(r), parse_datum(r, "datum"), 0, 0, 0, 0, 0, 0, 0, {}};
        p.R = r.positive("R");
        p.solve_radius = r.positive("solve_radius", 2.0 * p.R);
        if (p.solve_radius < 2.0 * p.R)
            throw ValidationError(r.field("solve_radius"), "must be >= 2R");
        p.ell = r.positive("ell", 0.1);
        p.beta_low = r.positive("beta_low", 0.5);
        p.beta_high = r.positive("beta_high", 1.0);
        if (!(p.beta_high > p.beta_low))
            throw ValidationError(r.field("beta_high"), "must exceed beta_low");
        p.cell_size = r.positive("cell_size", 0.02);
        p.rel_tol = r.positive("rel_tol", 0.02);
        if (!r.has("pairs"))
            throw ValidationError(r.field("pairs"), "required");
        const json& pairs = r.raw("pairs");
        if (!pairs.is_array() || pairs.empty())
            throw ValidationError(r.field("pairs"), "must be a nonempty array of [t, s]");
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const std::string f = r.field("pairs") + "[" + std::to_string(k) + "]";
            if (!pairs[k].is_array() || pairs[k].size() != 2 || !pairs[k][0].is_number() || !pairs[k][1].is_number())
                throw ValidationError(f, "must be [t, s]");
            const double t = pairs[k][0].get<double>(), s = pairs[k][1].get<double>();
            if (t < 0.0 || s < 0.0 || t > p.cfg.t_end || s > p.cfg.t_end)
                throw ValidationError(f, "times must lie in [0, t_end]");
            p.pairs.emplace_back(t, s);
        }
        return p;
    }
    if (experiment == "uniqueness-probe") {
        const Reader r(j, path, {"m", "dt", "t_end", "delta", "store_every", "newton_tol", "newton_max", "datum",
                                 "ladder_a", "ladder_b", "t0", "probe_radius", "alpha"});
        ProbeParams p{parse_fde_config(r), parse_datum(r, "datum"), {}, {}, 0, 0, {}};
        if (p.cfg.m < 0.05)
            throw ValidationError(r.field("m"), "uniqueness probe needs m >= 0.05");
        p.ladder_a = parse_ladder(r, "ladder_a", datum_sup(p.datum));
        p.ladder_b = parse_ladder(r, "ladder_b", datum_sup(p.datum));
        if (p.ladder_a.cell_size != p.ladder_b.cell_size)
            throw ValidationError(r.field("ladder_b.cell_size"), "must equal ladder_a.cell_size");
        p.t0 = r.positive("t0", p.cfg.t_end);
        if (p.t0 > p.cfg.t_end)
            throw ValidationError(r.field("t0"), "must be <= t_end");
        p.probe_radius = r.positive("probe_radius", 0.5);
        const double inner = std::min(p.ladder_a.radii.front(), p.ladder_b.radii.front());
        if (p.probe_radius >= inner)
            throw ValidationError(r.field("probe_radius"), "must be below the smallest ladder radius");
        if (r.has("alpha"))
            p.alpha = r.positive("alpha");
        return p;
    }
    if (experiment == "demo-nonuniqueness") {
        const Reader r(j, path, {"m", "t_star", "R_list", "incomplete_profile", "cell_size", "dt", "delta"});
        DemoParams p;
        p.m = r.in_open_unit("m");
        p.t_star = r.positive("t_star", 1.0);
        p.R_list = r.numbers("R_list");
        for (std::size_t k = 0; k < p.R_list.size(); ++k)
            if (!(p.R_list[k] > 0.0) || (k > 0 && !(p.R_list[k] > p.R_list[k - 1])))
                throw ValidationError(r.field("R_list"), "must be positive and strictly increasing");
        if (r.has("incomplete_profile")) {
            p.incomplete = parse_profile(r.raw("incomplete_profile"), r.field("incomplete_profile"), base_dir);
        } else {
            p.incomplete.kind = ProfileKind::power_exponential;
            p.incomplete.exponent = 3.0;
            p.incomplete.dim = profile.dim;
        }
        p.opt.cell_size = r.positive("cell_size", p.opt.cell_size);
        p.opt.dt = r.positive("dt", p.opt.dt);
        p.opt.delta = r.positive("delta", p.opt.delta);
        return p;
    }
    throw ValidationError("experiment", "unknown experiment '" + experiment + "'");
}

// ---- experiment runners ----------------------------------------------------

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Runner {
public:
    Runner(const Scenario& s, const Profile& prof, ArtifactWriter& out, const RunOptions& opt)
        : s_(s), prof_(prof), out_(out), opt_(opt)
    {
    }

    void operator()(const ClassifyParams& p)
    {
        log("classify horizon=" + std::to_string(p.horizon));
        const CompletenessReport rep = classify_completeness(prof_, p.horizon, p.samples, p.eps_fit, p.max_fit_rms);
        json j{{"verdict", to_string(rep.verdict)}, {"sigma", rep.sigma},       {"c", rep.c},
               {"fit_rms", rep.fit_rms},            {"eps_fit", rep.eps_fit},   {"horizon", rep.horizon},
               {"H_horizon", num_or_null(rep.H_horizon)}};
        out_.write("completeness.json", j.dump(2) + "\n");
        CsvTable t{{"r", "H", "dH"}, {}};
        for (std::size_t i = 0; i < rep.r.size(); ++i)
            t.rows.push_back({rep.r[i], rep.H[i], rep.dH[i]});
        out_.write_csv("completeness.csv", t);
    }

    void operator()(const BarrierParams& p)
    {
        const GridPtr grid = share(RadialGrid::uniform(p.grid_radius, p.cells));
        log("barrier on " + std::to_string(p.cells) + " cells");
        const RadialField W = barrier_field(prof_, p.spec, grid);
        double scale = 0.0;
        for (std::size_t i = 0; i < W.size(); ++i)
            scale = std::max(scale, p.spec.alpha * std::pow(W[i], p.spec.p));
        const SupersolutionReport rep = verify_supersolution(prof_, W, p.spec, p.rel_tol * scale);
        json j{{"p", p.spec.p},
               {"alpha", p.spec.alpha},
               {"R", p.spec.R},
               {"C", p.spec.C},
               {"barrier_at_origin", W[0]},
               {"max_violation", rep.max_violation},
               {"node_of_max", rep.node_of_max},
               {"tolerance_used", rep.tolerance_used},
               {"pass", rep.pass}};
        out_.write("barrier.json", j.dump(2) + "\n");
        RadialField res(grid, rep.residual);
        out_.write_csv("barrier.csv", profile_table({"W", "residual"}, {W, res}));
    }

    void operator()(const NonexistenceParams& p)
    {
        log("nonexistence sweep over " + std::to_string(p.R_list.size()) + " radii");
        const auto rows = nonexistence_experiment(prof_, p.p, p.alpha, p.R_list, p.probe_radius, p.opt);
        CsvTable t{{"R", "sup_barrier", "sup_solution", "newton_iters", "residual"}, {}};
        json errors = json::array();
        for (const auto& row : rows) {
            t.rows.push_back({row.R, row.sup_barrier, row.sup_solution, static_cast<double>(row.newton_iters),
                              row.residual});
            if (row.error)
                errors.push_back({{"R", row.R}, {"error", *row.error}});
        }
        out_.write_csv("decay.csv", t);
        json j{{"p", p.p}, {"alpha", p.alpha}, {"probe_radius", p.probe_radius}, {"errors", errors}};
        out_.write("decay.json", j.dump(2) + "\n");
    }

    void operator()(const FdeParams& p)
    {
        const GridPtr grid = share(RadialGrid::uniform(p.R, p.cells));
        RadialField u0 = sample_datum(prof_, p.datum, grid);
        u0[u0.size() - 1] = p.boundary;
        FdeConfig cfg = p.cfg;
        // zero or signed states need the regularized power unless the user chose delta
        if (!p.delta_given && (u0.min() <= 0.0 || p.boundary <= 0.0)) {
            const double scale = std::max({std::abs(u0.max()), std::abs(u0.min()), std::abs(p.boundary), 1e-300});
            cfg.mobility_floor = 1e-8 * scale;
            log("delta defaulted to " + std::to_string(cfg.mobility_floor));
        }
        log("fde with " + std::to_string(p.cells) + " cells, dt=" + std::to_string(cfg.dt));
        const SpaceTimeField u = solve_fde(prof_, cfg, grid, u0, p.boundary);
        if (p.format != "binary")
            out_.write_csv("trajectory.csv", trajectory_table(u));
        if (p.format != "csv")
            out_.write("trajectory.bin", encode_trajectory(u));
        json j{{"m", cfg.m}, {"delta", cfg.mobility_floor}, {"steps", u.steps()}, {"t_end", u.times.back()},
               {"u_origin_final", u.states.back()[0]}, {"min", u.states.back().min()}, {"max", u.states.back().max()}};
        out_.write("fde.json", j.dump(2) + "\n");
    }

    void operator()(const MinimalParams& p)
    {
        log("minimal solution ladder");
        const MinimalSolutionResult res = minimal_solution(prof_, p.cfg, p.datum, p.ladder);
        write_ladder("ladder.csv", res);
        out_.write_csv("trajectory.csv", trajectory_table(res.field));
        json j{{"converged", res.converged},
               {"final_radius", res.final_radius},
               {"final_lift", res.final_lift},
               {"final_truncation", res.final_truncation},
               {"max_ordering_violation", res.max_ordering_violation},
               {"solves", res.ladder_log.size()},
               {"u_origin_final", res.field.states.back()[0]}};
        out_.write("minimal.json", j.dump(2) + "\n");
    }

    void operator()(const HpParams& p)
    {
        const auto cells = static_cast<std::size_t>(std::llround(p.solve_radius / p.cell_size));
        const GridPtr grid = share(RadialGrid::uniform(p.solve_radius, std::max<std::size_t>(cells, 8)));
        const RadialField u0 = sample_datum(prof_, p.datum, grid);
        log("hp-check: two lifted solves on [0, " + std::to_string(p.solve_radius) + "]");
        const SpaceTimeField lo = solve_lifted(prof_, p.cfg, {p.ell, p.beta_low, u0});
        const SpaceTimeField hi = solve_lifted(prof_, p.cfg, {p.ell, p.beta_high, u0});

        CsvTable t{{"R", "t", "s", "lhs", "rhs", "h_r", "slack", "pass"}, {}};
        json checks = json::array();
        bool all = true;
        auto add = [&](const char* kind, double tt, double ss, const HpReport& rep) {
            t.rows.push_back({p.R, tt, ss, rep.lhs, rep.rhs, rep.H_R, rep.slack, rep.pass ? 1.0 : 0.0});
            checks.push_back({{"kind", kind}, {"t", tt}, {"s", ss}, {"lhs", rep.lhs}, {"rhs", rep.rhs},
                              {"h_r", rep.H_R}, {"slack", rep.slack}, {"pass", rep.pass}});
            all = all && rep.pass;
        };
        for (const auto& [tt, ss] : p.pairs) {
            add("ordered", tt, ss, check_hp_ordered(hi, lo, prof_, p.cfg.m, p.R, tt, ss, p.rel_tol));
            add("strong", tt, ss, check_hp_strong(hi, lo, prof_, p.cfg.m, p.R, tt, ss, p.rel_tol));
            add("datum", tt, 0.0, check_hp_against_datum(hi, hi.states.front(), prof_, p.cfg.m, p.R, tt, p.rel_tol));
        }
        out_.write_csv("hp.csv", t);
        json j{{"R", p.R}, {"m", p.cfg.m}, {"pass", all}, {"checks", checks}};
        out_.write("hp.json", j.dump(2) + "\n");
    }

    void operator()(const ProbeParams& p)
    {
        log("uniqueness probe: ladder a");
        const MinimalSolutionResult a = minimal_solution(prof_, p.cfg, p.datum, p.ladder_a);
        log("uniqueness probe: ladder b");
        const MinimalSolutionResult b = minimal_solution(prof_, p.cfg, p.datum, p.ladder_b);
        const GridPtr big = a.final_radius >= b.final_radius ? a.field.grid : b.field.grid;
        const SpaceTimeField ua = extend_by_zero(a.field, big);
        const SpaceTimeField ub = extend_by_zero(b.field, big);
        const ProbeReport rep = uniqueness_probe(ua, ub, prof_, p.cfg.m, p.t0, p.probe_radius, p.alpha);
        json j{{"sup_w", rep.sup_w},
               {"min_defect", rep.min_defect},
               {"alpha", rep.alpha},
               {"t0", rep.t0},
               {"probe_radius", rep.probe_radius},
               {"barrier_bound", num_or_null(rep.barrier_bound)},
               {"within_barrier", rep.within_barrier},
               {"exact_uniqueness", rep.exact_uniqueness},
               {"converged_a", a.converged},
               {"converged_b", b.converged}};
        out_.write("probe.json", j.dump(2) + "\n");
        out_.write_csv("contraction.csv", profile_table({"W"}, {rep.W}));
        write_ladder("ladder_a.csv", a);
        write_ladder("ladder_b.csv", b);
    }

    void operator()(const DemoParams& p)
    {
        const Profile incomplete = build_profile(p.incomplete, "parameters.incomplete_profile");
        log("demo over " + std::to_string(p.R_list.size()) + " radii");
        const DemoResult res = demo_nonuniqueness(prof_, incomplete, p.m, p.R_list, p.t_star, p.opt);
        CsvTable t{{"R", "u_complete", "u_incomplete"}, {}};
        json rows = json::array();
        for (const auto& row : res.rows) {
            t.rows.push_back({row.R, row.u_complete, row.u_incomplete});
            json r{{"R", row.R}, {"u_complete", num_or_null(row.u_complete)},
                   {"u_incomplete", num_or_null(row.u_incomplete)}};
            if (row.error_complete)
                r["error_complete"] = *row.error_complete;
            if (row.error_incomplete)
                r["error_incomplete"] = *row.error_incomplete;
            rows.push_back(std::move(r));
        }
        out_.write_csv("demo.csv", t);
        json j{{"m", p.m},
               {"t_star", p.t_star},
               {"complete_profile", prof_.describe()},
               {"incomplete_profile", incomplete.describe()},
               {"rows", rows},
               {"contrast", num_or_null(res.contrast)},
               {"complete_nonincreasing", res.complete_nonincreasing}};
        out_.write("demo.json", j.dump(2) + "\n");
    }

private:
    void log(const std::string& line) const
    {
        if (opt_.verbose && opt_.log)
            *opt_.log << "[" << s_.name << "] " << line << "\n";
    }

    void write_ladder(const std::string& name, const MinimalSolutionResult& res)
    {
        // sweep: 0 = beta, 1 = ell, 2 = R
        CsvTable t{{"sweep", "k", "j", "i", "increment", "ordering_violation"}, {}};
        for (const auto& e : res.ladder_log)
            t.rows.push_back({static_cast<double>(e.sweep), static_cast<double>(e.k), static_cast<double>(e.j),
                              static_cast<double>(e.i), e.increment, e.ordering_violation});
        out_.write_csv(name, t);
    }

    const Scenario& s_;
    const Profile& prof_;
    ArtifactWriter& out_;
    const RunOptions& opt_;
};

}  // namespace

const std::vector<std::string>& known_experiments()
{
    static const std::vector<std::string> names{"classify",   "barrier",  "elliptic-nonexistence",
                                                "fde",        "minimal",  "hp-check",
                                                "uniqueness-probe", "demo-nonuniqueness"};
    return names;
}

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError("(root)", std::string("not valid JSON: ") + e.what());
    }
    const Reader r(j, "", {"name", "experiment", "profile", "parameters", "output_dir", "$schema"});
    Scenario s;
    s.name = r.string("name");
    if (s.name.empty())
        throw ValidationError("name", "must be nonempty");
    s.experiment = r.string("experiment");
    const auto& known = known_experiments();
    if (std::find(known.begin(), known.end(), s.experiment) == known.end())
        throw ValidationError("experiment", "unknown experiment '" + s.experiment + "'");
    if (!r.has("profile"))
        throw ValidationError("profile", "required");
    s.profile = parse_profile(r.raw("profile"), "profile", base_dir);
    build_profile(s.profile, "profile");
    const json params = r.has("parameters") ? r.raw("parameters") : json::object();
    if (!params.is_object())
        throw ValidationError("parameters", "must be an object");
    s.parameters_json = params.dump();
    s.base_dir = base_dir;
    parse_parameters(s.experiment, params, s.profile, base_dir);
    s.output_dir = r.string("output_dir");
    if (s.output_dir.empty())
        throw ValidationError("output_dir", "must be nonempty");
    if (s.output_dir.is_relative() && !base_dir.empty())
        s.output_dir = base_dir / s.output_dir;

    json canon{{"name", s.name},
               {"experiment", s.experiment},
               {"profile", profile_json(s.profile)},
               {"parameters", params}};
    s.canonical_json = canon.dump();
    return s;
}

std::filesystem::path run_scenario(const Scenario& s, const RunOptions& opt)
{
    const Profile prof = build_profile(s.profile, "profile");
    const Params params = parse_parameters(s.experiment, json::parse(s.parameters_json), s.profile, s.base_dir);
    const std::filesystem::path dir = opt.output_dir ? *opt.output_dir : s.output_dir;
    ArtifactWriter out(dir);
    std::visit(Runner(s, prof, out, opt), params);
    out.finish(s.canonical_json);
    return dir;
}

int run_scenario_file(const std::filesystem::path& config, const std::optional<std::string>& expected_experiment,
                      const RunOptions& opt, std::ostream& err)
{
    try {
        std::string text;
        try {
            text = read_file(config);
        } catch (const std::runtime_error& e) {
            err << "error: " << e.what() << "\n";
            return exit_code::io_error;
        }
        const Scenario s = parse_scenario(text, config.parent_path());
        if (expected_experiment && s.experiment != *expected_experiment)
            throw ValidationError("experiment", "this subcommand runs '" + *expected_experiment + "', config says '" +
                                                    s.experiment + "'");
        const auto dir = run_scenario(s, opt);
        if (opt.verbose && opt.log)
            *opt.log << "wrote " << (dir / "manifest.json").string() << "\n";
        return exit_code::ok;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const NumericalFailure& e) {
        json payload{{"error", "numerical_failure"},
                     {"message", e.what()},
                     {"context", e.context()},
                     {"step", e.step()},
                     {"residual_history", e.residual_history()},
                     {"line_search_exhausted", e.line_search_exhausted()}};
        err << payload.dump() << "\n";
        return exit_code::numerical;
    } catch (const QuadratureError& e) {
        json payload{{"error", "quadrature_failure"},
                     {"message", e.what()},
                     {"achieved_error", e.achieved_error()},
                     {"requested", e.requested()}};
        err << payload.dump() << "\n";
        return exit_code::numerical;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::io_error;
    } catch (const std::exception& e) {
        json payload{{"error", "failure"}, {"message", e.what()}};
        err << payload.dump() << "\n";
        return exit_code::numerical;
    }
}

}  // namespace fdlab
