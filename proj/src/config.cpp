#include "bohm/errors.hpp"
#include "bohm/experiment.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

namespace bohm {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kMaxEnt = std::numbers::sqrt2 / 2.0;

const std::vector<std::pair<ExperimentKind, const char*>> kNames = {
    {ExperimentKind::born_evolution, "born_evolution"},
    {ExperimentKind::born_self_distance, "born_self_distance"},
    {ExperimentKind::cross_c2_finalpattern, "cross_c2_finalpattern"},
    {ExperimentKind::single_chaotic_ergodicity, "single_chaotic_ergodicity"},
    {ExperimentKind::b_curve, "b_curve"},
    {ExperimentKind::proportion_law, "proportion_law"},
    {ExperimentKind::nonborn_mixture, "nonborn_mixture"},
    {ExperimentKind::collision_snapshots, "collision_snapshots"},
    {ExperimentKind::node_geometry, "node_geometry"},
};

json range(double start, double step, double stop)
{
    json a = json::array();
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) a.push_back(start + static_cast<double>(i) * step);
    return a;
}

// Remainder of t / dt in units of dt, folded to [0, 0.5].
double off_grid(double t, double dt)
{
    const double q = t / dt;
    return std::abs(q - std::round(q));
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const char* ensemble_kind_name(EnsembleKind k)
{
    switch (k) {
    case EnsembleKind::born: return "born";
    case EnsembleKind::two_blob_mixture: return "two_blob_mixture";
    case EnsembleKind::custom_blob: return "custom_blob";
    }
    return "born";
}

// Walks a merged config document, filling an ExperimentConfig and
// collecting diagnostics instead of throwing.
class Reader {
public:
    explicit Reader(std::vector<Diagnostic>& d) : diag_(d) {}

    void error(const std::string& path, const std::string& msg)
    {
        diag_.push_back({Diagnostic::Level::error, path, msg});
    }
    void warn(const std::string& path, const std::string& msg)
    {
        diag_.push_back({Diagnostic::Level::warning, path, msg});
    }

    void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys)
    {
        if (!obj.is_object()) {
            error(path, "expected an object");
            return;
        }
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& [k, v] : obj.items())
            if (!ok.count(k)) error(join(path, k), "unknown key");
    }

    template <class T>
    bool get(const json& obj, const char* key, const std::string& path, T& dst)
    {
        if (!obj.is_object() || !obj.contains(key)) return false;
        try {
            dst = obj.at(key).get<T>();
            return true;
        } catch (const json::exception&) {
            error(join(path, key), "wrong type");
            return false;
        }
    }

    template <class T>
    void require(const json& obj, const char* key, const std::string& path, T& dst)
    {
        if (!obj.is_object() || !obj.contains(key)) {
            error(join(path, key), "missing");
            return;
        }
        get(obj, key, path, dst);
    }

    static std::string join(const std::string& path, const std::string& key)
    {
        return path.empty() ? key : path + "." + key;
    }

private:
    std::vector<Diagnostic>& diag_;
};

std::vector<double> read_times(Reader& r, const json& v, const std::string& path)
{
    std::vector<double> out;
    if (v.is_object()) {
        r.allow(v, path, {"start", "step", "stop"});
        double start = 0, step = 0, stop = 0;
        r.require(v, "start", path, start);
        r.require(v, "step", path, step);
        r.require(v, "stop", path, stop);
        if (!(step > 0)) {
            r.error(path + ".step", "must be > 0");
            return out;
        }
        for (const auto& t : range(start, step, stop)) out.push_back(t.get<double>());
        return out;
    }
    try {
        out = v.get<std::vector<double>>();
    } catch (const json::exception&) {
        r.error(path, "expected a list of times or {start, step, stop}");
    }
    return out;
}

void check_times(Reader& r, const std::vector<double>& times, const std::string& path, double dt,
                 double t_final, bool hard)
{
    for (std::size_t i = 0; i < times.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!(times[i] >= 0.0)) r.error(p, "times must be >= 0");
        if (i > 0 && !(times[i] > times[i - 1])) r.error(p, "times must be strictly ascending");
        if (times[i] > t_final * (1 + 1e-12)) r.error(p, "beyond integrator.t_final " + num(t_final));
        if (off_grid(times[i], dt) > 1e-6) {
            const double lo = std::floor(times[i] / dt) * dt;
            const std::string msg = num(times[i]) + " is not a multiple of sample_dt " + num(dt) +
                                    "; use " + num(lo) + " or " + num(lo + dt);
            if (hard) r.error(p, msg);
            else r.warn(p, msg);
        }
    }
}

WaveParams read_params(Reader& r, const json& doc)
{
    WaveParams w;
    const json& p = doc.contains("params") ? doc["params"] : json::object();
    r.allow(p, "params", {"c1", "c2", "omega_x", "omega_y", "a0"});
    r.require(p, "c2", "params", w.c2);
    const bool has_c1 = r.get(p, "c1", "params", w.c1);
    r.get(p, "omega_x", "params", w.omega_x);
    r.get(p, "omega_y", "params", w.omega_y);
    r.get(p, "a0", "params", w.a0);
    if (!(std::abs(w.c2) <= 1.0)) {
        r.error("params.c2", "|c2| must be <= 1");
        return w;
    }
    if (has_c1) {
        const double s = w.c1 * w.c1 + w.c2 * w.c2;
        if (std::abs(s - 1.0) > 1e-12) r.error("params", "c1^2 + c2^2 = " + num(s) + ", must equal 1");
    } else {
        w.c1 = std::sqrt(1.0 - w.c2 * w.c2);
    }
    if (!(w.omega_x > 0) || !(w.omega_y > 0)) r.error("params", "frequencies must be > 0");
    if (!(w.a0 > 0)) r.error("params.a0", "must be > 0");
    return w;
}

void fill(Reader& r, const json& doc, ExperimentConfig& cfg)
{
    r.allow(doc, "",
            {"experiment", "preset", "output_dir", "seed", "workers", "params", "ensemble", "integrator",
             "checkpoints", "grid", "normalization", "c2_values", "reference_c2", "mixtures", "starts",
             "snapshots", "check_cells", "escape", "lcn", "nodes", "render"});
    r.require(doc, "output_dir", "", cfg.output_dir);
    if (cfg.output_dir.empty() && doc.contains("output_dir")) r.error("output_dir", "must not be empty");
    r.get(doc, "seed", "", cfg.seed);
    int workers = 0;
    if (r.get(doc, "workers", "", workers)) {
        if (workers < 0) r.error("workers", "must be >= 0");
        cfg.workers = static_cast<unsigned>(std::max(workers, 0));
    }
    cfg.params = read_params(r, doc);

    if (doc.contains("ensemble")) {
        const json& e = doc["ensemble"];
        r.allow(e, "ensemble", {"kind", "n_particles", "p1", "p2", "custom"});
        std::string kind = "born";
        r.get(e, "kind", "ensemble", kind);
        if (kind == "born") cfg.ensemble.kind = EnsembleKind::born;
        else if (kind == "two_blob_mixture") cfg.ensemble.kind = EnsembleKind::two_blob_mixture;
        else if (kind == "custom_blob") cfg.ensemble.kind = EnsembleKind::custom_blob;
        else r.error("ensemble.kind", "unknown ensemble kind '" + kind + "'");
        r.get(e, "n_particles", "ensemble", cfg.ensemble.n_particles);
        r.get(e, "p1", "ensemble", cfg.ensemble.p1);
        r.get(e, "p2", "ensemble", cfg.ensemble.p2);
        if (e.is_object() && e.contains("custom")) {
            if (!e["custom"].is_array()) r.error("ensemble.custom", "expected a list");
            else
                for (std::size_t i = 0; i < e["custom"].size(); ++i) {
                    const std::string p = "ensemble.custom[" + std::to_string(i) + "]";
                    CustomBlob b;
                    r.allow(e["custom"][i], p, {"x", "y", "weight"});
                    r.require(e["custom"][i], "x", p, b.x);
                    r.require(e["custom"][i], "y", p, b.y);
                    r.get(e["custom"][i], "weight", p, b.weight);
                    cfg.ensemble.custom.push_back(b);
                }
        }
    }
    cfg.ensemble.seed = cfg.seed;
    try {
        cfg.ensemble.validate();
    } catch (const Error& ex) {
        r.error("ensemble", ex.what());
    }

    if (doc.contains("integrator")) {
        const json& g = doc["integrator"];
        auto& c = cfg.integrator;
        r.allow(g, "integrator",
                {"dt_init", "dt_min", "dt_max", "rel_tol", "abs_tol", "sample_dt", "t_final", "node_guard",
                 "window_half_side"});
        r.get(g, "dt_init", "integrator", c.dt_init);
        r.get(g, "dt_min", "integrator", c.dt_min);
        r.get(g, "dt_max", "integrator", c.dt_max);
        r.get(g, "rel_tol", "integrator", c.rel_tol);
        r.get(g, "abs_tol", "integrator", c.abs_tol);
        r.get(g, "sample_dt", "integrator", c.sample_dt);
        r.get(g, "t_final", "integrator", c.t_final);
        r.get(g, "node_guard", "integrator", c.node_guard);
        r.get(g, "window_half_side", "integrator", c.window_half_side);
    }
    bool integrator_ok = true;
    try {
        cfg.integrator.validate();
    } catch (const Error& ex) {
        r.error("integrator", ex.what());
        integrator_ok = false;
    }
    const double dt = cfg.integrator.sample_dt;
    if (integrator_ok && off_grid(cfg.integrator.t_final, dt) > 1e-6)
        r.warn("integrator.t_final", num(cfg.integrator.t_final) + " is not a multiple of sample_dt " + num(dt));

    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        r.allow(g, "grid", {"lo", "hi", "cells"});
        r.get(g, "lo", "grid", cfg.grid.lo);
        r.get(g, "hi", "grid", cfg.grid.hi);
        r.get(g, "cells", "grid", cfg.grid.cells);
    }
    try {
        cfg.grid.validate();
    } catch (const Error& ex) {
        r.error("grid", ex.what());
    }
    const double reach = std::max(std::abs(cfg.grid.lo), std::abs(cfg.grid.hi));
    if (cfg.integrator.window_half_side > 0 && cfg.integrator.window_half_side < reach)
        r.warn("integrator.window_half_side", "smaller than the pattern window; trajectories stop inside it");

    std::string norm = "unit_frobenius";
    if (r.get(doc, "normalization", "", norm)) {
        try {
            cfg.normalization = parse_normalization(norm);
        } catch (const Error& ex) {
            r.error("normalization", ex.what());
        }
    }

    if (doc.contains("checkpoints")) cfg.checkpoints = read_times(r, doc["checkpoints"], "checkpoints");
    if (doc.contains("snapshots")) cfg.snapshots = read_times(r, doc["snapshots"], "snapshots");
    if (integrator_ok) {
        check_times(r, cfg.checkpoints, "checkpoints", dt, cfg.integrator.t_final, false);
        check_times(r, cfg.snapshots, "snapshots", dt, cfg.integrator.t_final, true);
        if (!cfg.checkpoints.empty() && cfg.checkpoints.back() < cfg.integrator.t_final * (1 - 1e-12))
            r.warn("checkpoints", "last checkpoint " + num(cfg.checkpoints.back()) +
                                      " is before t_final; later samples are not counted");
    }

    if (doc.contains("c2_values")) {
        r.get(doc, "c2_values", "", cfg.c2_values);
        for (std::size_t i = 0; i < cfg.c2_values.size(); ++i)
            if (!(std::abs(cfg.c2_values[i]) <= 1.0))
                r.error("c2_values[" + std::to_string(i) + "]", "|c2| must be <= 1");
    }
    r.get(doc, "reference_c2", "", cfg.reference_c2);
    if (doc.contains("mixtures")) {
        std::vector<std::vector<double>> m;
        if (r.get(doc, "mixtures", "", m))
            for (std::size_t i = 0; i < m.size(); ++i) {
                const std::string p = "mixtures[" + std::to_string(i) + "]";
                if (m[i].size() != 2) {
                    r.error(p, "expected [p1, p2]");
                    continue;
                }
                if (m[i][0] < 0 || m[i][1] < 0 || std::abs(m[i][0] + m[i][1] - 1.0) > 1e-9)
                    r.error(p, "p1, p2 must be >= 0 and sum to 1");
                cfg.mixtures.push_back({m[i][0], m[i][1]});
            }
    }
    if (doc.contains("starts")) {
        std::vector<std::vector<double>> s;
        if (r.get(doc, "starts", "", s))
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i].size() != 2) r.error("starts[" + std::to_string(i) + "]", "expected [x, y]");
                else cfg.starts.push_back({s[i][0], s[i][1], 0.0});
            }
    }
    r.get(doc, "check_cells", "", cfg.check_cells);
    if (cfg.check_cells < 1) r.error("check_cells", "must be >= 1");

    if (doc.contains("escape")) {
        const json& e = doc["escape"];
        r.allow(e, "escape", {"margin", "horizon"});
        r.get(e, "margin", "escape", cfg.escape.margin);
        r.get(e, "horizon", "escape", cfg.escape.horizon);
    }
    if (!(cfg.escape.margin >= 0)) r.error("escape.margin", "must be >= 0");
    if (cfg.escape.horizon < cfg.escape.min_horizon)
        r.error("escape.horizon", "must be >= " + num(cfg.escape.min_horizon));
    if (doc.contains("lcn")) {
        const json& l = doc["lcn"];
        r.allow(l, "lcn", {"horizon", "chi_threshold", "ordered_growth", "chi_dt", "sample"});
        r.get(l, "horizon", "lcn", cfg.lcn.horizon);
        r.get(l, "chi_threshold", "lcn", cfg.lcn.chi_threshold);
        r.get(l, "ordered_growth", "lcn", cfg.lcn.ordered_growth);
        r.get(l, "chi_dt", "lcn", cfg.lcn.chi_dt);
        r.get(l, "sample", "lcn", cfg.lcn_sample);
    }
    if (cfg.lcn.horizon < cfg.lcn.min_horizon) r.error("lcn.horizon", "must be >= " + num(cfg.lcn.min_horizon));
    if (!(cfg.lcn.chi_dt > 0)) r.error("lcn.chi_dt", "must be > 0");
    if (cfg.lcn_sample < 0) r.error("lcn.sample", "must be >= 0");

    if (doc.contains("nodes")) {
        const json& n = doc["nodes"];
        r.allow(n, "nodes", {"t_end", "dt", "k_lo", "k_hi"});
        r.get(n, "t_end", "nodes", cfg.node_t_end);
        r.get(n, "dt", "nodes", cfg.node_dt);
        r.get(n, "k_lo", "nodes", cfg.node_k.lo);
        r.get(n, "k_hi", "nodes", cfg.node_k.hi);
    }
    if (!(cfg.node_dt > 0) || !(cfg.node_t_end > 0)) r.error("nodes", "t_end and dt must be > 0");
    if (cfg.node_k.lo > cfg.node_k.hi) r.error("nodes", "k_lo must be <= k_hi");
    r.get(doc, "render", "", cfg.render);

    // what each experiment needs
    using K = ExperimentKind;
    const K k = cfg.experiment;
    const bool ensemble_run = k == K::born_evolution || k == K::born_self_distance ||
                              k == K::cross_c2_finalpattern || k == K::nonborn_mixture ||
                              k == K::collision_snapshots || k == K::single_chaotic_ergodicity;
    if (ensemble_run && cfg.checkpoints.empty()) r.error("checkpoints", "required by " + std::string(to_string(k)));
    if (k == K::single_chaotic_ergodicity && cfg.starts.empty()) r.error("starts", "at least one start required");
    if (k == K::single_chaotic_ergodicity && cfg.starts.size() == 1)
        r.warn("starts", "a single start gives no pairwise distances");
    const bool sweep = k == K::born_self_distance || k == K::cross_c2_finalpattern || k == K::b_curve ||
                       k == K::proportion_law;
    if (sweep && cfg.c2_values.empty()) r.error("c2_values", "required by " + std::string(to_string(k)));
    if ((k == K::born_evolution || k == K::collision_snapshots) && cfg.snapshots.empty())
        r.warn("snapshots", "no snapshot times; only the final pattern is written");
    if (k == K::proportion_law || k == K::b_curve || k == K::born_self_distance || k == K::cross_c2_finalpattern)
        if (cfg.ensemble.kind != EnsembleKind::born) r.error("ensemble.kind", "this experiment needs born");
}

}  // namespace

const char* to_string(ExperimentKind k) noexcept
{
    for (const auto& [kind, name] : kNames)
        if (kind == k) return name;
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment(const std::string& name)
{
    for (const auto& [kind, n] : kNames)
        if (name == n) return kind;
    return std::nullopt;
}

const std::vector<ExperimentKind>& all_experiments()
{
    static const std::vector<ExperimentKind> all = [] {
        std::vector<ExperimentKind> v;
        for (const auto& [kind, name] : kNames) v.push_back(kind);
        return v;
    }();
    return all;
}

bool has_errors(const std::vector<Diagnostic>& d)
{
    for (const auto& x : d)
        if (x.level == Diagnostic::Level::error) return true;
    return false;
}

void print_diagnostics(std::ostream& out, const std::vector<Diagnostic>& d)
{
    for (const auto& x : d)
        out << (x.level == Diagnostic::Level::error ? "error" : "warning") << ": "
            << (x.path.empty() ? "<config>" : x.path) << ": " << x.message << '\n';
}

ConfigError::ConfigError(std::vector<Diagnostic> d)
    : std::runtime_error("invalid experiment config"), diagnostics_(std::move(d))
{
}

json preset_defaults(ExperimentKind kind, Preset preset)
{
    const bool paper = preset == Preset::paper;
    const double tf = paper ? 5000.0 : 500.0;
    json d = {{"seed", 1}, {"workers", 0}, {"normalization", "unit_frobenius"}, {"render", true}};
    d["integrator"] = {{"t_final", tf}};
    d["ensemble"] = {{"kind", "born"}, {"n_particles", 2400}};
    using K = ExperimentKind;
    switch (kind) {
    case K::born_evolution:
        d["params"] = {{"c2", 0.5}};
        d["integrator"]["t_final"] = paper ? 5000.0 : 50.0;
        d["checkpoints"] = json::array({d["integrator"]["t_final"]});
        d["snapshots"] = {0.0, 1.05, 4.6, 6.0, 50.0};
        d["check_cells"] = 60;
        break;
    case K::born_self_distance:
        d["params"] = {{"c2", 0.2}};
        d["c2_values"] = {0.2, 0.5};
        d["checkpoints"] = range(0.0, 100.0, tf);
        break;
    case K::cross_c2_finalpattern:
        d["params"] = {{"c2", kMaxEnt}};
        d["c2_values"] = {0.0, 0.2, 0.5};
        d["reference_c2"] = kMaxEnt;
        d["checkpoints"] = range(100.0, 100.0, tf);
        break;
    case K::single_chaotic_ergodicity: {
        d["params"] = {{"c2", 0.2}};
        const auto sec = blob_centers(WaveParams::from_c2(0.2), 0.0).second;
        d["starts"] = {{-2.52027, 2.17529}, {sec.x, sec.y}};
        d["integrator"]["t_final"] = paper ? 2e6 : 1e5;
        d["checkpoints"] = paper ? json{1e3, 1e4, 1e5, 1e6, 2e6} : json{1e3, 1e4, 1e5};
        break;
    }
    case K::b_curve:
        d["params"] = {{"c2", 0.2}};
        d["c2_values"] = range(0.0, 0.05, 0.7);
        d["c2_values"].push_back(kMaxEnt);
        d["ensemble"]["n_particles"] = paper ? 2400 : 500;
        d["escape"] = {{"margin", EscapeOptions{}.margin}, {"horizon", EscapeOptions{}.horizon}};
        break;
    case K::proportion_law:
        d["params"] = {{"c2", 0.2}};
        d["c2_values"] = {0.2, 0.5};
        d["ensemble"]["n_particles"] = paper ? 2400 : 500;
        d["escape"] = {{"margin", EscapeOptions{}.margin}, {"horizon", EscapeOptions{}.horizon}};
        d["lcn"] = {{"horizon", 1e4}, {"sample", paper ? 500 : 100}};
        break;
    case K::nonborn_mixture:
        d["params"] = {{"c2", 0.2}};
        d["mixtures"] = {{0.96, 0.04}, {0.5, 0.5}, {1.0 / 3.0, 2.0 / 3.0}, {0.21, 0.79}, {0.08, 0.92}};
        d["ensemble"]["kind"] = "two_blob_mixture";
        d["checkpoints"] = range(100.0, 100.0, tf);
        break;
    case K::collision_snapshots:
        d["params"] = {{"c2", 0.2}};
        d["integrator"]["t_final"] = 6.0;
        d["checkpoints"] = {6.0};
        d["snapshots"] = {0.0, 1.05, 4.6, 6.0};
        break;
    case K::node_geometry:
        d["params"] = {{"c2", 0.5}};
        d["nodes"] = {{"t_end", 10.0}, {"dt", 0.01}, {"k_lo", -3}, {"k_hi", 3}};
        break;
    }
    return d;
}

namespace {

bool is_manifest_doc(const json& doc)
{
    return doc.is_object() && doc.contains("config") && doc["config"].is_object();
}

std::vector<Diagnostic> build(const json& input, ExperimentConfig& cfg)
{
    std::vector<Diagnostic> diag;
    Reader r(diag);
    if (!input.is_object()) {
        r.error("", "config must be a JSON object");
        return diag;
    }
    const json& doc = is_manifest_doc(input) ? input["config"] : input;
    std::string name;
    r.require(doc, "experiment", "", name);
    const auto kind = parse_experiment(name);
    if (!kind) {
        if (!name.empty()) r.error("experiment", "unknown experiment '" + name + "'");
        return diag;
    }
    cfg.experiment = *kind;
    std::string preset = "desk";
    r.get(doc, "preset", "", preset);
    if (preset == "paper") cfg.preset = Preset::paper;
    else if (preset != "desk") r.error("preset", "expected desk or paper");

    json merged = preset_defaults(cfg.experiment, cfg.preset);
    merged.merge_patch(doc);
    fill(r, merged, cfg);
    return diag;
}

}  // namespace

bool is_manifest(const json& doc)
{
    return is_manifest_doc(doc);
}

std::vector<Diagnostic> validate_config(const json& doc)
{
    ExperimentConfig cfg;
    return build(doc, cfg);
}

ExperimentConfig parse_config(const json& doc)
{
    ExperimentConfig cfg;
    auto diag = build(doc, cfg);
    if (has_errors(diag)) throw ConfigError(std::move(diag));
    return cfg;
}

ojson config_to_json(const ExperimentConfig& cfg)
{
    ojson j;
    j["experiment"] = to_string(cfg.experiment);
    j["preset"] = cfg.preset == Preset::paper ? "paper" : "desk";
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["params"] = {{"c1", cfg.params.c1},
                   {"c2", cfg.params.c2},
                   {"omega_x", cfg.params.omega_x},
                   {"omega_y", cfg.params.omega_y},
                   {"a0", cfg.params.a0}};
    ojson e = {{"kind", ensemble_kind_name(cfg.ensemble.kind)},
               {"n_particles", cfg.ensemble.n_particles},
               {"p1", cfg.ensemble.p1},
               {"p2", cfg.ensemble.p2}};
    if (!cfg.ensemble.custom.empty()) {
        e["custom"] = ojson::array();
        for (const auto& b : cfg.ensemble.custom) e["custom"].push_back({{"x", b.x}, {"y", b.y}, {"weight", b.weight}});
    }
    j["ensemble"] = e;
    const auto& c = cfg.integrator;
    j["integrator"] = {{"dt_init", c.dt_init},       {"dt_min", c.dt_min},       {"dt_max", c.dt_max},
                       {"rel_tol", c.rel_tol},       {"abs_tol", c.abs_tol},     {"sample_dt", c.sample_dt},
                       {"t_final", c.t_final},       {"node_guard", c.node_guard},
                       {"window_half_side", c.window_half_side}};
    j["checkpoints"] = cfg.checkpoints;
    j["grid"] = {{"lo", cfg.grid.lo}, {"hi", cfg.grid.hi}, {"cells", cfg.grid.cells}};
    j["normalization"] = to_string(cfg.normalization);
    j["c2_values"] = cfg.c2_values;
    j["reference_c2"] = cfg.reference_c2;
    j["mixtures"] = ojson::array();
    for (const auto& m : cfg.mixtures) j["mixtures"].push_back({m.p1, m.p2});
    j["starts"] = ojson::array();
    for (const auto& s : cfg.starts) j["starts"].push_back({s.x, s.y});
    j["snapshots"] = cfg.snapshots;
    j["check_cells"] = cfg.check_cells;
    j["escape"] = {{"margin", cfg.escape.margin}, {"horizon", cfg.escape.horizon}};
    j["lcn"] = {{"horizon", cfg.lcn.horizon},
                {"chi_threshold", cfg.lcn.chi_threshold},
                {"ordered_growth", cfg.lcn.ordered_growth},
                {"chi_dt", cfg.lcn.chi_dt},
                {"sample", cfg.lcn_sample}};
    j["nodes"] = {{"t_end", cfg.node_t_end}, {"dt", cfg.node_dt}, {"k_lo", cfg.node_k.lo}, {"k_hi", cfg.node_k.hi}};
    j["render"] = cfg.render;
    return j;
}

}  // namespace bohm
