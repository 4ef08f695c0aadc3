#include "bohm/experiment.hpp"

#include "bohm/errors.hpp"
#include "bohm/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace bohm {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string tag(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared state of one run: output directory, artifact list, bookkeeping.
class Run {
public:
    Run(const ExperimentConfig& cfg, std::ostream* log, RunOutcome& out)
        : cfg(cfg), workers(resolve_workers(static_cast<int>(cfg.workers))), log_(log), out_(out),
          dir_(cfg.output_dir), t0_(Clock::now())
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
    }

    const ExperimentConfig& cfg;
    const unsigned workers;
    ojson aborted = ojson::object();
    std::vector<std::uint64_t> seeds;

    // Opens an artifact and writes its '#' header line.
    std::ofstream open(const std::string& name, const std::string& about)
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw IoError("cannot write " + (dir_ / name).string());
        f << "# " << to_string(cfg.experiment) << ": " << about << '\n';
        out_.artifacts.push_back(name);
        return f;
    }

    void pattern(const std::string& stem, const PatternGrid& g)
    {
        save_pattern((dir_ / (stem + ".pattern.csv")).string(), g);
        out_.artifacts.push_back(stem + ".pattern.csv");
        if (!cfg.render) return;
        render_ppm(g, (dir_ / (stem + ".ppm")).string());
        out_.artifacts.push_back(stem + ".ppm");
        out_.artifacts.push_back(stem + ".ppm.txt");
    }

    void note(const std::string& msg)
    {
        if (log_) *log_ << "[" << to_string(cfg.experiment) << " " << num(std::round(seconds_since(t0_) * 10) / 10)
                        << "s] " << msg << std::endl;
    }

    ParticleSet sample(const WaveParams& w, EnsembleSpec spec, std::uint64_t seed)
    {
        spec.seed = seed;
        seeds.push_back(seed);
        return sample_ensemble(w, spec);
    }

    EnsembleRunResult evolve(const WaveParams& w, const ParticleSet& set, const std::string& label,
                             std::vector<double> snapshot_times = {})
    {
        EnsembleRunOptions opt;
        opt.integrator = cfg.integrator;
        opt.checkpoints = cfg.checkpoints;
        opt.geometry = cfg.grid;
        opt.workers = workers;
        opt.snapshot_times = std::move(snapshot_times);
        const auto t = Clock::now();
        auto r = run_ensemble(w, set, opt);
        record_aborted(label, r.aborted, r.left_window);
        note(label + ": " + std::to_string(set.size()) + " trajectories to t=" + num(cfg.integrator.t_final) +
             " in " + num(std::round(seconds_since(t) * 10) / 10) + "s, aborted " + std::to_string(r.aborted));
        return r;
    }

    void record_aborted(const std::string& label, std::int64_t aborted_n, std::int64_t left = 0)
    {
        aborted[label] = {{"aborted", aborted_n}, {"left_window", left}};
        out_.aborted += aborted_n;
    }

private:
    std::ostream* log_;
    RunOutcome& out_;
    fs::path dir_;
    Clock::time_point t0_;
};

void write_curve(std::ofstream& f, const std::vector<CurvePoint>& curve)
{
    f << "t,D\n";
    for (const auto& p : curve) f << num(p.t) << ',' << num(p.d) << '\n';
}

ojson curve_json(const std::vector<CurvePoint>& curve)
{
    ojson t = ojson::array(), d = ojson::array();
    for (const auto& p : curve) {
        t.push_back(p.t);
        d.push_back(p.d);
    }
    return {{"t", t}, {"D", d}};
}

void write_positions(std::ofstream& f, const std::vector<PhasePoint>& pts, const ParticleSet& set)
{
    f << "index,x,y,blob_tag\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (std::isnan(pts[i].x)) continue;
        f << i << ',' << num(pts[i].x) << ',' << num(pts[i].y) << ',' << set.tags[i] << '\n';
    }
}

PatternGrid histogram(const std::vector<PhasePoint>& pts, const GridGeometry& g)
{
    PatternGrid h(g);
    for (const auto& p : pts)
        if (!std::isnan(p.x)) h.add(p);
    return h;
}

WaveParams with_c2(const WaveParams& base, double c2)
{
    WaveParams w = base;
    w.c2 = c2;
    w.c1 = std::sqrt(1.0 - c2 * c2);
    return w;
}

ParticleSet main_blob(const ParticleSet& set)
{
    ParticleSet m;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set.tags[i] == tag_lower_right) {
            m.points.push_back(set.points[i]);
            m.tags.push_back(set.tags[i]);
        }
    return m;
}

// ---------------------------------------------------------------------------

ojson born_evolution(Run& run)
{
    const auto& cfg = run.cfg;
    const auto set = run.sample(cfg.params, cfg.ensemble, cfg.seed);
    {
        auto f = run.open("initial_particles.csv", "initial positions");
        write_positions(f, set.points, set);
    }
    const auto r = run.evolve(cfg.params, set, "ensemble", cfg.snapshots);
    run.pattern("pattern_final", r.pattern.final_pattern());

    const GridGeometry check{cfg.grid.lo, cfg.grid.hi, cfg.check_cells};
    EnsembleSpec born;
    born.kind = EnsembleKind::born;
    born.n_particles = static_cast<std::int64_t>(set.size());
    const auto base_a = run.sample(cfg.params, born, cfg.seed + 1);
    const auto base_b = run.sample(cfg.params, born, cfg.seed + 2);
    const double baseline = frobenius_distance(histogram(base_a.points, check), histogram(base_b.points, check),
                                               cfg.normalization)
                                .value;

    ojson rows = ojson::array();
    auto table = run.open("born_check.csv", "binned positions against |Psi(t)|^2 (" + std::to_string(cfg.check_cells) +
                                                "^2 cells, " + to_string(cfg.normalization) + ")");
    table << "t,in_window,chi2,dof,p_value,D_analytic,D_baseline\n";
    for (std::size_t k = 0; k < cfg.snapshots.size(); ++k) {
        const double t = cfg.snapshots[k];
        const auto& pts = r.snapshots[k];
        {
            auto f = run.open("snapshot_t" + tag(t) + ".csv", "positions at t=" + num(t));
            write_positions(f, pts, set);
        }
        const auto h = histogram(pts, check);
        auto probs = density_matrix(cfg.params, t, check);
        const double d = frobenius_distance(as_matrix(h), probs, cfg.normalization);
        ojson row = {{"t", t}, {"in_window", h.total()}, {"D_analytic", d}};
        table << num(t) << ',' << h.total() << ',';
        try {
            const auto chi = chi_square(h, probs);
            table << num(chi.statistic) << ',' << chi.dof << ',' << num(chi.p_value);
            row["chi2"] = chi.statistic;
            row["dof"] = chi.dof;
            row["p_value"] = chi.p_value;
        } catch (const InvalidArgument&) {
            // too few particles for a pooled test
            table << ",,";
        }
        table << ',' << num(d) << ',' << num(baseline) << '\n';
        rows.push_back(row);
        if (cfg.render) run.pattern("snapshot_t" + tag(t), histogram(pts, cfg.grid));
    }
    return {{"baseline_D", baseline}, {"snapshots", rows}};
}

ojson born_self_distance(Run& run)
{
    const auto& cfg = run.cfg;
    ojson curves = ojson::array();
    for (std::size_t i = 0; i < cfg.c2_values.size(); ++i) {
        const double c2 = cfg.c2_values[i];
        const auto w = with_c2(cfg.params, c2);
        const auto set = run.sample(w, cfg.ensemble, cfg.seed + i);
        const auto r = run.evolve(w, set, "c2=" + tag(c2));
        const auto curve = self_distance_curve(r.pattern, cfg.normalization);
        auto f = run.open("self_distance_c2_" + tag(c2) + ".csv",
                          "distance between successive cumulative Born patterns, c2=" + num(c2) + ", " +
                              to_string(cfg.normalization));
        write_curve(f, curve);
        run.pattern("pattern_c2_" + tag(c2), r.pattern.final_pattern());
        auto j = curve_json(curve);
        j["c2"] = c2;
        curves.push_back(j);
    }
    return {{"curves", curves}};
}

ojson cross_c2_finalpattern(Run& run)
{
    const auto& cfg = run.cfg;
    const auto w_ref = with_c2(cfg.params, cfg.reference_c2);
    const auto ref_set = run.sample(w_ref, cfg.ensemble, cfg.seed);
    const auto ref = run.evolve(w_ref, ref_set, "reference");
    const auto ref_final = ref.pattern.final_pattern();
    run.pattern("pattern_reference", ref_final);

    auto table = run.open("cross_c2.csv", "final Born pattern distance to the c2=" + num(cfg.reference_c2) +
                                               " Born pattern, " + to_string(cfg.normalization));
    table << "c2,D_F\n";
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < cfg.c2_values.size(); ++i) {
        const double c2 = cfg.c2_values[i];
        const auto w = with_c2(cfg.params, c2);
        const auto set = run.sample(w, cfg.ensemble, cfg.seed + 1 + i);
        const auto r = run.evolve(w, set, "c2=" + tag(c2));
        const auto curve = reference_curve(r.pattern, ref_final, cfg.normalization);
        {
            auto f = run.open("cross_c2_curve_c2_" + tag(c2) + ".csv",
                              "cumulative Born pattern at c2=" + num(c2) + " against the final reference pattern");
            write_curve(f, curve);
        }
        run.pattern("pattern_c2_" + tag(c2), r.pattern.final_pattern());
        const double df = curve.back().d;
        table << num(c2) << ',' << num(df) << '\n';
        rows.push_back({{"c2", c2}, {"D_F", df}});
    }
    return {{"reference_c2", cfg.reference_c2}, {"rows", rows}};
}

ojson single_chaotic_ergodicity(Run& run)
{
    const auto& cfg = run.cfg;
    const std::size_t n = cfg.starts.size();
    std::vector<SingleRunResult> runs;
    runs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        runs.push_back({CheckpointedPattern(cfg.checkpoints, cfg.grid, cfg.integrator.sample_dt), {}});
    const auto t = Clock::now();
    parallel_for(n, run.workers, [&](std::size_t i, unsigned) {
        runs[i] = run_single(cfg.params, cfg.starts[i], cfg.integrator, cfg.checkpoints, cfg.grid);
    });
    run.note(std::to_string(n) + " trajectories to t=" + num(cfg.integrator.t_final) + " in " +
             num(std::round(seconds_since(t) * 10) / 10) + "s");

    ojson status = ojson::array();
    std::int64_t aborted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        run.pattern("pattern_start" + std::to_string(i), runs[i].pattern.final_pattern());
        const auto& s = runs[i].summary;
        if (s.status == TrajectoryStatus::aborted_near_node) ++aborted;
        status.push_back({{"x0", cfg.starts[i].x},
                          {"y0", cfg.starts[i].y},
                          {"status", to_string(s.status)},
                          {"t_last", s.last.t},
                          {"samples", s.sample_count}});
    }
    run.record_aborted("trajectories", aborted);

    ojson pairs = ojson::array();
    for (std::size_t i = 1; i < n; ++i) {
        const auto curve = distance_curve(runs[0].pattern, runs[i].pattern, cfg.normalization);
        auto f = run.open("ergodicity_0_" + std::to_string(i) + ".csv",
                          "pattern distance between chaotic trajectories 0 and " + std::to_string(i) + ", " +
                              to_string(cfg.normalization));
        write_curve(f, curve);
        auto j = curve_json(curve);
        j["a"] = 0;
        j["b"] = i;
        pairs.push_back(j);
    }
    return {{"trajectories", status}, {"pairs", pairs}};
}

ojson b_curve_experiment(Run& run)
{
    const auto& cfg = run.cfg;
    BCurveOptions opt;
    opt.n_particles = cfg.ensemble.n_particles;
    opt.seed = cfg.seed;
    opt.escape = cfg.escape;
    opt.workers = run.workers;
    run.seeds.push_back(cfg.seed);
    const auto t = Clock::now();
    const auto curve = b_curve(cfg.c2_values, cfg.integrator, opt);
    run.note(std::to_string(cfg.c2_values.size()) + " c2 values labelled in " +
             num(std::round(seconds_since(t) * 10) / 10) + "s");
    auto f = run.open("b_curve.csv", "fraction of chaotic lower-right Born particles, escape margin " +
                                         num(cfg.escape.margin) + ", horizon " + num(cfg.escape.horizon));
    f << "c2,b,main_total,main_chaotic,aborted\n";
    ojson rows = ojson::array();
    std::int64_t aborted = 0;
    for (const auto& p : curve) {
        f << num(p.c2) << ',' << num(p.b) << ',' << p.main_total << ',' << p.main_chaotic << ',' << p.aborted << '\n';
        rows.push_back({{"c2", p.c2}, {"b", p.b}, {"main_total", p.main_total}, {"main_chaotic", p.main_chaotic}});
        aborted += p.aborted;
    }
    run.record_aborted("labelling", aborted);
    return {{"rows", rows}};
}

ojson proportion_law(Run& run)
{
    const auto& cfg = run.cfg;
    auto table = run.open("proportion.csv", "chaotic and ordered proportions from escape labels");
    table << "c2,p1,p2,b,P_chaotic,P_ordered,ratio,identity_residual,undetermined,lcn_checked,lcn_agreement,lcn_b\n";
    ojson rows = ojson::array();
    std::int64_t aborted = 0;
    for (std::size_t i = 0; i < cfg.c2_values.size(); ++i) {
        const double c2 = cfg.c2_values[i];
        const auto w = with_c2(cfg.params, c2);
        const auto set = run.sample(w, cfg.ensemble, cfg.seed + i);
        const auto main = main_blob(set);
        auto t = Clock::now();
        const auto labels = label_escape(w, main, cfg.integrator, cfg.escape, run.workers);
        run.note("c2=" + tag(c2) + ": " + std::to_string(main.size()) + " escape labels in " +
                 num(std::round(seconds_since(t) * 10) / 10) + "s");
        for (const auto& l : labels) aborted += l.aborted;
        {
            auto f = run.open("labels_c2_" + tag(c2) + ".csv", "escape labels of lower-right particles, c2=" + num(c2));
            write_labels_csv(f, main, labels);
        }
        std::int64_t chaotic = 0, decided = 0;
        for (const auto& l : labels) {
            if (l.kind == ChaosKind::undetermined) continue;
            ++decided;
            chaotic += l.kind == ChaosKind::chaotic;
        }
        const double n = static_cast<double>(set.size());
        const double p1 = static_cast<double>(set.count(tag_upper_left)) / n;
        const double b = decided ? static_cast<double>(chaotic) / static_cast<double>(decided) : 0.0;
        const auto rep = proportion_report(p1, 1.0 - p1, b);

        // LCN cross-check on the first lcn_sample main-blob particles
        const auto m = std::min<std::int64_t>(cfg.lcn_sample, static_cast<std::int64_t>(main.size()));
        ParticleSet sub;
        sub.points.assign(main.points.begin(), main.points.begin() + m);
        sub.tags.assign(main.tags.begin(), main.tags.begin() + m);
        double agreement = 0.0, lcn_b = 0.0;
        if (m > 0) {
            t = Clock::now();
            const auto lcn = label_lcn(w, sub, cfg.integrator, cfg.lcn, run.workers);
            run.note("c2=" + tag(c2) + ": " + std::to_string(m) + " LCN labels in " +
                     num(std::round(seconds_since(t) * 10) / 10) + "s");
            std::int64_t agree = 0, lcn_chaotic = 0, lcn_decided = 0;
            auto f = run.open("lcn_c2_" + tag(c2) + ".csv", "LCN cross-check of escape labels, c2=" + num(c2));
            f << "index,x0,y0,escape,lcn,chi_final,decade_growth\n";
            for (std::int64_t k = 0; k < m; ++k) {
                const auto& e = labels[static_cast<std::size_t>(k)];
                const auto& l = lcn[static_cast<std::size_t>(k)];
                agree += e.kind == l.kind && l.kind != ChaosKind::undetermined;
                if (l.kind != ChaosKind::undetermined) {
                    ++lcn_decided;
                    lcn_chaotic += l.kind == ChaosKind::chaotic;
                }
                f << k << ',' << num(sub.points[k].x) << ',' << num(sub.points[k].y) << ',' << to_string(e.kind)
                  << ',' << to_string(l.kind) << ',' << num(l.chi_final) << ',' << num(l.decade_growth) << '\n';
            }
            agreement = static_cast<double>(agree) / static_cast<double>(m);
            lcn_b = lcn_decided ? static_cast<double>(lcn_chaotic) / static_cast<double>(lcn_decided) : 0.0;
        }
        const std::int64_t undetermined = static_cast<std::int64_t>(labels.size()) - decided;
        table << num(c2) << ',' << num(rep.p1) << ',' << num(rep.p2) << ',' << num(rep.b) << ','
              << num(rep.p_chaotic) << ',' << num(rep.p_ordered) << ',' << num(rep.ratio) << ','
              << num(proportion_identity_residual(rep)) << ',' << undetermined << ',' << m << ','
              << num(agreement) << ',' << num(lcn_b) << '\n';
        rows.push_back({{"c2", c2},
                        {"p1", rep.p1},
                        {"p2", rep.p2},
                        {"b", rep.b},
                        {"P_chaotic", rep.p_chaotic},
                        {"P_ordered", rep.p_ordered},
                        {"ratio", rep.ratio},
                        {"identity_residual", proportion_identity_residual(rep)},
                        {"main_total", decided},
                        {"undetermined", undetermined},
                        {"lcn_checked", m},
                        {"lcn_agreement", agreement},
                        {"lcn_b", lcn_b}});
    }
    run.record_aborted("labelling", aborted);
    return {{"rows", rows}};
}

ojson nonborn_mixture(Run& run)
{
    const auto& cfg = run.cfg;
    std::vector<double> c2s = cfg.c2_values;
    if (c2s.empty()) c2s.push_back(cfg.params.c2);
    std::vector<EnsembleSpec> variants;
    if (cfg.mixtures.empty()) variants.push_back(cfg.ensemble);
    for (const auto& m : cfg.mixtures) {
        EnsembleSpec s = cfg.ensemble;
        s.kind = EnsembleKind::two_blob_mixture;
        s.p1 = m.p1;
        s.p2 = m.p2;
        variants.push_back(s);
    }
    auto table = run.open("mixtures.csv", "final distance of non-Born ensembles to the Born pattern, " +
                                              std::string(to_string(cfg.normalization)));
    table << "c2,variant,kind,p1,p2,p1_over_p2,D_F\n";
    ojson rows = ojson::array();
    std::uint64_t seed = cfg.seed;
    for (double c2 : c2s) {
        const auto w = with_c2(cfg.params, c2);
        EnsembleSpec born = cfg.ensemble;
        born.kind = EnsembleKind::born;
        const auto ref_set = run.sample(w, born, seed++);
        const auto ref = run.evolve(w, ref_set, "born c2=" + tag(c2));
        const auto ref_final = ref.pattern.final_pattern();
        run.pattern("pattern_born_c2_" + tag(c2), ref_final);
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto set = run.sample(w, variants[v], seed++);
            const std::string label = "c2_" + tag(c2) + "_v" + std::to_string(v);
            const auto r = run.evolve(w, set, label);
            const auto curve = reference_curve(r.pattern, ref_final, cfg.normalization);
            {
                auto f = run.open("mixture_" + label + ".csv",
                                  "cumulative pattern against the final Born pattern, c2=" + num(c2));
                write_curve(f, curve);
            }
            run.pattern("pattern_" + label, r.pattern.final_pattern());
            const auto& s = variants[v];
            const bool mix = s.kind == EnsembleKind::two_blob_mixture;
            const double ratio = mix && s.p2 > 0 ? s.p1 / s.p2 : std::nan("");
            const double df = curve.back().d;
            table << num(c2) << ',' << v << ',' << (mix ? "two_blob_mixture" : "custom_blob") << ','
                  << (mix ? num(s.p1) : "") << ',' << (mix ? num(s.p2) : "") << ','
                  << (std::isnan(ratio) ? "" : num(ratio)) << ',' << num(df) << '\n';
            ojson row = {{"c2", c2}, {"variant", v}, {"D_F", df}};
            if (mix) {
                row["p1"] = s.p1;
                row["p2"] = s.p2;
            }
            row["curve"] = curve_json(curve);
            rows.push_back(row);
        }
    }
    return {{"rows", rows}};
}

ojson collision_snapshots(Run& run)
{
    const auto& cfg = run.cfg;
    const auto& w = cfg.params;
    const auto set = run.sample(w, cfg.ensemble, cfg.seed);
    const auto r = run.evolve(w, set, "ensemble", cfg.snapshots);
    run.pattern("pattern_final", r.pattern.final_pattern());
    auto table = run.open("exchange.csv", "particles by starting blob and nearest blob center");
    table << "t,origin_distance,upper_left_near_secondary,upper_left_near_main,lower_right_near_secondary,"
             "lower_right_near_main\n";
    ojson rows = ojson::array();
    for (std::size_t k = 0; k < cfg.snapshots.size(); ++k) {
        const double t = cfg.snapshots[k];
        const auto& pts = r.snapshots[k];
        {
            auto f = run.open("snapshot_t" + tag(t) + ".csv", "positions at t=" + num(t));
            write_positions(f, pts, set);
        }
        const auto [main_c, sec_c] = blob_centers(w, t);
        std::int64_t n[2][2] = {{0, 0}, {0, 0}};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (std::isnan(pts[i].x)) continue;
            const double dm = std::hypot(pts[i].x - main_c.x, pts[i].y - main_c.y);
            const double ds = std::hypot(pts[i].x - sec_c.x, pts[i].y - sec_c.y);
            const int from = set.tags[i] == tag_upper_left ? 0 : 1;
            ++n[from][dm < ds ? 1 : 0];
        }
        table << num(t) << ',' << num(origin_distance(w, t)) << ',' << n[0][0] << ',' << n[0][1] << ',' << n[1][0]
              << ',' << n[1][1] << '\n';
        rows.push_back({{"t", t}, {"upper_left", {n[0][0], n[0][1]}}, {"lower_right", {n[1][0], n[1][1]}}});
        if (w.c2 != 0.0 && w.c1 != 0.0) {
            auto f = run.open("nodes_t" + tag(t) + ".csv", "node lattice at t=" + num(t));
            write_node_csv(f, w, {t}, cfg.node_k);
        }
        if (cfg.render) run.pattern("snapshot_t" + tag(t), histogram(pts, cfg.grid));
    }
    return {{"snapshots", rows}};
}

ojson node_geometry(Run& run)
{
    const auto& cfg = run.cfg;
    const auto& w = cfg.params;
    const auto steps = static_cast<long>(std::floor(cfg.node_t_end / cfg.node_dt + 1e-9));
    std::vector<double> times;
    for (long i = 0; i <= steps; ++i) times.push_back(static_cast<double>(i) * cfg.node_dt);
    const bool lattice = w.c1 != 0.0 && w.c2 != 0.0;
    {
        auto f = run.open("node_geometry.csv", "blob-origin distance, node spacing, line distance, collision envelope");
        f << "t,origin_distance,spacing,line_distance,collision_envelope\n";
        for (double t : times) {
            f << num(t) << ',' << num(origin_distance(w, t)) << ',';
            if (lattice) {
                const auto fr = lattice_frame(w, t);
                if (fr.valid) f << num(fr.spacing) << ',' << num(fr.origin_distance);
                else f << ',';
            } else {
                f << ',';
            }
            f << ',' << num(collision_envelope(w, t)) << '\n';
        }
    }
    ojson res;
    if (lattice) {
        auto f = run.open("nodes.csv", "node positions");
        write_node_csv(f, w, times, cfg.node_k);
        const auto minima = spacing_minima(w, 0.0, cfg.node_t_end);
        auto g = run.open("spacing_minima.csv", "local minima of the node spacing");
        g << "t,spacing\n";
        for (double t : minima) g << num(t) << ',' << num(lattice_frame(w, t).spacing) << '\n';
        res["spacing_minima"] = minima;
        res["min_line_distance"] = min_line_distance(w);
    }
    const auto epochs = collision_epochs(w, cfg.node_t_end);
    auto f = run.open("collision_epochs.csv", "intervals where the collision envelope exceeds 0.01");
    f << "begin,end,peak_time,peak_envelope\n";
    ojson ep = ojson::array();
    for (const auto& e : epochs) {
        f << num(e.begin) << ',' << num(e.end) << ',' << num(e.peak_time) << ',' << num(e.peak_envelope) << '\n';
        ep.push_back({{"peak_time", e.peak_time}, {"peak_envelope", e.peak_envelope}});
    }
    res["collision_epochs"] = ep;
    return res;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, std::ostream* log)
{
    RunOutcome out;
    const auto t0 = Clock::now();
    Run run(cfg, log, out);
    run.note("start, " + std::to_string(run.workers) + " worker(s)");
    std::string error;
    try {
        using K = ExperimentKind;
        switch (cfg.experiment) {
        case K::born_evolution: out.results = born_evolution(run); break;
        case K::born_self_distance: out.results = born_self_distance(run); break;
        case K::cross_c2_finalpattern: out.results = cross_c2_finalpattern(run); break;
        case K::single_chaotic_ergodicity: out.results = single_chaotic_ergodicity(run); break;
        case K::b_curve: out.results = b_curve_experiment(run); break;
        case K::proportion_law: out.results = proportion_law(run); break;
        case K::nonborn_mixture: out.results = nonborn_mixture(run); break;
        case K::collision_snapshots: out.results = collision_snapshots(run); break;
        case K::node_geometry: out.results = node_geometry(run); break;
        }
    } catch (const std::exception& ex) {
        error = ex.what();
    }
    out.wall_seconds = seconds_since(t0);

    auto& m = out.manifest;
    m["experiment"] = to_string(cfg.experiment);
    m["version"] = version_string;
    m["config"] = config_to_json(cfg);
    m["seeds"] = run.seeds;
    m["workers"] = run.workers;
    m["wall_time_s"] = out.wall_seconds;
    m["aborted_total"] = out.aborted;
    m["aborted"] = run.aborted;
    m["partial"] = !error.empty();
    if (!error.empty()) m["error"] = error;
    m["artifacts"] = out.artifacts;
    m["results"] = out.results;
    {
        std::ofstream f(fs::path(cfg.output_dir) / "manifest.json", std::ios::binary);
        f << m.dump(2) << '\n';
        if (!f) throw IoError("cannot write manifest.json");
    }
    run.note(error.empty() ? "done" : "failed: " + error);
    if (!error.empty()) throw PartialRunError(error);
    return out;
}

}  // namespace bohm
