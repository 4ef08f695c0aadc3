#include "bohm/chaos.hpp"

#include "bohm/errors.hpp"
#include "bohm/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace bohm {

const char* to_string(ChaosKind k) noexcept
{
    switch (k) {
    case ChaosKind::ordered: return "ordered";
    case ChaosKind::chaotic: return "chaotic";
    case ChaosKind::undetermined: return "undetermined";
    }
    return "unknown";
}

const char* to_string(ChaosMethod m) noexcept
{
    return m == ChaosMethod::lcn ? "lcn" : "escape_box";
}

EscapeBox escape_box(const WaveParams& params, const PhasePoint& start, double margin)
{
    if (!(margin >= 0.0)) throw InvalidArgument("escape box margin must be >= 0");
    const double wx = 2.0 * params.a0 * std::sqrt(2.0 / params.omega_x);
    const double wy = 2.0 * params.a0 * std::sqrt(2.0 / params.omega_y);
    return {start.x - wx * (1.0 + margin), start.x + wx * margin, start.y - wy * margin,
            start.y + wy * (1.0 + margin)};
}

ChaosLabel classify_escape(const WaveParams& params, const TrajectoryRecord& record,
                           const EscapeOptions& opt)
{
    const EscapeBox box = escape_box(params, record.initial, opt.margin);
    ChaosLabel out;
    out.method = ChaosMethod::escape_box;
    for (const auto& s : record.samples) {
        if (!box.contains(s.x, s.y)) {
            out.kind = ChaosKind::chaotic;
            out.escape_time = s.t;
            return out;
        }
    }
    const double span = record.samples.empty() ? 0.0 : record.samples.back().t - record.initial.t;
    if (record.status == TrajectoryStatus::aborted_near_node) {
        out.aborted = true;
        return out;
    }
    if (span + 1e-9 < opt.min_horizon)
        throw HorizonTooShort("record spans " + std::to_string(span) + ", escape test needs " +
                              std::to_string(opt.min_horizon));
    out.kind = ChaosKind::ordered;
    return out;
}

ChaosLabel classify_escape(const WaveParams& params, const PhasePoint& start,
                           const IntegratorConfig& base, const EscapeOptions& opt)
{
    if (opt.horizon < opt.min_horizon)
        throw HorizonTooShort("escape horizon " + std::to_string(opt.horizon) + " below " +
                              std::to_string(opt.min_horizon));
    const EscapeBox box = escape_box(params, start, opt.margin);
    IntegratorConfig cfg = base;
    cfg.t_final = start.t + opt.horizon;
    ChaosLabel out;
    out.method = ChaosMethod::escape_box;
    const auto run = integrate(params, start, cfg, [&](const PhasePoint& p) {
        if (box.contains(p.x, p.y)) return true;
        out.escape_time = p.t;
        return false;
    });
    if (out.escape_time) out.kind = ChaosKind::chaotic;
    else if (run.status == TrajectoryStatus::aborted_near_node) out.aborted = true;
    else out.kind = ChaosKind::ordered;
    return out;
}

double decade_growth(const std::vector<DeviationSample>& history, double t0)
{
    if (history.empty()) return 0.0;
    const double t_end = history.back().t - t0;
    const double g_end = history.back().chi * t_end;
    // latest sample at or before t_end / 10
    double g_start = 0.0;
    for (const auto& d : history) {
        const double t = d.t - t0;
        if (t > t_end / 10.0 + 1e-9 * t_end) break;
        g_start = d.chi * t;
    }
    return g_end - g_start;
}

ChaosLabel classify_lcn(const WaveParams& params, const PhasePoint& start,
                        const IntegratorConfig& base, const LcnOptions& opt)
{
    if (opt.horizon < opt.min_horizon)
        throw HorizonTooShort("LCN horizon " + std::to_string(opt.horizon) + " below " +
                              std::to_string(opt.min_horizon));
    IntegratorConfig cfg = base;
    cfg.t_final = start.t + opt.horizon;
    DeviationConfig dev;
    dev.chi_dt = opt.chi_dt;
    std::vector<DeviationSample> history;
    DeviationHistory totals;
    const auto run = integrate_with_deviation(
        params, start, cfg, dev, [](const PhasePoint&) { return true; },
        [&](const DeviationSample& d) { history.push_back(d); }, &totals);

    ChaosLabel out;
    out.method = ChaosMethod::lcn;
    out.chi_final = history.empty() ? 0.0 : history.back().chi;
    out.decade_growth = decade_growth(history, start.t);
    if (run.status == TrajectoryStatus::aborted_near_node) {
        out.aborted = true;
        return out;
    }
    const double recent_rate = out.decade_growth / (0.9 * opt.horizon);
    if (out.chi_final > opt.chi_threshold && recent_rate > opt.chi_threshold)
        out.kind = ChaosKind::chaotic;
    else if (out.decade_growth < opt.ordered_growth)
        out.kind = ChaosKind::ordered;
    return out;
}

ProportionReport proportion_report(double p1, double p2, double b)
{
    if (!(p2 > 0.0)) throw InvalidArgument("proportion report needs p2 > 0");
    ProportionReport r;
    r.p1 = p1;
    r.p2 = p2;
    r.b = b;
    r.p_chaotic = p1 + b * p2;
    r.p_ordered = (1.0 - b) * p2;
    r.ratio = b < 1.0 ? (p1 / p2 + b) / (1.0 - b) : std::numeric_limits<double>::infinity();
    return r;
}

ProportionReport proportion_report(const ParticleSet& particles, const std::vector<ChaosLabel>& labels)
{
    if (labels.size() != particles.size()) throw InvalidArgument("one label per particle required");
    std::int64_t upper = 0, main = 0, chaotic = 0, undetermined = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (particles.tags[i] == tag_upper_left) {
            ++upper;
            continue;
        }
        if (particles.tags[i] != tag_lower_right) continue;
        if (labels[i].kind == ChaosKind::undetermined) {
            ++undetermined;
            continue;
        }
        ++main;
        if (labels[i].kind == ChaosKind::chaotic) ++chaotic;
    }
    const double n = static_cast<double>(upper + main + undetermined);
    if (main == 0) throw InvalidArgument("no labelled lower-right particles");
    auto r = proportion_report(upper / n, (main + undetermined) / n,
                               static_cast<double>(chaotic) / static_cast<double>(main));
    r.main_total = main;
    r.main_chaotic = chaotic;
    r.undetermined = undetermined;
    return r;
}

double proportion_identity_residual(const ProportionReport& r)
{
    return r.ratio * (1.0 - r.b) - r.p1 / r.p2 - r.b;
}

std::vector<ChaosLabel> label_escape(const WaveParams& params, const ParticleSet& set,
                                     const IntegratorConfig& base, const EscapeOptions& opt,
                                     unsigned workers)
{
    std::vector<ChaosLabel> out(set.size());
    parallel_for(set.size(), workers, [&](std::size_t i, unsigned) {
        out[i] = classify_escape(params, set.points[i], base, opt);
    });
    return out;
}

std::vector<ChaosLabel> label_lcn(const WaveParams& params, const ParticleSet& set,
                                  const IntegratorConfig& base, const LcnOptions& opt, unsigned workers)
{
    std::vector<ChaosLabel> out(set.size());
    parallel_for(set.size(), workers, [&](std::size_t i, unsigned) {
        out[i] = classify_lcn(params, set.points[i], base, opt);
    });
    return out;
}

std::vector<BCurvePoint> b_curve(const std::vector<double>& c2_values, const IntegratorConfig& base,
                                 const BCurveOptions& opt)
{
    std::vector<BCurvePoint> out;
    for (double c2 : c2_values) {
        const auto params = WaveParams::from_c2(c2);
        const auto set = sample_born(params, opt.n_particles, opt.seed);
        ParticleSet main;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (set.tags[i] != tag_lower_right) continue;
            main.points.push_back(set.points[i]);
            main.tags.push_back(set.tags[i]);
        }
        const auto labels = label_escape(params, main, base, opt.escape, opt.workers);
        BCurvePoint p;
        p.c2 = c2;
        for (const auto& l : labels) {
            if (l.aborted) ++p.aborted;
            if (l.kind == ChaosKind::undetermined) continue;
            ++p.main_total;
            if (l.kind == ChaosKind::chaotic) ++p.main_chaotic;
        }
        p.b = p.main_total > 0 ? static_cast<double>(p.main_chaotic) / static_cast<double>(p.main_total) : 0.0;
        out.push_back(p);
    }
    return out;
}

void write_labels_csv(std::ostream& out, const ParticleSet& set, const std::vector<ChaosLabel>& labels)
{
    if (labels.size() != set.size()) throw InvalidArgument("one label per particle required");
    const auto old = out.precision(17);
    out << "index,x0,y0,blob,label,method,chi_final,escape_time\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& l = labels[i];
        out << i << ',' << set.points[i].x << ',' << set.points[i].y << ',' << set.tags[i] << ','
            << to_string(l.kind) << ',' << to_string(l.method) << ',';
        if (l.method == ChaosMethod::lcn) out << l.chi_final;
        out << ',';
        if (l.escape_time) out << *l.escape_time;
        out << '\n';
    }
    out.precision(old);
    if (!out) throw IoError("failed to write labels csv");
}

}  // namespace bohm
