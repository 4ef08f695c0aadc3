#include "bohm/integrator.hpp"

#include "bohm/errors.hpp"
#include "bohm/nodes.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace bohm {

namespace {

// Dormand-Prince 5(4) tableau, error weights and Hairer's dense output.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct Dense {
    double t0;
    double h;  // signed
    State<N> r1, r2, r3, r4, r5;

    State<N> at(double t) const
    {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State<N> out;
        for (std::size_t i = 0; i < N; ++i)
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return out;
    }
};

// Multiples n * dt of the sampling interval, walked in the integration direction.
class SampleClock {
public:
    SampleClock(double t0, double dt, double dir) : dt_(dt), dir_(dir)
    {
        const double q = t0 / dt;
        const double nearest = std::round(q);
        if (std::abs(q - nearest) < 1e-9) n_ = static_cast<std::int64_t>(nearest);
        else n_ = static_cast<std::int64_t>(dir > 0 ? std::ceil(q) : std::floor(q));
    }

    double next() const { return static_cast<double>(n_) * dt_; }
    void advance() { n_ += dir_ > 0 ? 1 : -1; }
    // true when the next sample lies at or before t in the direction of travel
    bool due(double t) const { return dir_ * (next() - t) <= 1e-9 * dt_; }

private:
    double dt_;
    double dir_;
    std::int64_t n_ = 0;
};

struct GuardResult {
    double cap;
    bool active;
};

GuardResult node_guard_cap(const WaveParams& params, double x, double y, double t, double speed)
{
    constexpr double none = std::numeric_limits<double>::infinity();
    if (params.c1 == 0.0 || params.c2 == 0.0 || speed == 0.0) return {none, false};
    const NodeLatticeFrame frame = lattice_frame(params, t);
    if (!frame.valid) return {none, false};
    const double d = std::abs(distance_to_node_line(params, {x, y, t}));
    if (!(d < frame.spacing)) return {none, false};
    return {frame.spacing / (4.0 * speed), true};
}

// Drives the adaptive loop. rhs(t, y, dy) returns false on a node; on_step(dense,
// t_new, y_new, k_new) may rescale the tangent part of y_new/k_new and returns
// false to stop.
template <std::size_t N, class Rhs, class OnStep>
TrajectoryStatus drive(const WaveParams& params, const IntegratorConfig& cfg, double t,
                       State<N> y, Rhs&& rhs, OnStep&& on_step, IntegratorStats& stats,
                       PhasePoint& last)
{
    const double dir = cfg.t_final >= t ? 1.0 : -1.0;
    State<N> k1, k2, k3, k4, k5, k6, k7, tmp, yn;
    ++stats.evaluations;
    if (!rhs(t, y, k1)) throw NearNodeSingularity("start point lies on a node");

    stats.smallest_step = std::numeric_limits<double>::infinity();
    stats.min_density = density(params, {y[0], y[1], t});
    stats.min_relative_amplitude = relative_amplitude(params, {y[0], y[1], t});

    double h = std::min(cfg.dt_init, cfg.dt_max);
    bool last_rejected = false;
    TrajectoryStatus status = TrajectoryStatus::completed;
    last = {y[0], y[1], t};

    while (dir * (cfg.t_final - t) > 0.0) {
        double cap = cfg.dt_max;
        bool guarded = false;
        if (cfg.node_guard) {
            const auto g = node_guard_cap(params, y[0], y[1], t, std::hypot(k1[0], k1[1]));
            if (g.active && g.cap < cap) {
                cap = std::max(g.cap, cfg.dt_min);
                guarded = true;
            }
        }
        if (h > cap) h = cap;
        else guarded = false;
        const double remaining = dir * (cfg.t_final - t);
        bool final_step = false;
        if (h >= remaining) {
            h = remaining;
            final_step = true;
        }
        if (h < cfg.dt_min && !final_step) {
            status = TrajectoryStatus::aborted_near_node;
            break;
        }
        const double hs = dir * h;

        auto stage = [&](double c, State<N>& out, auto&& combine) {
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * combine(i);
            ++stats.evaluations;
            return rhs(t + c * hs, tmp, out);
        };
        bool ok = stage(c2, k2, [&](std::size_t i) { return a21 * k1[i]; }) &&
                  stage(c3, k3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }) &&
                  stage(c4, k4, [&](std::size_t i) {
                      return a41 * k1[i] + a42 * k2[i] + a43 * k3[i];
                  }) &&
                  stage(c5, k5, [&](std::size_t i) {
                      return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i];
                  }) &&
                  stage(1.0, k6, [&](std::size_t i) {
                      return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
                  });
        if (ok) {
            for (std::size_t i = 0; i < N; ++i)
                yn[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                     a76 * k6[i]);
            ++stats.evaluations;
            ok = rhs(t + hs, yn, k7);
        }
        if (!ok) {
            ++stats.rejected;
            ++stats.singular;
            h *= 0.5;
            last_rejected = true;
            if (h < cfg.dt_min) {
                status = TrajectoryStatus::aborted_near_node;
                break;
            }
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(yn[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(0.5 * err);
        if (!std::isfinite(err)) err = 1e10;

        if (err > 1.0) {
            ++stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
            if (h < cfg.dt_min) {
                status = TrajectoryStatus::aborted_near_node;
                break;
            }
            continue;
        }

        Dense<N> dense;
        dense.t0 = t;
        dense.h = hs;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = yn[i] - y[i];
            dense.r1[i] = y[i];
            dense.r2[i] = dy;
            dense.r3[i] = hs * k1[i] - dy;
            dense.r4[i] = dy - hs * k7[i] - dense.r3[i];
            dense.r5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                d7 * k7[i]);
        }
        const double t_new = final_step ? cfg.t_final : t + hs;

        ++stats.accepted;
        if (guarded) ++stats.guard_limited;
        stats.smallest_step = std::min(stats.smallest_step, h);
        const PhasePoint end{yn[0], yn[1], t_new};
        stats.min_density = std::min(stats.min_density, density(params, end));
        stats.min_relative_amplitude =
            std::min(stats.min_relative_amplitude, relative_amplitude(params, end));

        const bool go_on = on_step(dense, t_new, yn, k7);
        t = t_new;
        y = yn;
        k1 = k7;
        last = end;
        if (!go_on) {
            status = TrajectoryStatus::stopped;
            break;
        }
        if (cfg.window_half_side > 0.0 &&
            (std::abs(y[0]) > cfg.window_half_side || std::abs(y[1]) > cfg.window_half_side)) {
            status = TrajectoryStatus::left_window;
            break;
        }

        double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (last_rejected) grow = std::min(grow, 1.0);
        h *= grow;
        last_rejected = false;
    }
    if (stats.accepted == 0) stats.smallest_step = 0.0;
    return status;
}

void check_start(const WaveParams& params, const PhasePoint& start)
{
    params.validate();
    if (!std::isfinite(start.x) || !std::isfinite(start.y) || !std::isfinite(start.t))
        throw InvalidArgument("start point is not finite");
    if (!(density(params, start) > singularity_floor) && !guided_velocity(params, start))
        throw NearNodeSingularity("start point lies on a node");
}

// Emits every sample in (dense.t0, t_new] and reports whether the sink wants more.
template <std::size_t N>
bool emit_samples(SampleClock& clock, const Dense<N>& dense, double t_new, const SampleSink& sink,
                  std::int64_t& count)
{
    while (clock.due(t_new)) {
        const double ts = clock.next();
        const auto s = dense.at(ts);
        clock.advance();
        ++count;
        if (!sink({s[0], s[1], ts})) return false;
    }
    return true;
}

}  // namespace

void IntegratorConfig::validate() const
{
    auto fail = [](const std::string& m) { throw InvalidArgument("integrator config: " + m); };
    if (!(dt_min > 0.0)) fail("dt_min must be positive");
    if (!(dt_min <= dt_init && dt_init <= dt_max)) fail("need dt_min <= dt_init <= dt_max");
    if (!(rel_tol > 0.0 && abs_tol > 0.0)) fail("tolerances must be positive");
    if (!(sample_dt > 0.0)) fail("sample_dt must be positive");
    if (!std::isfinite(t_final)) fail("t_final must be finite");
    if (window_half_side < 0.0) fail("window_half_side must be >= 0");
}

const char* to_string(TrajectoryStatus s) noexcept
{
    switch (s) {
    case TrajectoryStatus::completed: return "completed";
    case TrajectoryStatus::aborted_near_node: return "aborted_near_node";
    case TrajectoryStatus::left_window: return "left_window";
    case TrajectoryStatus::stopped: return "stopped";
    }
    return "unknown";
}

TrajectorySummary integrate(const WaveParams& params, const PhasePoint& start,
                            const IntegratorConfig& cfg, const SampleSink& sink)
{
    cfg.validate();
    check_start(params, start);
    TrajectorySummary out;
    out.initial = start;
    const double dir = cfg.t_final >= start.t ? 1.0 : -1.0;
    SampleClock clock(start.t, cfg.sample_dt, dir);
    bool open = true;
    if (clock.due(start.t)) {
        const double ts = clock.next();
        clock.advance();
        ++out.sample_count;
        open = sink({start.x, start.y, ts});
    }
    if (!open) {
        out.status = TrajectoryStatus::stopped;
        out.last = start;
        return out;
    }

    auto rhs = [&](double t, const State<2>& y, State<2>& dy) {
        const auto v = guided_velocity(params, {y[0], y[1], t});
        if (!v) return false;
        dy = {v->vx, v->vy};
        return true;
    };
    auto on_step = [&](const Dense<2>& dense, double t_new, State<2>&, State<2>&) {
        return emit_samples(clock, dense, t_new, sink, out.sample_count);
    };
    out.status = drive<2>(params, cfg, start.t, State<2>{start.x, start.y}, rhs, on_step,
                          out.stats, out.last);
    return out;
}

TrajectoryRecord integrate(const WaveParams& params, const PhasePoint& start,
                           const IntegratorConfig& cfg)
{
    TrajectoryRecord rec;
    const double span = std::abs(cfg.t_final - start.t);
    if (cfg.sample_dt > 0.0 && span / cfg.sample_dt < 1e8)
        rec.samples.reserve(static_cast<std::size_t>(span / cfg.sample_dt) + 2);
    const auto s = integrate(params, start, cfg, [&](const PhasePoint& p) {
        rec.samples.push_back(p);
        return true;
    });
    rec.initial = s.initial;
    rec.status = s.status;
    rec.stats = s.stats;
    rec.last = s.last;
    return rec;
}

TrajectorySummary integrate_with_deviation(const WaveParams& params, const PhasePoint& start,
                                           const IntegratorConfig& cfg, const DeviationConfig& dev,
                                           const SampleSink& sink,
                                           const std::function<void(const DeviationSample&)>& chi_sink,
                                           DeviationHistory* totals)
{
    cfg.validate();
    check_start(params, start);
    const double xi0 = std::hypot(dev.xi0_x, dev.xi0_y);
    if (!(xi0 > 0.0) || !std::isfinite(xi0)) throw InvalidArgument("deviation vector must be nonzero");
    if (!(dev.chi_dt > 0.0)) throw InvalidArgument("chi_dt must be positive");
    if (!(dev.renorm_low > 0.0 && dev.renorm_low < dev.renorm_high))
        throw InvalidArgument("need 0 < renorm_low < renorm_high");

    TrajectorySummary out;
    out.initial = start;
    const double dir = cfg.t_final >= start.t ? 1.0 : -1.0;
    SampleClock clock(start.t, cfg.sample_dt, dir);
    bool open = true;
    if (clock.due(start.t)) {
        const double ts = clock.next();
        clock.advance();
        ++out.sample_count;
        open = sink({start.x, start.y, ts});
    }

    // ln|xi| = log_offset + ln|xi_current|
    double log_offset = 0.0;
    const double log_xi0 = std::log(xi0);
    std::int64_t renorms = 0;
    std::int64_t chi_index = 1;
    double chi_last = 0.0;

    auto rhs = [&](double t, const State<4>& y, State<4>& dy) {
        const auto f = guided_flow(params, {y[0], y[1], t});
        if (!f) return false;
        const auto& j = f->jacobian;
        dy = {f->v.vx, f->v.vy, j.xx * y[2] + j.xy * y[3], j.xy * y[2] + j.yy * y[3]};
        return true;
    };
    auto on_step = [&](const Dense<4>& dense, double t_new, State<4>& yn, State<4>& kn) {
        bool more = emit_samples(clock, dense, t_new, sink, out.sample_count);
        for (;;) {
            const double tc = start.t + dir * static_cast<double>(chi_index) * dev.chi_dt;
            if (dir * (tc - t_new) > 0.0) break;
            const auto s = dense.at(tc);
            const double chi =
                (log_offset + std::log(std::hypot(s[2], s[3])) - log_xi0) / std::abs(tc - start.t);
            chi_last = chi;
            if (chi_sink) chi_sink({tc, chi});
            ++chi_index;
        }
        const double norm = std::hypot(yn[2], yn[3]);
        if (norm > dev.renorm_high || norm < dev.renorm_low) {
            log_offset += std::log(norm);
            for (int i = 2; i < 4; ++i) {
                yn[i] /= norm;
                kn[i] /= norm;
            }
            ++renorms;
        }
        return more;
    };

    if (!open) {
        out.status = TrajectoryStatus::stopped;
        out.last = start;
    } else {
        out.status = drive<4>(params, cfg, start.t, State<4>{start.x, start.y, dev.xi0_x, dev.xi0_y},
                              rhs, on_step, out.stats, out.last);
    }
    if (totals) {
        totals->renormalizations = renorms;
        totals->chi_final = chi_last;
        totals->log_stretch = log_offset;
    }
    return out;
}

DeviationResult integrate_with_deviation(const WaveParams& params, const PhasePoint& start,
                                         const IntegratorConfig& cfg, const DeviationConfig& dev)
{
    DeviationResult res;
    auto& rec = res.record;
    const auto s = integrate_with_deviation(
        params, start, cfg, dev,
        [&](const PhasePoint& p) {
            rec.samples.push_back(p);
            return true;
        },
        [&](const DeviationSample& d) { res.deviation.samples.push_back(d); }, &res.deviation);
    rec.initial = s.initial;
    rec.status = s.status;
    rec.stats = s.stats;
    rec.last = s.last;
    return res;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec)
{
    const auto old = out.precision(17);
    out << "t,x,y\n";
    for (const auto& p : rec.samples) out << p.t << ',' << p.x << ',' << p.y << '\n';
    out.precision(old);
    if (!out) throw IoError("failed to write trajectory csv");
}

namespace {

void put_le(std::ostream& out, std::uint64_t v)
{
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

std::uint64_t get_le(std::istream& in)
{
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated trajectory dump");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_trajectory_binary(std::ostream& out, const TrajectoryRecord& rec)
{
    put_le(out, rec.samples.size());
    for (const auto& p : rec.samples) {
        put_le(out, std::bit_cast<std::uint64_t>(p.t));
        put_le(out, std::bit_cast<std::uint64_t>(p.x));
        put_le(out, std::bit_cast<std::uint64_t>(p.y));
    }
    if (!out) throw IoError("failed to write trajectory dump");
}

std::vector<PhasePoint> read_trajectory_binary(std::istream& in)
{
    const std::uint64_t n = get_le(in);
    if (n > (std::uint64_t{1} << 34)) throw IoError("implausible sample count in trajectory dump");
    std::vector<PhasePoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        PhasePoint p;
        p.t = std::bit_cast<double>(get_le(in));
        p.x = std::bit_cast<double>(get_le(in));
        p.y = std::bit_cast<double>(get_le(in));
        pts.push_back(p);
    }
    return pts;
}

}  // namespace bohm
