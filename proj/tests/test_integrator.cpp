#include "bohm/errors.hpp"
#include "bohm/integrator.hpp"
#include "bohm/nodes.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace bohm;

namespace {

const double kMaxEnt = std::sqrt(0.5);

IntegratorConfig horizon(double t_final)
{
    IntegratorConfig cfg;
    cfg.t_final = t_final;
    return cfg;
}

}  // namespace

TEST_CASE("trajectories match the DOP853 oracle")
{
    // tests/oracles/trajectory_oracle.py
    struct Case {
        double c2, x0, y0, t1, x1, y1;
    };
    const Case cases[] = {
        {0.5, 3.0, -2.0, 2.0, -2.006834751495161, 3.234345544794827},
        {0.2, 1.0, -1.0, 3.0, -5.744086320932271, -0.13170004149786374},
        {kMaxEnt, -2.0, 2.5, 1.5, 1.2763707939038063, -2.4716666548979855},
    };
    for (const auto& c : cases) {
        const auto rec = integrate(WaveParams::from_c2(c.c2), {c.x0, c.y0, 0.0}, horizon(c.t1));
        CHECK(rec.status == TrajectoryStatus::completed);
        CHECK(rec.last.t == c.t1);
        CHECK(rec.last.x == doctest::Approx(c.x1).epsilon(1e-7));
        CHECK(rec.last.y == doctest::Approx(c.y1).epsilon(1e-7));
        CHECK(rec.samples.back().x == rec.last.x);
    }
}

TEST_CASE("samples sit on exact multiples of sample_dt")
{
    auto cfg = horizon(7.3);
    const auto rec = integrate(WaveParams::from_c2(0.5), {2.0, -1.0, 0.0}, cfg);
    REQUIRE(rec.samples.size() == 147);
    for (std::size_t n = 0; n < rec.samples.size(); ++n) {
        CHECK(rec.samples[n].t == static_cast<double>(n) * cfg.sample_dt);
        CHECK(std::isfinite(rec.samples[n].x));
        CHECK(std::isfinite(rec.samples[n].y));
    }
    CHECK(rec.samples.front().x == 2.0);
    CHECK(rec.last.t == 7.3);

    // start off the grid: first sample at the next multiple
    const auto late = integrate(WaveParams::from_c2(0.5), {2.0, -1.0, 0.12}, cfg);
    CHECK(late.samples.front().t == 3 * 0.05);
}

TEST_CASE("product state moves with the blob center")
{
    const auto w = WaveParams::from_c2(0.0);
    const auto c0 = blob_centers(w, 0.0).first;
    const auto rec = integrate(w, {c0.x, c0.y, 0.0}, horizon(20.0));
    REQUIRE(rec.status == TrajectoryStatus::completed);
    double worst = 0.0;
    for (const auto& s : rec.samples) {
        const auto c = blob_centers(w, s.t).first;
        worst = std::max(worst, std::hypot(s.x - c.x, s.y - c.y));
    }
    CHECK(worst < 1e-3);
    CHECK(worst < 1e-8);
}

TEST_CASE("product state trajectories stay in their Lissajous box")
{
    const auto w = WaveParams::from_c2(0.0);
    const double wx = 2.0 * w.a0 * std::sqrt(2.0 / w.omega_x);
    const double wy = 2.0 * w.a0 * std::sqrt(2.0 / w.omega_y);
    CHECK(wx == doctest::Approx(7.0711).epsilon(1e-5));
    CHECK(wy == doctest::Approx(5.3730).epsilon(1e-4));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 3; ++i) {
        const PhasePoint start{3.5355 + u(rng), -2.6864 + u(rng), 0.0};
        const auto rec = integrate(w, start, horizon(1000.0));
        REQUIRE(rec.status == TrajectoryStatus::completed);
        double xl = start.x, xh = start.x, yl = start.y, yh = start.y;
        for (const auto& s : rec.samples) {
            xl = std::min(xl, s.x);
            xh = std::max(xh, s.x);
            yl = std::min(yl, s.y);
            yh = std::max(yh, s.y);
        }
        CHECK(xh - xl <= wx + 1e-6);
        CHECK(yh - yl <= wy + 1e-6);
        CHECK(xh == doctest::Approx(start.x).epsilon(1e-12));
        CHECK(yl == doctest::Approx(start.y).epsilon(1e-12));
        // long runs get close to filling the box
        CHECK(xh - xl > wx - 1e-2);
        CHECK(yh - yl > wy - 1e-2);
    }
}

TEST_CASE("integration is deterministic")
{
    const auto w = WaveParams::from_c2(kMaxEnt);
    const auto a = integrate(w, {1.1, -0.4, 0.0}, horizon(30.0));
    const auto b = integrate(w, {1.1, -0.4, 0.0}, horizon(30.0));
    REQUIRE(a.samples.size() == b.samples.size());
    bool same = true;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        same = same && a.samples[i].x == b.samples[i].x && a.samples[i].y == b.samples[i].y;
    CHECK(same);
    CHECK(a.stats.accepted == b.stats.accepted);
}

TEST_CASE("time reversal returns ordered trajectories to their start")
{
    for (double c2 : {0.0, 0.2}) {
        const auto w = WaveParams::from_c2(c2);
        const PhasePoint start{3.5355, -2.6864, 0.0};
        const auto fwd = integrate(w, start, horizon(10.0));
        REQUIRE(fwd.status == TrajectoryStatus::completed);
        auto back_cfg = horizon(0.0);
        const auto back = integrate(w, fwd.last, back_cfg);
        REQUIRE(back.status == TrajectoryStatus::completed);
        CHECK(back.last.t == 0.0);
        CHECK(std::hypot(back.last.x - start.x, back.last.y - start.y) < 1e-5);
        // backward samples walk down the same grid
        CHECK(back.samples.front().t == 10.0);
        CHECK(back.samples.back().t == 0.0);
        CHECK(back.samples[1].t == 199 * 0.05);
    }
}

TEST_CASE("tightening the tolerance moves an ordered endpoint by little")
{
    const auto w = WaveParams::from_c2(0.2);
    auto loose = horizon(10.0);
    loose.rel_tol = 1e-8;
    loose.abs_tol = 1e-10;
    auto tight = loose;
    tight.rel_tol = 0.5e-8;
    tight.abs_tol = 0.5e-10;
    const PhasePoint start{3.5355, -2.6864, 0.0};
    const auto a = integrate(w, start, loose);
    const auto b = integrate(w, start, tight);
    const auto ref = integrate(w, start, horizon(10.0));
    const double da = std::hypot(a.last.x - ref.last.x, a.last.y - ref.last.y);
    const double db = std::hypot(b.last.x - ref.last.x, b.last.y - ref.last.y);
    CHECK(std::hypot(a.last.x - b.last.x, a.last.y - b.last.y) < 1e-8 * 10.0 * 10.0);
    CHECK(db <= da);
}

TEST_CASE("node guard limits steps near the line of nodes")
{
    const auto w = WaveParams::from_c2(kMaxEnt);
    const double t = 1.3;
    const auto n = node_position(w, t, 1);
    const PhasePoint start{n.x + 0.05, n.y + 0.02, t};
    auto cfg = horizon(t + 2.0);
    // loose tolerances let error control take steps the guard has to trim
    cfg.rel_tol = 1e-2;
    cfg.abs_tol = 1e-2;
    const auto guarded = integrate(w, start, cfg);
    cfg.node_guard = false;
    const auto free = integrate(w, start, cfg);
    CHECK(guarded.stats.guard_limited > 0);
    CHECK(free.stats.guard_limited == 0);
    CHECK(guarded.status == TrajectoryStatus::completed);
}

TEST_CASE("step underflow aborts and keeps the partial record")
{
    const auto w = WaveParams::from_c2(kMaxEnt);
    const double t = 1.3;
    const auto n = node_position(w, t, 1);
    auto cfg = horizon(t + 5.0);
    cfg.dt_min = 1e-2;
    cfg.dt_init = 1e-2;
    cfg.rel_tol = 1e-14;
    cfg.abs_tol = 1e-14;
    const auto rec = integrate(w, {n.x + 1e-3, n.y, t}, cfg);
    CHECK(rec.status == TrajectoryStatus::aborted_near_node);
    CHECK(rec.last.t < t + 5.0);
    for (const auto& s : rec.samples) CHECK(std::isfinite(s.x));
}

TEST_CASE("start on a node is rejected")
{
    const auto w = WaveParams::from_c2(0.5);
    const auto n = node_position(w, 2.0, 1);
    CHECK_THROWS_AS(integrate(w, n, horizon(3.0)), NearNodeSingularity);
    auto bad = horizon(3.0);
    bad.dt_min = 1.0;
    CHECK_THROWS_AS(integrate(w, {1.0, 1.0, 0.0}, bad), InvalidArgument);
}

TEST_CASE("sink can stop the run and window exit is flagged")
{
    const auto w = WaveParams::from_c2(0.0);
    int seen = 0;
    const auto s = integrate(w, {3.5, -2.7, 0.0}, horizon(10.0), [&](const PhasePoint&) {
        return ++seen < 5;
    });
    CHECK(s.status == TrajectoryStatus::stopped);
    CHECK(seen == 5);
    CHECK(s.sample_count == 5);

    auto cfg = horizon(10.0);
    cfg.window_half_side = 3.0;
    const auto rec = integrate(w, {3.5, -2.7, 0.0}, cfg);
    CHECK(rec.status == TrajectoryStatus::left_window);
    CHECK(rec.last.t < 10.0);
}

TEST_CASE("product-state deviation does not grow")
{
    const auto res =
        integrate_with_deviation(WaveParams::from_c2(0.0), {3.0, -2.0, 0.0}, horizon(200.0));
    REQUIRE(res.deviation.samples.size() == 200);
    CHECK(res.deviation.samples.front().t == 1.0);
    for (const auto& d : res.deviation.samples) CHECK(std::abs(d.chi) < 1e-12);
}

TEST_CASE("chi is independent of the initial deviation length")
{
    const auto w = WaveParams::from_c2(kMaxEnt);
    DeviationConfig one;
    DeviationConfig two;
    two.xi0_x = 2.0;
    const auto a = integrate_with_deviation(w, {1.2, -0.3, 0.0}, horizon(100.0), one);
    const auto b = integrate_with_deviation(w, {1.2, -0.3, 0.0}, horizon(100.0), two);
    REQUIRE(a.deviation.samples.size() == b.deviation.samples.size());
    for (std::size_t i = 0; i < a.deviation.samples.size(); ++i)
        CHECK(a.deviation.samples[i].chi ==
              doctest::Approx(b.deviation.samples[i].chi).epsilon(1e-9).scale(1e-9));
}

TEST_CASE("maximally entangled trajectories have positive chi")
{
    const auto res = integrate_with_deviation(WaveParams::from_c2(kMaxEnt), {1.2, -0.3, 0.0},
                                              horizon(1000.0));
    REQUIRE(res.record.status == TrajectoryStatus::completed);
    CHECK(res.deviation.chi_final > 1e-2);
    CHECK(res.deviation.renormalizations > 0);
    // the deviation run follows the same path as the plain run
    const auto plain = integrate(WaveParams::from_c2(kMaxEnt), {1.2, -0.3, 0.0}, horizon(5.0));
    CHECK(res.record.samples[100].x == doctest::Approx(plain.samples[100].x).epsilon(1e-8));
}

TEST_CASE("binary dump round trip")
{
    const auto rec = integrate(WaveParams::from_c2(0.5), {2.0, -1.0, 0.0}, horizon(1.0));
    std::stringstream ss;
    write_trajectory_binary(ss, rec);
    CHECK(ss.str().size() == 8 + 24 * rec.samples.size());
    const auto back = read_trajectory_binary(ss);
    REQUIRE(back.size() == rec.samples.size());
    CHECK(back[7].x == rec.samples[7].x);
    CHECK(back[7].t == rec.samples[7].t);

    std::ostringstream csv;
    write_trajectory_csv(csv, rec);
    CHECK(csv.str().rfind("t,x,y\n0,2,-1\n", 0) == 0);
}
