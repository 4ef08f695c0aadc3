#include "bohm/chaos.hpp"
#include "bohm/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace bohm;

namespace {

const double kMaxEnt = std::sqrt(0.5);

}  // namespace

TEST_CASE("escape box is anchored at the lower-right corner")
{
    const auto w = WaveParams::from_c2(0.0);
    const auto box = escape_box(w, {3.0, -2.0, 0.0}, 0.0);
    CHECK(box.x_hi == 3.0);
    CHECK(box.x_lo == doctest::Approx(3.0 - 7.0711).epsilon(1e-5));
    CHECK(box.y_lo == -2.0);
    CHECK(box.y_hi == doctest::Approx(-2.0 + 5.37285).epsilon(1e-5));
    const auto wide = escape_box(w, {3.0, -2.0, 0.0}, 0.15);
    CHECK(wide.x_hi == doctest::Approx(3.0 + 0.15 * 7.0711).epsilon(1e-5));
    CHECK(wide.y_lo == doctest::Approx(-2.0 - 0.15 * 5.37285).epsilon(1e-5));
    CHECK_THROWS_AS(escape_box(w, {0, 0, 0}, -0.1), InvalidArgument);
}

TEST_CASE("product-state trajectories are ordered")
{
    const auto w = WaveParams::from_c2(0.0);
    const auto set = sample_born(w, 20, 3);
    const auto labels = label_escape(w, set, IntegratorConfig{}, EscapeOptions{}, 2);
    for (const auto& l : labels) {
        CHECK(l.kind == ChaosKind::ordered);
        CHECK_FALSE(l.escape_time);
    }
    const auto lcn = classify_lcn(w, set.points[0], IntegratorConfig{});
    CHECK(lcn.kind == ChaosKind::ordered);
    CHECK(std::abs(lcn.chi_final) < 1e-12);
}

TEST_CASE("maximal entanglement and the secondary blob are chaotic")
{
    const auto w = WaveParams::from_c2(kMaxEnt);
    const auto set = sample_born(w, 10, 5);
    for (const auto& l : label_escape(w, set, IntegratorConfig{}, EscapeOptions{}, 2)) {
        CHECK(l.kind == ChaosKind::chaotic);
        REQUIRE(l.escape_time);
        CHECK(*l.escape_time < 1e3);
    }
    const auto w02 = WaveParams::from_c2(0.2);
    const auto secondary = blob_centers(w02, 0.0).second;
    const auto l = classify_escape(w02, {secondary.x, secondary.y, 0.0}, IntegratorConfig{});
    CHECK(l.kind == ChaosKind::chaotic);

    const auto lcn = classify_lcn(w, set.points[0], IntegratorConfig{});
    CHECK(lcn.kind == ChaosKind::chaotic);
    CHECK(lcn.chi_final > 1e-3);
    CHECK(lcn.decade_growth > 0.9 * 1e4 * 1e-3);
}

TEST_CASE("a wider margin never turns ordered into chaotic")
{
    const auto w = WaveParams::from_c2(0.5);
    const auto set = sample_born(w, 12, 21);
    IntegratorConfig cfg;
    cfg.t_final = 1e3;
    for (const auto& p : set.points) {
        const auto rec = integrate(w, p, cfg);
        bool was_chaotic = true;
        for (double m : {0.05, 0.15, 0.3, 0.6, 1.0}) {
            EscapeOptions opt;
            opt.margin = m;
            const bool chaotic = classify_escape(w, rec, opt).kind == ChaosKind::chaotic;
            CHECK((was_chaotic || !chaotic));
            was_chaotic = chaotic;
        }
    }
}

TEST_CASE("short horizons are refused")
{
    const auto w = WaveParams::from_c2(0.0);
    IntegratorConfig cfg;
    cfg.t_final = 50.0;
    const auto rec = integrate(w, {3.0, -2.0, 0.0}, cfg);
    CHECK_THROWS_AS(classify_escape(w, rec), HorizonTooShort);
    EscapeOptions e;
    e.horizon = 100.0;
    CHECK_THROWS_AS(classify_escape(w, PhasePoint{3.0, -2.0, 0.0}, cfg, e), HorizonTooShort);
    LcnOptions l;
    l.horizon = 1e3;
    CHECK_THROWS_AS(classify_lcn(w, {3.0, -2.0, 0.0}, cfg, l), HorizonTooShort);
}

TEST_CASE("decade growth separates linear from logarithmic stretching")
{
    std::vector<DeviationSample> lin, log_growth, flat;
    for (int k = 1; k <= 10000; ++k) {
        const double t = k;
        lin.push_back({t, 0.05});
        log_growth.push_back({t, (3.0 + std::log(t)) / t});
        flat.push_back({t, 0.0});
    }
    CHECK(decade_growth(lin) == doctest::Approx(0.05 * 9000));
    CHECK(decade_growth(log_growth) == doctest::Approx(std::log(10.0)));
    CHECK(decade_growth(flat) == 0.0);
    CHECK(decade_growth({}) == 0.0);
    std::vector<DeviationSample> shifted;
    for (const auto& d : lin) shifted.push_back({d.t + 50.0, d.chi});
    CHECK(decade_growth(shifted, 50.0) == doctest::Approx(decade_growth(lin)));
}

TEST_CASE("proportion identity")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double p1 = 0.99 * u(rng);
        const double b = 0.999 * u(rng);
        const auto r = proportion_report(p1, 1.0 - p1, b);
        CHECK(std::abs(proportion_identity_residual(r)) < 1e-12 * (1.0 + r.ratio));
        CHECK(r.p_chaotic + r.p_ordered == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto zero = proportion_report(0.3, 0.7, 0.0);
    CHECK(zero.p_chaotic == 0.3);
    CHECK(zero.p_ordered == 0.7);
    CHECK(proportion_report(0.04 / 1.04, 1.0 / 1.04, 0.14).ratio == doctest::Approx(0.2093).epsilon(1e-3));
    CHECK(std::isinf(proportion_report(0.5, 0.5, 1.0).ratio));
}

TEST_CASE("report from labelled particles")
{
    ParticleSet set;
    std::vector<ChaosLabel> labels;
    auto add = [&](int tag, ChaosKind k) {
        set.points.push_back({0, 0, 0});
        set.tags.push_back(tag);
        ChaosLabel l;
        l.kind = k;
        labels.push_back(l);
    };
    add(tag_upper_left, ChaosKind::chaotic);
    add(tag_lower_right, ChaosKind::chaotic);
    add(tag_lower_right, ChaosKind::ordered);
    add(tag_lower_right, ChaosKind::ordered);
    add(tag_lower_right, ChaosKind::undetermined);
    const auto r = proportion_report(set, labels);
    CHECK(r.p1 == doctest::Approx(0.2));
    CHECK(r.p2 == doctest::Approx(0.8));
    CHECK(r.b == doctest::Approx(1.0 / 3));
    CHECK(r.undetermined == 1);
    CHECK(r.main_total == 3);

    std::ostringstream csv;
    write_labels_csv(csv, set, labels);
    CHECK(csv.str().rfind("index,x0,y0,blob,label,method,chi_final,escape_time\n0,0,0,1,chaotic,escape_box,,\n", 0) == 0);
}

TEST_CASE("b curve endpoints")
{
    BCurveOptions opt;
    opt.n_particles = 60;
    opt.workers = 2;
    const auto curve = b_curve({0.0, kMaxEnt}, IntegratorConfig{}, opt);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].b == 0.0);
    CHECK(curve[1].b == 1.0);
    CHECK(curve[0].main_total == 60);
}
