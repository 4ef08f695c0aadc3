#include "doctest.h"

#include "bohm/errors.hpp"
#include "bohm/nodes.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>
#include <random>
#include <sstream>

using namespace bohm;

namespace {

const double kMaxEnt = std::numbers::sqrt2 / 2.0;
const double kInfinityEpoch = std::numbers::pi / (std::numbers::sqrt3 - 1.0);

double dist(const PhasePoint& a, const PhasePoint& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

TEST_CASE("lattice nodes are zeros of psi")
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> time(0.05, 20.0), amp(0.05, 0.7071);
    std::uniform_int_distribution<int> kk(-7, 7);
    int checked = 0;
    while (checked < 200) {
        const auto w = WaveParams::from_c2(amp(gen));
        const double t = time(gen);
        if (std::abs(std::sin((w.omega_x - w.omega_y) * t)) < 1e-3) continue;
        const int k = 2 * kk(gen) + 1;
        const PhasePoint p = node_position(w, t, k);
        CHECK(relative_amplitude(w, p) < 1e-10);
        ++checked;
    }
}

TEST_CASE("nodes_at honours parity and window flags")
{
    const auto w = WaveParams::from_c2(0.5);
    const auto nodes = nodes_at(w, 1.0, {-15, 15});
    REQUIRE(nodes.size() == 16);
    for (const auto& n : nodes) {
        CHECK(n.k % 2 != 0);
        CHECK(n.parity == NodeParity::odd);
        const double scale = std::pow(w.omega_x * w.omega_y, 0.25) / std::sqrt(std::numbers::pi);
        if (n.in_window) CHECK(std::abs(eval_psi(w, n.position)) < 1e-10 * scale);
    }
    // close to a nodes-at-infinity epoch the outer nodes leave the window
    const auto stretched = nodes_at(w, 4.2, {-15, 15});
    CHECK_FALSE(stretched.front().in_window);
    CHECK_FALSE(stretched.back().in_window);

    WaveParams opposite = w;
    opposite.c2 = -0.5;
    for (const auto& n : nodes_at(opposite, 1.0, {-4, 4})) {
        CHECK(n.k % 2 == 0);
        CHECK(relative_amplitude(opposite, n.position) < 1e-10);
    }
}

TEST_CASE("node errors")
{
    CHECK_THROWS_AS(nodes_at(WaveParams::from_c2(0.0), 1.0), NoNodes);
    CHECK_THROWS_AS(lattice_frame(WaveParams::from_c2(0.0), 1.0), NoNodes);
    CHECK_THROWS_AS(nodes_at(WaveParams::from_c2(0.5), kInfinityEpoch), NodesAtInfinity);
    CHECK_FALSE(lattice_frame(WaveParams::from_c2(0.5), kInfinityEpoch).valid);
    CHECK(lattice_frame(WaveParams::from_c2(0.5), kInfinityEpoch + 1e-3).valid);

    const auto w = WaveParams::from_c2(0.5);
    const PhasePoint node = node_position(w, 1.0, 1);
    CHECK_THROWS_AS(velocity(w, node), NearNodeSingularity);
    CHECK_FALSE(guided_velocity(w, node).has_value());
}

TEST_CASE("maximal entanglement: line of nodes passes through the origin")
{
    const auto w = WaveParams::from_c2(kMaxEnt);
    const auto nodes = nodes_at(w, 2.46, {-1, 1});
    REQUIRE(nodes.size() == 2);
    CHECK(nodes[0].position.x == doctest::Approx(-nodes[1].position.x));
    CHECK(nodes[0].position.y == doctest::Approx(-nodes[1].position.y));
    for (double t = 0.1; t < 10.0; t += 0.1) {
        if (!lattice_frame(w, t).valid) continue;
        CHECK(lattice_frame(w, t).origin_distance == doctest::Approx(0.0));
    }
}

TEST_CASE("spacing is independent of c2 and matches node differences")
{
    for (double t = 0.1; t <= 10.0; t += 0.01) {
        const auto ref = lattice_frame(WaveParams::from_c2(0.5), t);
        if (!ref.valid || std::abs(std::sin((1 - std::numbers::sqrt3) * t)) < 1e-3) continue;
        for (double c2 : {0.1, 0.2, kMaxEnt}) {
            const auto w = WaveParams::from_c2(c2);
            const auto f = lattice_frame(w, t);
            CHECK(std::abs(f.spacing - ref.spacing) <= 1e-12 * ref.spacing);
            const auto n = nodes_at(w, t, {-1, 1});
            CHECK(dist(n[0].position, n[1].position) == doctest::Approx(f.spacing).epsilon(1e-9));
        }
    }
}

TEST_CASE("least-squares line through 11 nodes has the analytic inclination")
{
    const auto w = WaveParams::from_c2(0.2);
    for (double t : {0.3, 1.0, 2.2, 3.0, 5.5, 7.7, 9.4}) {
        const auto nodes = nodes_at(w, t, {-11, 9});
        REQUIRE(nodes.size() == 11);
        double mx = 0, my = 0;
        for (const auto& n : nodes) mx += n.position.x, my += n.position.y;
        mx /= 11, my /= 11;
        double sxx = 0, sxy = 0;
        for (const auto& n : nodes) {
            sxx += (n.position.x - mx) * (n.position.x - mx);
            sxy += (n.position.x - mx) * (n.position.y - my);
        }
        const double slope = sxy / sxx;
        const auto f = lattice_frame(w, t);
        CHECK(std::abs(slope - f.inclination) <= 1e-9 * std::max(1.0, std::abs(f.inclination)));
        for (const auto& n : nodes) CHECK(std::abs(distance_to_node_line(w, n.position)) < 1e-9);
    }
}

TEST_CASE("distance of the node line from the origin is bounded below")
{
    const auto w = WaveParams::from_c2(0.2);
    const double d_min = min_line_distance(w);
    CHECK(d_min == doctest::Approx(0.0856 * std::log(w.c1 / w.c2)).epsilon(2e-3));
    CHECK(d_min == doctest::Approx(0.137).epsilon(1e-2));
    double smallest = 1e9;
    for (double t = 0.0; t < 100.0; t += 1e-3) {
        const auto f = lattice_frame(w, t);
        CHECK(f.origin_distance >= d_min * (1 - 1e-12));
        smallest = std::min(smallest, f.origin_distance);
        const PhasePoint origin{0.0, 0.0, t};
        CHECK(std::abs(distance_to_node_line(w, origin)) == doctest::Approx(f.origin_distance));
    }
    CHECK(smallest == doctest::Approx(d_min).epsilon(1e-3));
}

TEST_CASE("node velocity matches finite differences of node positions")
{
    const auto w = WaveParams::from_c2(0.3);
    for (double t : {0.5, 1.7, 2.9, 6.1, 9.0}) {
        for (int k : {-3, -1, 1, 5}) {
            const double h = 1e-5;
            const PhasePoint p2 = node_position(w, t + 2 * h, k), p1 = node_position(w, t + h, k);
            const PhasePoint m1 = node_position(w, t - h, k), m2 = node_position(w, t - 2 * h, k);
            const double fx = (-p2.x + 8 * p1.x - 8 * m1.x + m2.x) / (12 * h);
            const double fy = (-p2.y + 8 * p1.y - 8 * m1.y + m2.y) / (12 * h);
            const auto v = node_velocity(w, t, k);
            CHECK(std::abs(v.vx - fx) < 1e-6 * std::max(1.0, std::abs(v.vx)));
            CHECK(std::abs(v.vy - fy) < 1e-6 * std::max(1.0, std::abs(v.vy)));
        }
    }
}

TEST_CASE("X-point sits about halfway between nodes near the line of nodes")
{
    const auto w = WaveParams::from_c2(kMaxEnt);
    const auto nodes = nodes_at(w, 2.46, {-1, 1});
    const auto frame = lattice_frame(w, 2.46);
    const XPoint xp = find_x_point(w, nodes[0]);
    CHECK(xp.paired_node == -1);
    CHECK(xp.eigenvalues[0] * xp.eigenvalues[1] < 0.0);
    CHECK(xp.residual <= 1e-10);
    CHECK(std::abs(distance_to_node_line(w, xp.position)) < 0.05 * frame.spacing);
    // projection onto the segment from node -1 to node 1 lies inside it
    const double ux = nodes[1].position.x - nodes[0].position.x, uy = nodes[1].position.y - nodes[0].position.y;
    const double s = ((xp.position.x - nodes[0].position.x) * ux + (xp.position.y - nodes[0].position.y) * uy) /
                     (ux * ux + uy * uy);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    const auto u = *guided_velocity(w, xp.position);
    const auto drift = node_velocity(w, 2.46, -1);
    CHECK(std::hypot(u.vx - drift.vx, u.vy - drift.vy) <= 1e-10);
}

TEST_CASE("X-points at collision-free epochs stay close to the node line")
{
    for (double c2 : {0.2, 0.5, kMaxEnt}) {
        const auto w = WaveParams::from_c2(c2);
        for (double t : {1.0, 2.46, 3.0, 6.0, 7.0}) {
            const auto frame = lattice_frame(w, t);
            for (const auto& node : nodes_at(w, t, {-3, 1})) {
                XPoint xp;
                try {
                    xp = find_x_point(w, node);
                } catch (const NotHyperbolic& e) {
                    FAIL_CHECK(e.what());
                    continue;
                }
                CHECK(xp.eigenvalues[0] * xp.eigenvalues[1] < 0.0);
                CHECK(std::abs(distance_to_node_line(w, xp.position)) < 0.1 * frame.spacing);
                const PhasePoint next = node_position(w, t, node.k + 2);
                const double along = dist(xp.position, node.position) / frame.spacing;
                CHECK(along > 0.1);
                CHECK(along < 0.9);
                CHECK(dist(xp.position, next) < frame.spacing);
            }
        }
    }
}

TEST_CASE("density between nodes is tiny when the blobs are far away")
{
    for (double c2 : {0.2, 0.5, kMaxEnt}) {
        const auto w = WaveParams::from_c2(c2);
        for (double t = 0.01; t < 100.0; t += 0.01) {
            const auto frame = lattice_frame(w, t);
            // blobs parked near the corners of their Lissajous box
            if (!frame.valid || origin_distance(w, t) < 4.5) continue;
            const auto nodes = nodes_at(w, t, {-3, 3});
            for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
                const PhasePoint mid{0.5 * (nodes[i].position.x + nodes[i + 1].position.x),
                                     0.5 * (nodes[i].position.y + nodes[i + 1].position.y), t};
                // only the nodes near the origin sit between the blobs
                if (std::hypot(mid.x, mid.y) > 1.0) continue;
                CHECK(density(w, mid) < 1e-11);
            }
        }
    }
}

TEST_CASE("collision epochs")
{
    const auto w = WaveParams::from_c2(0.5);
    const auto epochs = collision_epochs(w, 10.0);
    REQUIRE(epochs.size() == 2);
    CHECK(epochs[0].peak_time == doctest::Approx(4.58).epsilon(0.005));
    CHECK(epochs[0].peak_envelope == doctest::Approx(0.31).epsilon(0.02 / 0.31));
    CHECK(epochs[1].peak_time == doctest::Approx(8.1).epsilon(0.005));
    CHECK(epochs[1].peak_envelope == doctest::Approx(0.03).epsilon(0.01 / 0.03));
    for (double t : {1.0, 3.2, 6.3}) {
        for (const auto& e : epochs) CHECK_FALSE((t >= e.begin && t <= e.end));
    }
    // independent of c2
    const auto other = collision_epochs(WaveParams::from_c2(0.2), 10.0);
    REQUIRE(other.size() == epochs.size());
    CHECK(other[0].peak_time == doctest::Approx(epochs[0].peak_time));
    for (double t = 0.0; t < 50.0; t += 0.01) CHECK(cross_term_amplitude(w, t) >= std::exp(-50.0));
}

TEST_CASE("spacing minima")
{
    const auto w = WaveParams::from_c2(0.5);
    const auto minima = spacing_minima(w, 0.0, 10.0);
    REQUIRE(minima.size() == 5);
    // the ones at ~4.58 and ~8.09 coincide with collisions
    CHECK(minima[0] == doctest::Approx(1.047).epsilon(1e-3));
    CHECK(minima[1] == doctest::Approx(2.592).epsilon(1e-3));
    CHECK(minima[2] == doctest::Approx(4.5785).epsilon(1e-3));
    CHECK(minima[3] == doctest::Approx(6.372).epsilon(1e-3));
    CHECK(minima[4] == doctest::Approx(8.087).epsilon(1e-3));
}

TEST_CASE("node CSV dump")
{
    std::ostringstream os;
    write_node_csv(os, WaveParams::from_c2(0.5), {1.0, kInfinityEpoch, 2.0}, {-1, 1});
    const std::string s = os.str();
    CHECK(s.rfind("t,k,x_nod,y_nod,spacing,inclination,d_no\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
