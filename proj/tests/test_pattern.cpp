#include "bohm/errors.hpp"
#include "bohm/pattern.hpp"
#include "bohm/sampler.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

using namespace bohm;

namespace {

PatternGrid small(int cells = 3)
{
    return PatternGrid(GridGeometry{0.0, static_cast<double>(cells), cells});
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// straight from the definition, no shared code
double brute_distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double na = 0, nb = 0;
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] / std::sqrt(na) - b[k] / std::sqrt(nb);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("cell indexing")
{
    const GridGeometry g;
    CHECK(g.cell_size() == doctest::Approx(0.05));
    CHECK(g.index(-9.0) == 0);
    CHECK(g.index(8.9999) == 359);
    CHECK_FALSE(g.index(9.0));
    CHECK_FALSE(g.index(-9.0001));
    CHECK(g.index(0.049) == 180);
    CHECK(g.index(-0.001) == 179);
    CHECK_FALSE(g.index(std::nan("")));
}

TEST_CASE("stationary point fills one cell")
{
    PatternGrid p;
    for (int n = 0; n < 100; ++n) p.add({0.0, 0.0, n * 0.05});
    CHECK(p.at(180, 180) == 100);
    CHECK(p.total() == 100);
    const auto s = summarize(p);
    CHECK(s.occupied_cells == 1);
    CHECK(s.peak_x == doctest::Approx(0.025));
    CHECK(p.t_range().second == doctest::Approx(99 * 0.05));
}

TEST_CASE("overflow is tallied and totals add up")
{
    TrajectoryRecord rec;
    for (int n = 0; n < 40; ++n) rec.samples.push_back({-12.0 + 0.5 * n, 0.3, n * 0.05});
    PatternGrid p;
    p.accumulate(rec);
    p.accumulate(rec);
    CHECK(p.n_trajectories() == 2);
    CHECK(p.total() + p.overflow() == 2 * 40);
    CHECK(p.overflow() == 2 * 6);

    TrajectoryRecord coarse;
    for (int n = 0; n < 3; ++n) coarse.samples.push_back({0.0, 0.0, n * 0.1});
    CHECK_THROWS_AS(p.accumulate(coarse), SampleDtMismatch);
}

TEST_CASE("merge is commutative and associative")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    PatternGrid a, b, c;
    for (int k = 0; k < 500; ++k) {
        a.add({u(rng), u(rng), 0.0});
        b.add({u(rng), u(rng), 0.0});
        c.add({u(rng), u(rng), 0.0});
    }
    PatternGrid ab = a, ba = b, abc1 = a, bc = b;
    ab.merge(b);
    ba.merge(a);
    CHECK(ab.counts() == ba.counts());
    CHECK(ab.overflow() == ba.overflow());
    ab.merge(c);
    bc.merge(c);
    abc1.merge(bc);
    CHECK(ab.counts() == abc1.counts());
    CHECK(ab.total() == a.total() + b.total() + c.total());
    CHECK_THROWS_AS(a.merge(small()), GeometryMismatch);
}

TEST_CASE("distance basics")
{
    PatternGrid a = small(), b = small();
    a.add_to_cell(0, 0, 7);
    b.add_to_cell(2, 1, 3);
    CHECK(frobenius_distance(a, a).value == 0.0);
    CHECK(frobenius_distance(a, b).value == doctest::Approx(std::sqrt(2.0)));
    CHECK(frobenius_distance(a, b, Normalization::unit_mass).value == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(frobenius_distance(a, PatternGrid()), GeometryMismatch);

    // scaling one pattern leaves unit_frobenius D unchanged
    PatternGrid c = small(), c5 = small();
    const int vals[9] = {1, 4, 0, 2, 9, 3, 0, 0, 5};
    for (int k = 0; k < 9; ++k) {
        c.add_to_cell(k / 3, k % 3, vals[k]);
        c5.add_to_cell(k / 3, k % 3, 5 * vals[k]);
    }
    CHECK(frobenius_distance(c, b).value == doctest::Approx(frobenius_distance(c5, b).value).epsilon(1e-14));
    CHECK(frobenius_distance(c, c5).value < 1e-15);
}

TEST_CASE("distance is a metric on random 3x3 patterns")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> u(0, 20);
    for (int trial = 0; trial < 300; ++trial) {
        PatternGrid g[3] = {small(), small(), small()};
        std::vector<double> raw[3];
        for (int m = 0; m < 3; ++m) {
            for (int k = 0; k < 9; ++k) {
                const int v = u(rng) + (k == m ? 1 : 0);  // never all zero
                g[m].add_to_cell(k / 3, k % 3, v);
                raw[m].push_back(v);
            }
        }
        const double ab = frobenius_distance(g[0], g[1]).value;
        const double ba = frobenius_distance(g[1], g[0]).value;
        const double bc = frobenius_distance(g[1], g[2]).value;
        const double ac = frobenius_distance(g[0], g[2]).value;
        CHECK(ab == ba);
        CHECK(ac <= ab + bc + 1e-15);
        CHECK(ab == doctest::Approx(brute_distance(raw[0], raw[1])).epsilon(1e-13));
        CHECK(frobenius_distance(raw[0], raw[1]) == doctest::Approx(ab).epsilon(1e-15));
    }
}

TEST_CASE("checkpointed cumulative patterns")
{
    CheckpointedPattern cp({1.0, 2.0, 3.0}, GridGeometry{0.0, 3.0, 3});
    for (int n = 0; n <= 80; ++n) {
        const double t = n * 0.05;
        cp.add({t < 1.5 ? 0.5 : 2.5, 0.5, t});
    }
    cp.note_trajectory();
    CHECK(cp.cumulative(0).total() == 21);  // t = 0 .. 1.0
    CHECK(cp.cumulative(1).total() == 41);
    CHECK(cp.cumulative(2).total() == 61);
    CHECK(cp.late_samples() == 20);
    CHECK(cp.cumulative(2).n_trajectories() == 1);
    CHECK(cp.cumulative(1).at(0, 0) == 30);

    const auto self = distance_curve(cp, cp);
    REQUIRE(self.size() == 3);
    for (const auto& p : self) CHECK(p.d == 0.0);
    const auto succ = self_distance_curve(cp);
    REQUIRE(succ.size() == 2);
    CHECK(succ[0].t == 2.0);
    CHECK(succ[0].d == doctest::Approx(frobenius_distance(cp.cumulative(0), cp.cumulative(1)).value));
    CHECK(succ[1].d > 0.0);
    const auto ref = reference_curve(cp, cp.final_pattern());
    CHECK(ref.back().d == 0.0);

    CheckpointedPattern other({1.0, 2.0}, GridGeometry{0.0, 3.0, 3});
    CHECK_THROWS_AS(cp.merge(other), GeometryMismatch);
    CHECK_THROWS_AS(CheckpointedPattern({2.0, 1.0}), InvalidArgument);
}

TEST_CASE("chi-square detects the right and the wrong density")
{
    const GridGeometry g{0.0, 1.0, 10};
    std::vector<double> probs(100);
    for (int k = 0; k < 100; ++k) probs[k] = 1.0 + (k % 10);
    Rng rng(5);
    PatternGrid good(g), bad(g);
    double cum[100];
    double s = 0;
    for (int k = 0; k < 100; ++k) cum[k] = (s += probs[k]);
    for (int n = 0; n < 20000; ++n) {
        const double u = rng.uniform() * s;
        int k = 0;
        while (cum[k] <= u) ++k;
        good.add_to_cell(k / 10, k % 10);
        bad.add_to_cell(static_cast<int>(rng.uniform() * 10), static_cast<int>(rng.uniform() * 10));
    }
    const auto rg = chi_square(good, probs);
    const auto rb = chi_square(bad, probs);
    CHECK(rg.dof == 99);
    CHECK(rg.p_value > 0.001);
    CHECK(rb.p_value < 1e-10);
}

TEST_CASE("dump round trip")
{
    PatternGrid p;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int k = 0; k < 2000; ++k) p.add({n(rng), n(rng), 0.05 * k});
    p.note_trajectory(3);
    std::stringstream ss;
    write_pattern(ss, p);
    const auto q = read_pattern(ss);
    CHECK(q.counts() == p.counts());
    CHECK(q.overflow() == p.overflow());
    CHECK(q.n_trajectories() == 3);
    CHECK(q.t_range().second == p.t_range().second);
    CHECK(q.sample_dt() == p.sample_dt());

    std::stringstream broken("{\"cells\": 3}\n1,2,3\n");
    CHECK_THROWS_AS(read_pattern(broken), IoError);
}

TEST_CASE("rendering")
{
    const auto dir = std::filesystem::temp_directory_path() / "bohm_render_test";
    std::filesystem::create_directories(dir);
    const std::string a = (dir / "a.ppm").string(), b = (dir / "b.ppm").string(),
                      e = (dir / "e.ppm").string();

    PatternGrid p;
    for (int k = 0; k < 300; ++k) p.add({3.0 + 0.01 * k, -2.0, 0.0});
    render_ppm(p, a);
    render_ppm(p, b);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("P6\n360 372\n255\n", 0) == 0);
    CHECK(std::filesystem::exists(a + ".txt"));

    // empty grid: everything above the legend is background
    render_ppm(PatternGrid(), e);
    const auto img = slurp(e);
    const std::size_t header = std::string("P6\n360 372\n255\n").size();
    bool uniform = true;
    for (std::size_t k = header; k < header + 360 * 360 * 3; ++k) uniform = uniform && img[k] == '\xff';
    CHECK(uniform);

    // a point at large y lands near the top of the image
    PatternGrid top;
    top.add({0.0, 8.99, 0.0});
    render_ppm(top, e);
    const auto t = slurp(e);
    CHECK(t[header + (0 * 360 + 180) * 3] != '\xff');

    CHECK(spectral(0.0) == std::array<unsigned char, 3>{0x5e, 0x4f, 0xa2});
    CHECK(spectral(1.0) == std::array<unsigned char, 3>{0x9e, 0x01, 0x42});
    std::filesystem::remove_all(dir);
}
