#include "bohm/sampler.hpp"

#include "bohm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace bohm {

std::pair<double, double> Rng::normal_pair()
{
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

void EnsembleSpec::validate() const
{
    auto fail = [](const std::string& m) { throw InvalidArgument("ensemble: " + m); };
    if (n_particles <= 0) fail("n_particles must be positive");
    if (kind == EnsembleKind::two_blob_mixture) {
        if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) fail("p1, p2 must lie in [0, 1]");
        if (std::abs(p1 + p2 - 1.0) > 1e-9) fail("p1 + p2 must equal 1");
    }
    if (kind == EnsembleKind::custom_blob) {
        if (custom.empty()) fail("custom_blob needs at least one center");
        double sum = 0.0;
        for (const auto& c : custom) {
            if (!(c.weight >= 0.0) || !std::isfinite(c.x) || !std::isfinite(c.y))
                fail("custom centers need finite coordinates and weight >= 0");
            sum += c.weight;
        }
        if (std::abs(sum - 1.0) > 1e-9) fail("custom weights must sum to 1");
    }
}

std::int64_t ParticleSet::count(int tag) const
{
    return std::count(tags.begin(), tags.end(), tag);
}

double born_envelope(const WaveParams& params, const BornOptions& opt)
{
    const int m = opt.envelope_grid;
    const double h = 2.0 * opt.half_side / (m - 1);
    double best = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            best = std::max(best, density(params, {-opt.half_side + i * h, -opt.half_side + j * h, 0.0}));
    return best * opt.envelope_margin;
}

double born_acceptance_expectation(const WaveParams& params, const BornOptions& opt)
{
    const int m = 901;
    const double h = 2.0 * opt.half_side / (m - 1);
    double mass = 0.0;
    for (int i = 0; i < m; ++i) {
        const double wi = (i == 0 || i == m - 1) ? 0.5 : 1.0;
        for (int j = 0; j < m; ++j) {
            const double wj = (j == 0 || j == m - 1) ? 0.5 : 1.0;
            mass += wi * wj * density(params, {-opt.half_side + i * h, -opt.half_side + j * h, 0.0});
        }
    }
    mass *= h * h;
    const double area = 4.0 * opt.half_side * opt.half_side;
    return mass / (area * born_envelope(params, opt));
}

namespace {

int dominant_tag(const WaveParams& params, double x, double y)
{
    const double a = std::abs(params.c1) * std::abs(eval_component(params, Branch::right, Axis::x, x, 0.0)) *
                     std::abs(eval_component(params, Branch::left, Axis::y, y, 0.0));
    const double b = std::abs(params.c2) * std::abs(eval_component(params, Branch::left, Axis::x, x, 0.0)) *
                     std::abs(eval_component(params, Branch::right, Axis::y, y, 0.0));
    return b > a ? tag_upper_left : tag_lower_right;
}

}  // namespace

ParticleSet sample_born(const WaveParams& params, std::int64_t n, std::uint64_t seed,
                        const BornOptions& opt)
{
    params.validate();
    if (n <= 0) throw InvalidArgument("sample_born: n must be positive");
    if (opt.envelope_grid < 2 || !(opt.envelope_margin >= 1.0) || !(opt.half_side > 0.0))
        throw InvalidArgument("sample_born: bad options");
    const double envelope = born_envelope(params, opt);
    Rng rng(seed);
    ParticleSet out;
    out.points.reserve(static_cast<std::size_t>(n));
    out.tags.reserve(static_cast<std::size_t>(n));
    std::int64_t proposed = 0;
    while (static_cast<std::int64_t>(out.points.size()) < n) {
        const double x = rng.uniform(-opt.half_side, opt.half_side);
        const double y = rng.uniform(-opt.half_side, opt.half_side);
        const double u = rng.uniform() * envelope;
        ++proposed;
        const double d = density(params, {x, y, 0.0});
        if (u < d && d > singularity_floor) {
            out.points.push_back({x, y, 0.0});
            out.tags.push_back(dominant_tag(params, x, y));
        }
    }
    out.acceptance_rate = static_cast<double>(n) / static_cast<double>(proposed);
    return out;
}

std::vector<std::int64_t> apportion(std::int64_t n, const std::vector<double>& weights)
{
    // largest remainder on top of the floors; equals round(n w) whenever
    // those roundings already sum to n. Ties go to the lower index.
    std::vector<std::int64_t> counts(weights.size());
    std::vector<double> rem(weights.size());
    std::int64_t total = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(n) * weights[i];
        counts[i] = static_cast<std::int64_t>(std::floor(exact + 1e-9));
        rem[i] = exact - static_cast<double>(counts[i]);
        total += counts[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; total < n; k = (k + 1) % order.size(), ++total) ++counts[order[k]];
    return counts;
}

ParticleSet sample_mixture(const WaveParams& params, const EnsembleSpec& spec)
{
    params.validate();
    spec.validate();
    struct Group {
        double x, y, weight;
        int tag;
    };
    std::vector<Group> groups;
    if (spec.kind == EnsembleKind::custom_blob) {
        for (std::size_t i = 0; i < spec.custom.size(); ++i)
            groups.push_back({spec.custom[i].x, spec.custom[i].y, spec.custom[i].weight,
                              tag_custom_base + static_cast<int>(i)});
    } else {
        const auto [main, secondary] = blob_centers(params, 0.0);
        groups.push_back({secondary.x, secondary.y, spec.p1, tag_upper_left});
        groups.push_back({main.x, main.y, spec.p2, tag_lower_right});
    }
    std::vector<double> w;
    for (const auto& g : groups) w.push_back(g.weight);
    const auto counts = apportion(spec.n_particles, w);

    const double sx = std::sqrt(0.5 / params.omega_x);
    const double sy = std::sqrt(0.5 / params.omega_y);
    Rng rng(spec.seed);
    ParticleSet out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::int64_t i = 0; i < counts[g]; ++i) {
            PhasePoint p;
            // redraw the (practically impossible) starts sitting on a node
            do {
                const auto [zx, zy] = rng.normal_pair();
                p = {groups[g].x + sx * zx, groups[g].y + sy * zy, 0.0};
            } while (!guided_velocity(params, p));
            out.points.push_back(p);
            out.tags.push_back(groups[g].tag);
        }
    }
    return out;
}

ParticleSet sample_ensemble(const WaveParams& params, const EnsembleSpec& spec)
{
    spec.validate();
    if (spec.kind == EnsembleKind::born) return sample_born(params, spec.n_particles, spec.seed);
    return sample_mixture(params, spec);
}

void write_particles_csv(std::ostream& out, const ParticleSet& set)
{
    const auto old = out.precision(17);
    out << "index,x0,y0,blob_tag\n";
    for (std::size_t i = 0; i < set.points.size(); ++i)
        out << i << ',' << set.points[i].x << ',' << set.points[i].y << ',' << set.tags[i] << '\n';
    out.precision(old);
    if (!out) throw IoError("failed to write particle csv");
}

ParticleSet read_particles_csv(std::istream& in)
{
    ParticleSet set;
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,x0,y0,blob_tag", 0) != 0)
        throw IoError("particle csv: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string f[4];
        for (auto& s : f)
            if (!std::getline(row, s, ',')) throw IoError("particle csv: short row");
        try {
            set.points.push_back({std::stod(f[1]), std::stod(f[2]), 0.0});
            set.tags.push_back(std::stoi(f[3]));
        } catch (const std::exception&) {
            throw IoError("particle csv: bad number in row '" + line + "'");
        }
    }
    return set;
}

}  // namespace bohm
