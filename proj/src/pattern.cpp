#include "bohm/pattern.hpp"

#include "bohm/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace bohm {

std::optional<int> GridGeometry::index(double q) const
{
    if (!(q >= lo && q < hi)) return std::nullopt;
    const int i = static_cast<int>(std::floor((q - lo) * cells / (hi - lo)));
    return std::min(i, cells - 1);
}

void GridGeometry::validate() const
{
    if (!(hi > lo) || cells <= 0) throw InvalidArgument("grid geometry: need hi > lo and cells > 0");
}

PatternGrid::PatternGrid(GridGeometry geometry, double sample_dt)
    : geometry_(geometry),
      sample_dt_(sample_dt),
      t_lo_(std::numeric_limits<double>::quiet_NaN()),
      t_hi_(std::numeric_limits<double>::quiet_NaN())
{
    geometry_.validate();
    if (!(sample_dt > 0.0)) throw InvalidArgument("pattern: sample_dt must be positive");
    counts_.assign(static_cast<std::size_t>(geometry_.cells) * geometry_.cells, 0);
}

void PatternGrid::note_time(double t)
{
    if (std::isnan(t_lo_) || t < t_lo_) t_lo_ = t;
    if (std::isnan(t_hi_) || t > t_hi_) t_hi_ = t;
}

void PatternGrid::add(const PhasePoint& p)
{
    note_time(p.t);
    const auto i = geometry_.index(p.x);
    const auto j = geometry_.index(p.y);
    if (!i || !j) {
        ++overflow_;
        return;
    }
    ++counts_[static_cast<std::size_t>(*i) * geometry_.cells + *j];
    ++total_;
}

void PatternGrid::add_to_cell(int i, int j, std::int64_t n)
{
    if (i < 0 || j < 0 || i >= geometry_.cells || j >= geometry_.cells)
        throw InvalidArgument("pattern: cell index out of range");
    counts_[static_cast<std::size_t>(i) * geometry_.cells + j] += n;
    total_ += n;
}

void PatternGrid::accumulate(const TrajectoryRecord& record)
{
    const auto& s = record.samples;
    for (std::size_t k = 1; k < s.size(); ++k) {
        if (std::abs(std::abs(s[k].t - s[k - 1].t) - sample_dt_) > 1e-9 * sample_dt_ * (1.0 + std::abs(s[k].t)))
            throw SampleDtMismatch("record spacing " + std::to_string(s[k].t - s[k - 1].t) +
                                   " differs from pattern sample_dt " + std::to_string(sample_dt_));
    }
    for (const auto& p : s) add(p);
    ++n_trajectories_;
}

void PatternGrid::merge(const PatternGrid& other)
{
    if (!(geometry_ == other.geometry_)) throw GeometryMismatch("pattern grids differ in geometry");
    if (sample_dt_ != other.sample_dt_) throw SampleDtMismatch("pattern grids differ in sample_dt");
    for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
    total_ += other.total_;
    overflow_ += other.overflow_;
    n_trajectories_ += other.n_trajectories_;
    if (!std::isnan(other.t_lo_)) note_time(other.t_lo_);
    if (!std::isnan(other.t_hi_)) note_time(other.t_hi_);
}

void PatternGrid::clear()
{
    std::fill(counts_.begin(), counts_.end(), 0);
    n_trajectories_ = overflow_ = total_ = 0;
    t_lo_ = t_hi_ = std::numeric_limits<double>::quiet_NaN();
}

void PatternGrid::set_metadata(std::int64_t n_trajectories, std::int64_t overflow, double t_lo,
                               double t_hi)
{
    n_trajectories_ = n_trajectories;
    overflow_ = overflow;
    t_lo_ = t_lo;
    t_hi_ = t_hi;
}

const char* to_string(Normalization n) noexcept
{
    return n == Normalization::unit_mass ? "unit_mass" : "unit_frobenius";
}

Normalization parse_normalization(const std::string& s)
{
    if (s == "unit_frobenius") return Normalization::unit_frobenius;
    if (s == "unit_mass") return Normalization::unit_mass;
    throw InvalidArgument("unknown normalization '" + s + "'");
}

namespace {

template <class A, class B>
double distance_impl(const A& a, const B& b, std::size_t n, Normalization norm)
{
    double na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(a[k]), y = static_cast<double>(b[k]);
        if (norm == Normalization::unit_frobenius) {
            na += x * x;
            nb += y * y;
        } else {
            na += x;
            nb += y;
        }
    }
    if (norm == Normalization::unit_frobenius) {
        na = std::sqrt(na);
        nb = std::sqrt(nb);
    }
    const double sa = na > 0.0 ? 1.0 / na : 0.0;
    const double sb = nb > 0.0 ? 1.0 / nb : 0.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = static_cast<double>(a[k]) * sa - static_cast<double>(b[k]) * sb;
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

PatternDistance frobenius_distance(const PatternGrid& a, const PatternGrid& b, Normalization norm)
{
    if (!(a.geometry() == b.geometry())) throw GeometryMismatch("pattern grids differ in geometry");
    return {distance_impl(a.counts(), b.counts(), a.counts().size(), norm), norm};
}

double frobenius_distance(std::span<const double> a, std::span<const double> b, Normalization norm)
{
    if (a.size() != b.size()) throw GeometryMismatch("matrices differ in size");
    return distance_impl(a, b, a.size(), norm);
}

std::vector<double> as_matrix(const PatternGrid& g)
{
    return {g.counts().begin(), g.counts().end()};
}

std::vector<double> density_matrix(const WaveParams& params, double t, const GridGeometry& g, int sub)
{
    g.validate();
    if (sub < 1) throw InvalidArgument("density_matrix: sub must be >= 1");
    const double h = g.cell_size() / sub;
    std::vector<double> out(static_cast<std::size_t>(g.cells) * g.cells);
    for (int i = 0; i < g.cells; ++i) {
        for (int j = 0; j < g.cells; ++j) {
            double acc = 0.0;
            for (int a = 0; a < sub; ++a)
                for (int b = 0; b < sub; ++b)
                    acc += density(params, {g.lo + i * g.cell_size() + (a + 0.5) * h,
                                            g.lo + j * g.cell_size() + (b + 0.5) * h, t});
            out[static_cast<std::size_t>(i) * g.cells + j] = acc / (sub * sub);
        }
    }
    return out;
}

ChiSquareResult chi_square(const PatternGrid& observed, std::span<const double> probabilities,
                           double min_expected)
{
    const auto& c = observed.counts();
    if (probabilities.size() != c.size()) throw GeometryMismatch("probabilities do not match grid");
    double mass = 0.0;
    for (double p : probabilities) mass += p;
    if (!(mass > 0.0)) throw InvalidArgument("chi_square: probabilities sum to zero");
    const double n = static_cast<double>(observed.total());

    ChiSquareResult r;
    double pooled_e = 0.0, pooled_o = 0.0;
    int bins = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double e = n * probabilities[k] / mass;
        const double o = static_cast<double>(c[k]);
        if (e < min_expected) {
            pooled_e += e;
            pooled_o += o;
            ++r.pooled_cells;
            continue;
        }
        r.statistic += (o - e) * (o - e) / e;
        ++bins;
    }
    if (pooled_e > 0.0) {
        r.statistic += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
        ++bins;
    }
    r.dof = bins - 1;
    if (r.dof < 1) throw InvalidArgument("chi_square: too few bins");
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

CheckpointedPattern::CheckpointedPattern(std::vector<double> checkpoints, GridGeometry geometry,
                                         double sample_dt)
    : checkpoints_(std::move(checkpoints))
{
    if (checkpoints_.empty()) throw InvalidArgument("need at least one checkpoint");
    for (std::size_t k = 1; k < checkpoints_.size(); ++k)
        if (!(checkpoints_[k] > checkpoints_[k - 1])) throw InvalidArgument("checkpoints must ascend");
    segments_.assign(checkpoints_.size(), PatternGrid(geometry, sample_dt));
}

void CheckpointedPattern::add(const PhasePoint& p)
{
    // first checkpoint >= t, with slack for n * dt round-off
    const auto it = std::lower_bound(checkpoints_.begin(), checkpoints_.end(), p.t, [](double cp, double t) {
        return cp + 1e-9 * (1.0 + std::abs(cp)) < t;
    });
    if (it == checkpoints_.end()) {
        ++late_;
        return;
    }
    segments_[static_cast<std::size_t>(it - checkpoints_.begin())].add(p);
}

void CheckpointedPattern::note_trajectory(std::int64_t n)
{
    for (auto& s : segments_) s.note_trajectory(n);
}

void CheckpointedPattern::merge(const CheckpointedPattern& other)
{
    if (checkpoints_ != other.checkpoints_) throw GeometryMismatch("checkpoint lists differ");
    for (std::size_t k = 0; k < segments_.size(); ++k) segments_[k].merge(other.segments_[k]);
    late_ += other.late_;
}

PatternGrid CheckpointedPattern::cumulative(std::size_t k) const
{
    if (k >= segments_.size()) throw InvalidArgument("checkpoint index out of range");
    PatternGrid out(segments_.front().geometry(), segments_.front().sample_dt());
    for (std::size_t s = 0; s <= k; ++s) out.merge(segments_[s]);
    // every segment carries the full trajectory count
    out.set_metadata(segments_[k].n_trajectories(), out.overflow(), out.t_range().first,
                     out.t_range().second);
    return out;
}

std::vector<CurvePoint> distance_curve(const CheckpointedPattern& a, const CheckpointedPattern& b,
                                       Normalization norm)
{
    if (a.checkpoints() != b.checkpoints()) throw GeometryMismatch("checkpoint lists differ");
    std::vector<CurvePoint> out;
    PatternGrid ca(a.geometry(), a.sample_dt()), cb(b.geometry(), b.sample_dt());
    for (std::size_t k = 0; k < a.checkpoints().size(); ++k) {
        ca = a.cumulative(k);
        cb = b.cumulative(k);
        out.push_back({a.checkpoints()[k], frobenius_distance(ca, cb, norm).value});
    }
    return out;
}

std::vector<CurvePoint> self_distance_curve(const CheckpointedPattern& a, Normalization norm)
{
    std::vector<CurvePoint> out;
    PatternGrid prev = a.cumulative(0);
    for (std::size_t k = 1; k < a.checkpoints().size(); ++k) {
        PatternGrid cur = a.cumulative(k);
        out.push_back({a.checkpoints()[k], frobenius_distance(prev, cur, norm).value});
        prev = std::move(cur);
    }
    return out;
}

std::vector<CurvePoint> reference_curve(const CheckpointedPattern& a, const PatternGrid& reference,
                                        Normalization norm)
{
    std::vector<CurvePoint> out;
    for (std::size_t k = 0; k < a.checkpoints().size(); ++k)
        out.push_back({a.checkpoints()[k], frobenius_distance(a.cumulative(k), reference, norm).value});
    return out;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve)
{
    const auto old = out.precision(17);
    out << "t,D\n";
    for (const auto& p : curve) out << p.t << ',' << p.d << '\n';
    out.precision(old);
    if (!out) throw IoError("failed to write distance curve");
}

PatternSummary summarize(const PatternGrid& g)
{
    PatternSummary s;
    s.total = g.total();
    s.overflow = g.overflow();
    const auto& geo = g.geometry();
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < geo.cells; ++i) {
        for (int j = 0; j < geo.cells; ++j) {
            const auto c = g.at(i, j);
            if (c == 0) continue;
            ++s.occupied_cells;
            sx += static_cast<double>(c) * geo.center(i);
            sy += static_cast<double>(c) * geo.center(j);
            if (c > s.max_count) {
                s.max_count = c;
                s.peak_x = geo.center(i);
                s.peak_y = geo.center(j);
            }
        }
    }
    if (s.total > 0) {
        s.mean_x = sx / static_cast<double>(s.total);
        s.mean_y = sy / static_cast<double>(s.total);
    }
    return s;
}

std::array<unsigned char, 3> spectral(double v)
{
    // ColorBrewer "Spectral", reversed so that high values are red
    static constexpr unsigned char table[11][3] = {
        {0x5e, 0x4f, 0xa2}, {0x32, 0x88, 0xbd}, {0x66, 0xc2, 0xa5}, {0xab, 0xdd, 0xa4},
        {0xe6, 0xf5, 0x98}, {0xff, 0xff, 0xbf}, {0xfe, 0xe0, 0x8b}, {0xfd, 0xae, 0x61},
        {0xf4, 0x6d, 0x43}, {0xd5, 0x3e, 0x4f}, {0x9e, 0x01, 0x42},
    };
    v = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0);
    const double pos = v * 10.0;
    const int k = std::min(static_cast<int>(pos), 9);
    const double f = pos - k;
    std::array<unsigned char, 3> out;
    for (int c = 0; c < 3; ++c)
        out[c] = static_cast<unsigned char>(std::lround(table[k][c] + f * (table[k + 1][c] - table[k][c])));
    return out;
}

void render_ppm(const PatternGrid& g, const std::string& path, const RenderOptions& opt)
{
    if (opt.scale < 1 || opt.legend_height < 0) throw InvalidArgument("render: bad options");
    const auto& geo = g.geometry();
    const int n = geo.cells;
    const int width = n * opt.scale;
    const int height = n * opt.scale + opt.legend_height;
    std::int64_t max_count = 0;
    for (auto c : g.counts()) max_count = std::max(max_count, c);

    auto level = [&](std::int64_t c) {
        if (max_count == 0) return 0.0;
        if (opt.log_scale) return std::log1p(static_cast<double>(c)) / std::log1p(static_cast<double>(max_count));
        return static_cast<double>(c) / static_cast<double>(max_count);
    };

    std::vector<unsigned char> px(static_cast<std::size_t>(width) * height * 3, 255);
    for (int row = 0; row < n * opt.scale; ++row) {
        const int j = n - 1 - row / opt.scale;
        for (int col = 0; col < width; ++col) {
            const int i = col / opt.scale;
            const auto c = g.at(i, j);
            if (c == 0) continue;
            const auto rgb = spectral(level(c));
            std::copy(rgb.begin(), rgb.end(), px.begin() + (static_cast<std::size_t>(row) * width + col) * 3);
        }
    }
    for (int row = n * opt.scale; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const auto rgb = spectral(width > 1 ? static_cast<double>(col) / (width - 1) : 0.0);
            std::copy(rgb.begin(), rgb.end(), px.begin() + (static_cast<std::size_t>(row) * width + col) * 3);
        }
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << "P6\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (!out) throw IoError("failed to write " + path);

    std::ofstream side(path + ".txt");
    if (!side) throw IoError("cannot open " + path + ".txt");
    side.precision(17);
    side << "image " << width << "x" << height << " (binary PPM, 8-bit RGB)\n"
         << "x axis: left to right, " << geo.lo << " to " << geo.hi << ", " << n << " cells, "
         << opt.scale << " px per cell\n"
         << "y axis: bottom to top, " << geo.lo << " to " << geo.hi << " (origin at lower left)\n"
         << "color: spectral, " << (opt.log_scale ? "log(1 + count) / log(1 + max)" : "count / max")
         << ", violet = low, dark red = high, white = empty\n"
         << "legend: bottom " << opt.legend_height << " px, low at left, high at right\n"
         << "max_count " << max_count << "\n"
         << "total " << g.total() << "\noverflow " << g.overflow() << "\n"
         << "n_trajectories " << g.n_trajectories() << "\n";
    if (!side) throw IoError("failed to write " + path + ".txt");
}

void write_pattern(std::ostream& out, const PatternGrid& g)
{
    const auto& geo = g.geometry();
    const auto [t0, t1] = g.t_range();
    nlohmann::ordered_json h;
    h["format"] = "bohm-pattern-1";
    h["extent"] = {geo.lo, geo.hi};
    h["cells"] = geo.cells;
    h["sample_dt"] = g.sample_dt();
    h["t_range"] = {std::isnan(t0) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t0),
                    std::isnan(t1) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t1)};
    h["n_trajectories"] = g.n_trajectories();
    h["total"] = g.total();
    h["overflow"] = g.overflow();
    out << h.dump() << '\n';
    std::string row;
    for (int i = 0; i < geo.cells; ++i) {
        row.clear();
        for (int j = 0; j < geo.cells; ++j) {
            if (j) row += ',';
            row += std::to_string(g.at(i, j));
        }
        row += '\n';
        out << row;
    }
    if (!out) throw IoError("failed to write pattern dump");
}

PatternGrid read_pattern(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw IoError("pattern dump: empty input");
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
        throw IoError(std::string("pattern dump: bad header: ") + e.what());
    }
    try {
        GridGeometry geo{h.at("extent").at(0).get<double>(), h.at("extent").at(1).get<double>(),
                         h.at("cells").get<int>()};
        PatternGrid g(geo, h.at("sample_dt").get<double>());
        for (int i = 0; i < geo.cells; ++i) {
            if (!std::getline(in, line)) throw IoError("pattern dump: missing rows");
            std::istringstream row(line);
            std::string cell;
            for (int j = 0; j < geo.cells; ++j) {
                if (!std::getline(row, cell, ',')) throw IoError("pattern dump: short row");
                const auto c = std::stoll(cell);
                if (c < 0) throw IoError("pattern dump: negative count");
                if (c) g.add_to_cell(i, j, c);
            }
        }
        const auto& tr = h.at("t_range");
        const double nan = std::numeric_limits<double>::quiet_NaN();
        g.set_metadata(h.at("n_trajectories").get<std::int64_t>(), h.at("overflow").get<std::int64_t>(),
                       tr.at(0).is_null() ? nan : tr.at(0).get<double>(),
                       tr.at(1).is_null() ? nan : tr.at(1).get<double>());
        if (g.total() != h.at("total").get<std::int64_t>()) throw IoError("pattern dump: total mismatch");
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("pattern dump: bad header field: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw IoError("pattern dump: bad count");
    } catch (const std::out_of_range&) {
        throw IoError("pattern dump: count out of range");
    }
}

void save_pattern(const std::string& path, const PatternGrid& g)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    write_pattern(out, g);
}

PatternGrid load_pattern(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_pattern(in);
}

}  // namespace bohm
