#pragma once

// Pattern grids: counts of trajectory samples on a square lattice of cells,
// plus the Frobenius distance between normalized grids.
//
// Cell (i, j) covers [lo + i h, lo + (i+1) h) x [lo + j h, lo + (j+1) h);
// storage is row-major in i (x index), so counts[i * cells + j].

#include "bohm/integrator.hpp"
#include "bohm/wave.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bohm {

struct GridGeometry {
    double lo = -9.0;
    double hi = 9.0;
    int cells = 360;

    double cell_size() const { return (hi - lo) / cells; }
    double center(int i) const { return lo + (i + 0.5) * cell_size(); }
    /// Cell index of a coordinate, empty outside [lo, hi).
    std::optional<int> index(double q) const;
    bool operator==(const GridGeometry&) const = default;
    void validate() const;
};

class PatternGrid {
public:
    explicit PatternGrid(GridGeometry geometry = {}, double sample_dt = 0.05);

    const GridGeometry& geometry() const { return geometry_; }
    double sample_dt() const { return sample_dt_; }
    std::int64_t n_trajectories() const { return n_trajectories_; }
    std::int64_t overflow() const { return overflow_; }
    std::int64_t total() const { return total_; }
    /// Earliest and latest sample time seen (NaN when empty).
    std::pair<double, double> t_range() const { return {t_lo_, t_hi_}; }
    const std::vector<std::int64_t>& counts() const { return counts_; }
    std::int64_t at(int i, int j) const { return counts_[static_cast<std::size_t>(i) * geometry_.cells + j]; }

    /// Adds one sample; out-of-window points go to the overflow tally.
    void add(const PhasePoint& p);
    /// Adds n samples into cell (i, j) directly.
    void add_to_cell(int i, int j, std::int64_t n = 1);

    /// Adds every sample of the record and counts it as one trajectory.
    /// Throws SampleDtMismatch if the record's spacing differs from sample_dt.
    void accumulate(const TrajectoryRecord& record);
    void note_trajectory(std::int64_t n = 1) { n_trajectories_ += n; }

    /// Sums counts, overflow and trajectory counts. Throws GeometryMismatch.
    void merge(const PatternGrid& other);

    void clear();

    /// Restores bookkeeping fields when loading a dump.
    void set_metadata(std::int64_t n_trajectories, std::int64_t overflow, double t_lo, double t_hi);

private:
    void note_time(double t);

    GridGeometry geometry_;
    double sample_dt_;
    std::vector<std::int64_t> counts_;
    std::int64_t n_trajectories_ = 0;
    std::int64_t overflow_ = 0;
    std::int64_t total_ = 0;
    double t_lo_;
    double t_hi_;
};

enum class Normalization { unit_frobenius, unit_mass };

const char* to_string(Normalization n) noexcept;
Normalization parse_normalization(const std::string& s);

struct PatternDistance {
    double value = 0.0;
    Normalization normalization = Normalization::unit_frobenius;
};

/// ||A/n(A) - B/n(B)||_F where n is the Frobenius norm or the total mass. An
/// all-zero matrix stays zero. Throws GeometryMismatch.
PatternDistance frobenius_distance(const PatternGrid& a, const PatternGrid& b,
                                   Normalization norm = Normalization::unit_frobenius);

/// Same on raw matrices of equal size.
double frobenius_distance(std::span<const double> a, std::span<const double> b,
                          Normalization norm = Normalization::unit_frobenius);

/// Counts as doubles, for comparing with analytic matrices.
std::vector<double> as_matrix(const PatternGrid& g);

/// Cell averages of |Psi(x, y, t)|^2 using sub x sub midpoint samples per cell.
std::vector<double> density_matrix(const WaveParams& params, double t, const GridGeometry& g,
                                   int sub = 4);

/// Pearson goodness of fit of counts against cell probabilities (renormalized
/// to the in-window count). Cells with expectation below min_expected are
/// pooled into one bin.
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int pooled_cells = 0;
};

ChiSquareResult chi_square(const PatternGrid& observed, std::span<const double> probabilities,
                           double min_expected = 5.0);

/// Cumulative patterns truncated at a list of checkpoint times. Samples with
/// t <= checkpoints[k] belong to cumulative(k); later samples are ignored.
class CheckpointedPattern {
public:
    CheckpointedPattern(std::vector<double> checkpoints, GridGeometry geometry = {},
                        double sample_dt = 0.05);

    const std::vector<double>& checkpoints() const { return checkpoints_; }
    const GridGeometry& geometry() const { return segments_.front().geometry(); }
    double sample_dt() const { return segments_.front().sample_dt(); }

    void add(const PhasePoint& p);
    void note_trajectory(std::int64_t n = 1);
    void merge(const CheckpointedPattern& other);

    /// Pattern of all samples with t <= checkpoints[k].
    PatternGrid cumulative(std::size_t k) const;
    /// Equals cumulative(last).
    PatternGrid final_pattern() const { return cumulative(checkpoints_.size() - 1); }
    std::int64_t late_samples() const { return late_; }

private:
    std::vector<double> checkpoints_;
    std::vector<PatternGrid> segments_;
    std::int64_t late_ = 0;
};

struct CurvePoint {
    double t = 0.0;
    double d = 0.0;
};

/// D between the cumulative patterns of a and b at each shared checkpoint.
std::vector<CurvePoint> distance_curve(const CheckpointedPattern& a, const CheckpointedPattern& b,
                                       Normalization norm = Normalization::unit_frobenius);

/// D between successive cumulative patterns of one run (t_k vs t_{k-1});
/// the first checkpoint has no predecessor and is skipped.
std::vector<CurvePoint> self_distance_curve(const CheckpointedPattern& a,
                                            Normalization norm = Normalization::unit_frobenius);

/// D between each cumulative pattern of a and a fixed reference.
std::vector<CurvePoint> reference_curve(const CheckpointedPattern& a, const PatternGrid& reference,
                                        Normalization norm = Normalization::unit_frobenius);

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

struct PatternSummary {
    std::int64_t total = 0;
    std::int64_t overflow = 0;
    std::int64_t occupied_cells = 0;
    std::int64_t max_count = 0;
    /// Center of the fullest cell.
    double peak_x = 0.0;
    double peak_y = 0.0;
    double mean_x = 0.0;
    double mean_y = 0.0;
};

PatternSummary summarize(const PatternGrid& g);

struct RenderOptions {
    bool log_scale = true;
    /// Pixels per cell side.
    int scale = 1;
    /// Height of the colormap strip below the image, in pixels (0 = none).
    int legend_height = 12;
};

/// Binary PPM (P6): row 0 is the top (largest y), so the origin ends up at
/// the lower left. Zero cells are white; the legend runs low to high from
/// left to right. Also writes "<path>.txt" describing axes and scale.
/// Throws IoError.
void render_ppm(const PatternGrid& g, const std::string& path, const RenderOptions& opt = {});

/// Spectral colormap, v in [0, 1] from violet-blue (low) to dark red (high).
std::array<unsigned char, 3> spectral(double v);

/// Dump: one JSON header line, then `cells` CSV rows (row i holds cells
/// (i, 0..cells-1)). Throws IoError.
void write_pattern(std::ostream& out, const PatternGrid& g);
PatternGrid read_pattern(std::istream& in);
void save_pattern(const std::string& path, const PatternGrid& g);
PatternGrid load_pattern(const std::string& path);

}  // namespace bohm
