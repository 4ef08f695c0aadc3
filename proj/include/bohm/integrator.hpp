#pragma once

// Adaptive Dormand-Prince 5(4) integration of Bohmian trajectories.
//
// Samples are emitted at exact multiples of sample_dt using the fifth-order
// dense output, so the sample grid never depends on the step sequence.
// Integration may run backward in time (t_final < start.t).

#include "bohm/wave.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace bohm {

struct IntegratorConfig {
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 0.05;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double sample_dt = 0.05;
    double t_final = 10.0;
    /// Cap h |v| <= spacing / 4 within one spacing of the node line.
    bool node_guard = true;
    /// Stop with left_window once |x| or |y| exceeds this (0 disables).
    double window_half_side = 0.0;

    /// Throws InvalidArgument.
    void validate() const;
};

enum class TrajectoryStatus {
    completed,
    aborted_near_node,
    left_window,
    /// The sample sink asked to stop.
    stopped,
};

const char* to_string(TrajectoryStatus s) noexcept;

struct IntegratorStats {
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    /// Rejections caused by a stage landing on a node.
    std::int64_t singular = 0;
    /// Accepted steps whose size was set by the node guard.
    std::int64_t guard_limited = 0;
    std::int64_t evaluations = 0;
    double smallest_step = 0.0;
    /// Minimum |Psi|^2 over accepted step end points.
    double min_density = 0.0;
    /// Minimum of |Psi| / (|c1 A| + |c2 B|) over accepted step end points.
    double min_relative_amplitude = 1.0;
};

struct TrajectoryRecord {
    PhasePoint initial;
    std::vector<PhasePoint> samples;
    TrajectoryStatus status = TrajectoryStatus::completed;
    IntegratorStats stats;
    /// Position reached when integration ended (equals the last sample only
    /// when t_final is on the sample grid).
    PhasePoint last;
};

/// Return false to stop the integration.
using SampleSink = std::function<bool(const PhasePoint&)>;

/// Everything in a TrajectoryRecord except the samples.
struct TrajectorySummary {
    PhasePoint initial;
    PhasePoint last;
    TrajectoryStatus status = TrajectoryStatus::completed;
    IntegratorStats stats;
    std::int64_t sample_count = 0;
};

/// Throws NearNodeSingularity when the start has |Psi|^2 <= singularity_floor.
TrajectorySummary integrate(const WaveParams& params, const PhasePoint& start,
                            const IntegratorConfig& cfg, const SampleSink& sink);

TrajectoryRecord integrate(const WaveParams& params, const PhasePoint& start,
                           const IntegratorConfig& cfg);

struct DeviationConfig {
    double xi0_x = 1.0;
    double xi0_y = 0.0;
    /// chi is recorded at every multiple of chi_dt after the start.
    double chi_dt = 1.0;
    double renorm_high = 1e8;
    double renorm_low = 1e-8;
};

struct DeviationSample {
    double t = 0.0;
    /// ln(|xi(t)| / |xi0|) / (t - t0)
    double chi = 0.0;
};

struct DeviationHistory {
    std::vector<DeviationSample> samples;
    /// Accumulated ln(|xi| / |xi0|) at the end of the integration.
    double log_stretch = 0.0;
    double chi_final = 0.0;
    std::int64_t renormalizations = 0;
};

struct DeviationResult {
    TrajectoryRecord record;
    DeviationHistory deviation;
};

/// Co-integrates the tangent system xi' = J xi. Error control acts on the
/// position only; xi rides along on the same steps.
DeviationResult integrate_with_deviation(const WaveParams& params, const PhasePoint& start,
                                         const IntegratorConfig& cfg,
                                         const DeviationConfig& dev = {});

/// Sink variant: positions go to sink, chi samples to chi_sink.
TrajectorySummary integrate_with_deviation(const WaveParams& params, const PhasePoint& start,
                                           const IntegratorConfig& cfg, const DeviationConfig& dev,
                                           const SampleSink& sink,
                                           const std::function<void(const DeviationSample&)>& chi_sink,
                                           DeviationHistory* totals = nullptr);

/// "t,x,y" rows with full round-trip precision.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec);

/// Little-endian binary dump: uint64 count, then count triples of float64 (t, x, y).
void write_trajectory_binary(std::ostream& out, const TrajectoryRecord& rec);
std::vector<PhasePoint> read_trajectory_binary(std::istream& in);

}  // namespace bohm
