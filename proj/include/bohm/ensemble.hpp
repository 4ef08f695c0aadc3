#pragma once

// Parallel evolution of particle ensembles into checkpointed pattern grids.

#include "bohm/integrator.hpp"
#include "bohm/pattern.hpp"
#include "bohm/sampler.hpp"

#include <cstdint>
#include <vector>

namespace bohm {

struct EnsembleRunOptions {
    IntegratorConfig integrator;
    /// Ascending; the last one should equal integrator.t_final.
    std::vector<double> checkpoints;
    GridGeometry geometry;
    unsigned workers = 1;
    /// Times (multiples of sample_dt) at which every particle position is kept.
    std::vector<double> snapshot_times;
};

struct EnsembleRunResult {
    CheckpointedPattern pattern;
    std::int64_t completed = 0;
    std::int64_t aborted = 0;
    std::int64_t left_window = 0;
    std::vector<TrajectoryStatus> statuses;
    /// snapshots[k][i]: particle i at snapshot_times[k]; NaN if it never got there.
    std::vector<std::vector<PhasePoint>> snapshots;
    std::int64_t accepted_steps = 0;
    std::int64_t rejected_steps = 0;
};

/// Every particle is integrated from t = 0 to integrator.t_final. Samples of
/// trajectories that do not complete are left out of the pattern (they still
/// appear in snapshots up to the point of failure). The pattern is identical
/// for any worker count.
EnsembleRunResult run_ensemble(const WaveParams& params, const ParticleSet& particles,
                               const EnsembleRunOptions& opt);

struct SingleRunResult {
    CheckpointedPattern pattern;
    TrajectorySummary summary;
};

/// One long trajectory streamed straight into a checkpointed pattern.
SingleRunResult run_single(const WaveParams& params, const PhasePoint& start,
                           const IntegratorConfig& cfg, const std::vector<double>& checkpoints,
                           const GridGeometry& geometry = {});

}  // namespace bohm
