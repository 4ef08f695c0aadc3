#include "bohm/ensemble.hpp"

#include "bohm/errors.hpp"
#include "bohm/parallel.hpp"

#include <cmath>
#include <limits>

namespace bohm {

namespace {

// Index of the snapshot taken at t, or -1.
int snapshot_index(const std::vector<double>& times, double t, double dt)
{
    for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) < 1e-6 * dt) return static_cast<int>(k);
    return -1;
}

}  // namespace

EnsembleRunResult run_ensemble(const WaveParams& params, const ParticleSet& particles,
                               const EnsembleRunOptions& opt)
{
    params.validate();
    opt.integrator.validate();
    if (opt.checkpoints.empty()) throw InvalidArgument("ensemble run needs checkpoints");
    const double dt = opt.integrator.sample_dt;
    for (double t : opt.snapshot_times) {
        const double q = t / dt;
        if (std::abs(q - std::round(q)) > 1e-6)
            throw SampleDtMismatch("snapshot time " + std::to_string(t) + " is not a multiple of sample_dt");
    }

    const std::size_t n = particles.size();
    const unsigned workers = std::max(1u, opt.workers);
    std::vector<CheckpointedPattern> local(workers, CheckpointedPattern(opt.checkpoints, opt.geometry, dt));
    std::vector<std::vector<PhasePoint>> buffers(workers);

    EnsembleRunResult out{CheckpointedPattern(opt.checkpoints, opt.geometry, dt), 0, 0, 0, {}, {}, 0, 0};
    out.statuses.assign(n, TrajectoryStatus::completed);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.snapshots.assign(opt.snapshot_times.size(), std::vector<PhasePoint>(n, PhasePoint{nan, nan, nan}));
    std::vector<IntegratorStats> stats(n);

    parallel_for(n, workers, [&](std::size_t i, unsigned w) {
        auto& buf = buffers[w];
        buf.clear();
        PhasePoint start = particles.points[i];
        start.t = 0.0;
        const auto s = integrate(params, start, opt.integrator, [&](const PhasePoint& p) {
            buf.push_back(p);
            if (!opt.snapshot_times.empty()) {
                const int k = snapshot_index(opt.snapshot_times, p.t, dt);
                if (k >= 0) out.snapshots[static_cast<std::size_t>(k)][i] = p;
            }
            return true;
        });
        out.statuses[i] = s.status;
        stats[i] = s.stats;
        if (s.status != TrajectoryStatus::completed) return;
        for (const auto& p : buf) local[w].add(p);
        local[w].note_trajectory();
    });

    for (const auto& l : local) out.pattern.merge(l);
    for (std::size_t i = 0; i < n; ++i) {
        switch (out.statuses[i]) {
        case TrajectoryStatus::completed: ++out.completed; break;
        case TrajectoryStatus::aborted_near_node: ++out.aborted; break;
        case TrajectoryStatus::left_window: ++out.left_window; break;
        case TrajectoryStatus::stopped: break;
        }
        out.accepted_steps += stats[i].accepted;
        out.rejected_steps += stats[i].rejected;
    }
    return out;
}

SingleRunResult run_single(const WaveParams& params, const PhasePoint& start,
                           const IntegratorConfig& cfg, const std::vector<double>& checkpoints,
                           const GridGeometry& geometry)
{
    SingleRunResult out{CheckpointedPattern(checkpoints, geometry, cfg.sample_dt), {}};
    out.summary = integrate(params, start, cfg, [&](const PhasePoint& p) {
        out.pattern.add(p);
        return true;
    });
    out.pattern.note_trajectory();
    return out;
}

}  // namespace bohm
