#pragma once

// Ordered / chaotic labels for trajectories and the blob proportion algebra.

#include "bohm/integrator.hpp"
#include "bohm/sampler.hpp"
#include "bohm/wave.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bohm {

enum class ChaosKind { ordered, chaotic, undetermined };
enum class ChaosMethod { lcn, escape_box };

const char* to_string(ChaosKind k) noexcept;
const char* to_string(ChaosMethod m) noexcept;

struct ChaosLabel {
    ChaosKind kind = ChaosKind::undetermined;
    ChaosMethod method = ChaosMethod::escape_box;
    /// lcn only: chi at the horizon.
    double chi_final = 0.0;
    /// lcn only: ln stretch gained over the last decade, g(T) - g(T/10)
    /// with g = chi t. Ordered motion gains about ln 10 per power of t.
    double decade_growth = 0.0;
    /// escape_box only: first sample outside the box.
    std::optional<double> escape_time;
    /// Integrator gave up near a node before a decision was reached.
    bool aborted = false;
};

/// Box swept by a product-state trajectory from `start`: widths
/// 2 a0 sqrt(2 / w), start at the lower-right corner, every side pushed out
/// by margin * width.
struct EscapeBox {
    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
    bool contains(double x, double y) const { return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi; }
};

EscapeBox escape_box(const WaveParams& params, const PhasePoint& start, double margin = 0.20);

struct EscapeOptions {
    double margin = 0.20;
    double horizon = 2e3;
    /// Records that neither escape nor reach this span are rejected.
    double min_horizon = 1e3;
};

/// Label from an existing record. Throws HorizonTooShort when the record
/// stays inside the box but spans less than min_horizon.
ChaosLabel classify_escape(const WaveParams& params, const TrajectoryRecord& record,
                           const EscapeOptions& opt = {});

/// Integrates from start up to opt.horizon, stopping at the first exit.
ChaosLabel classify_escape(const WaveParams& params, const PhasePoint& start,
                           const IntegratorConfig& base, const EscapeOptions& opt = {});

struct LcnOptions {
    double horizon = 1e4;
    double min_horizon = 1e4;
    /// Chaotic needs chi(T) and the last-decade rate decade_growth / (0.9 T)
    /// both above this.
    double chi_threshold = 1e-3;
    /// decade_growth below this (cubic growth of |xi|) means ordered.
    double ordered_growth = 3.0 * 2.302585092994046;
    double chi_dt = 1.0;
};

/// g(T) - g(T/10) for g = chi (t - t0), T the last sample. 0 for empty histories.
double decade_growth(const std::vector<DeviationSample>& history, double t0 = 0.0);

/// Throws HorizonTooShort when opt.horizon < opt.min_horizon.
ChaosLabel classify_lcn(const WaveParams& params, const PhasePoint& start,
                        const IntegratorConfig& base, const LcnOptions& opt = {});

struct ProportionReport {
    double b = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p_chaotic = 0.0;
    double p_ordered = 0.0;
    /// P_ch / P_or (infinite when b = 1).
    double ratio = 0.0;
    std::int64_t main_total = 0;
    std::int64_t main_chaotic = 0;
    std::int64_t undetermined = 0;
};

/// P_ch = p1 + b p2, P_or = (1 - b) p2, ratio = (p1/p2 + b)/(1 - b).
ProportionReport proportion_report(double p1, double p2, double b);

/// b from the labels of the lower-right particles; p1, p2 from the tag counts.
/// Undetermined main-blob labels are left out of b and counted separately.
ProportionReport proportion_report(const ParticleSet& particles, const std::vector<ChaosLabel>& labels);

/// Residual ratio (1 - b) - p1/p2 - b of the proportion identity.
double proportion_identity_residual(const ProportionReport& r);

struct BCurvePoint {
    double c2 = 0.0;
    double b = 0.0;
    std::int64_t main_total = 0;
    std::int64_t main_chaotic = 0;
    std::int64_t aborted = 0;
};

struct BCurveOptions {
    std::int64_t n_particles = 500;
    std::uint64_t seed = 1;
    EscapeOptions escape;
    unsigned workers = 1;
};

/// Escape-box b over a c2 sweep using Born samples. Only the lower-right
/// particles are integrated.
std::vector<BCurvePoint> b_curve(const std::vector<double>& c2_values, const IntegratorConfig& base,
                                 const BCurveOptions& opt = {});

/// Labels for a particle set, escape method, in parallel.
std::vector<ChaosLabel> label_escape(const WaveParams& params, const ParticleSet& set,
                                     const IntegratorConfig& base, const EscapeOptions& opt,
                                     unsigned workers);

std::vector<ChaosLabel> label_lcn(const WaveParams& params, const ParticleSet& set,
                                  const IntegratorConfig& base, const LcnOptions& opt, unsigned workers);

/// "index,x0,y0,blob,label,method,chi_final,escape_time" rows.
void write_labels_csv(std::ostream& out, const ParticleSet& set, const std::vector<ChaosLabel>& labels);

}  // namespace bohm
