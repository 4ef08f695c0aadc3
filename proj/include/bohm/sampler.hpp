#pragma once

// Initial particle ensembles at t = 0.
//
// Blob tags: 1 = upper-left (secondary) blob, 2 = lower-right (main) blob,
// 3 + i = custom center i.

#include "bohm/wave.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace bohm {

inline constexpr int tag_upper_left = 1;
inline constexpr int tag_lower_right = 2;
inline constexpr int tag_custom_base = 3;

/// mt19937_64 with hand-rolled uniform/normal transforms so the streams are
/// identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Two independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair();

private:
    std::mt19937_64 engine_;
};

enum class EnsembleKind { born, two_blob_mixture, custom_blob };

struct CustomBlob {
    double x = 0.0;
    double y = 0.0;
    double weight = 1.0;
};

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::born;
    std::int64_t n_particles = 2400;
    /// Fraction in the upper-left blob (two_blob_mixture).
    double p1 = 0.0;
    double p2 = 1.0;
    /// Weights must sum to 1 (custom_blob).
    std::vector<CustomBlob> custom;
    std::uint64_t seed = 1;

    /// Throws InvalidArgument.
    void validate() const;
};

struct ParticleSet {
    std::vector<PhasePoint> points;
    std::vector<int> tags;
    /// Born only: accepted / proposed.
    double acceptance_rate = 0.0;

    std::size_t size() const { return points.size(); }
    std::int64_t count(int tag) const;
};

struct BornOptions {
    double half_side = 9.0;
    /// Points per side of the grid used to find max |Psi0|^2.
    int envelope_grid = 721;
    double envelope_margin = 1.05;
};

/// Rejection sampling of |Psi(x, y, 0)|^2 over the square window. Tags come
/// from whichever product term dominates at the point.
ParticleSet sample_born(const WaveParams& params, std::int64_t n, std::uint64_t seed,
                        const BornOptions& opt = {});

/// Gaussian draws with the product-state covariance (1/(2 wx), 1/(2 wy)) at
/// the blob centers; per-blob counts are round(n p) with largest-remainder
/// repair so they sum to n.
ParticleSet sample_mixture(const WaveParams& params, const EnsembleSpec& spec);

/// Dispatches on spec.kind.
ParticleSet sample_ensemble(const WaveParams& params, const EnsembleSpec& spec);

/// Exact per-group counts used by sample_mixture.
std::vector<std::int64_t> apportion(std::int64_t n, const std::vector<double>& weights);

/// Expected acceptance rate of sample_born: integral of |Psi0|^2 over the
/// window divided by (window area * envelope).
double born_acceptance_expectation(const WaveParams& params, const BornOptions& opt = {});

/// Envelope used by sample_born (grid maximum times margin).
double born_envelope(const WaveParams& params, const BornOptions& opt = {});

/// "index,x0,y0,blob_tag" rows.
void write_particles_csv(std::ostream& out, const ParticleSet& set);
ParticleSet read_particles_csv(std::istream& in);

}  // namespace bohm
