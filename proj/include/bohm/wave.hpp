#pragma once

// Two-qubit coherent-state wavefunction
//
//   Psi = c1 Y_R(x,t) Y_L(y,t) + c2 Y_L(x,t) Y_R(y,t)
//
// where Y_R / Y_L are right/left displaced coherent states of a unit-mass
// harmonic oscillator (hbar = m = 1). Everything here is a pure function of
// (params, point) and may be called concurrently.

#include <array>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>

namespace bohm {

using Complex = std::complex<double>;

/// Physical constants and entanglement coefficients defining Psi.
struct WaveParams {
    static constexpr double hbar = 1.0;
    static constexpr double m_x = 1.0;
    static constexpr double m_y = 1.0;

    static constexpr double default_omega_x = 1.0;
    static constexpr double default_omega_y = std::numbers::sqrt3;
    static constexpr double default_a0 = 2.5;

    double c1 = 1.0;
    double c2 = 0.0;
    double omega_x = default_omega_x;
    double omega_y = default_omega_y;
    double a0 = default_a0;

    /// Default physics with c1 = sqrt(1 - c2^2).
    static WaveParams from_c2(double c2);

    /// sgn(c1 c2): +1, -1 or 0 for a product state.
    int parity() const noexcept;

    /// Throws InvalidArgument when the normalization or a0 > 0 fails.
    void validate() const;
};

enum class Branch { right, left };
enum class Axis { x, y };

struct PhasePoint {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

struct VelocityVector {
    double vx = 0.0;
    double vy = 0.0;
};

/// Symmetric Jacobian d v_i / d x_j of the Bohmian velocity field.
struct VelocityJacobian {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

enum class BlobKind { main, secondary };

struct BlobCenter {
    double x = 0.0;
    double y = 0.0;
    BlobKind which = BlobKind::main;
};

/// |Psi|^2 below this value makes velocity() fail.
inline constexpr double singularity_floor = 1e-24;

/// Constant peak density sqrt(wx wy)/pi of the product-state blob.
double product_peak_density(const WaveParams& params) noexcept;

Complex eval_component(const WaveParams& params, Branch which, Axis axis, double coord,
                       double t);

Complex eval_psi(const WaveParams& params, const PhasePoint& p);

double density(const WaveParams& params, const PhasePoint& p);

/// (dPsi/dx, dPsi/dy) in closed form.
std::pair<Complex, Complex> eval_psi_gradient(const WaveParams& params, const PhasePoint& p);

/// Analytic dPsi/dt.
Complex eval_psi_time_derivative(const WaveParams& params, const PhasePoint& p);

/// Bohmian velocity Im(grad Psi / Psi). Throws NearNodeSingularity when
/// |Psi|^2 < singularity_floor.
VelocityVector velocity(const WaveParams& params, const PhasePoint& p);

/// Velocity evaluated in a scale-free form (ratio of the two product terms),
/// usable far out in the Gaussian tails. Empty when the two terms cancel to
/// relative precision sqrt(singularity_floor), i.e. on a node.
struct FlowSample {
    VelocityVector v;
    VelocityJacobian jacobian;
    /// |Psi| / (|c1 A| + |c2 B|): 1 away from nodes, 0 on a node.
    double cancellation = 1.0;
};

std::optional<FlowSample> guided_flow(const WaveParams& params, const PhasePoint& p);

/// Cheaper variant of guided_flow() that skips the Jacobian.
std::optional<VelocityVector> guided_velocity(const WaveParams& params, const PhasePoint& p);

/// |Psi| / (|c1 A| + |c2 B|) computed without under/overflow: 1 where one
/// product term dominates, 0 on a node.
double relative_amplitude(const WaveParams& params, const PhasePoint& p);

VelocityJacobian velocity_jacobian(const WaveParams& params, const PhasePoint& p);

/// Analytic blob centers: main (lower-right) first, secondary second.
std::pair<BlobCenter, BlobCenter> blob_centers(const WaveParams& params, double t);

/// Distance of the main blob top from the origin.
double origin_distance(const WaveParams& params, double t);

/// (d|Psi|^2/dx, d|Psi|^2/dy) at the analytic main-blob center.
std::array<double, 2> blob_top_residual(const WaveParams& params, double t);

/// Frequencies of the Hamiltonian used by schrodinger_residual().
struct OscillatorFrequencies {
    double omega_x = WaveParams::default_omega_x;
    double omega_y = WaveParams::default_omega_y;
};

/// |i dPsi/dt - H Psi| relative to |c1 A| + |c2 B|, where H is the
/// two-oscillator Hamiltonian built with params' own frequencies.
double schrodinger_residual(const WaveParams& params, const PhasePoint& p);

/// As above but against a Hamiltonian with explicit frequencies.
double schrodinger_residual(const WaveParams& params, const PhasePoint& p,
                            const OscillatorFrequencies& hamiltonian);

}  // namespace bohm
