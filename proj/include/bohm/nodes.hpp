#pragma once

// Nodal-point lattice of the entangled state and the companion X-points.
//
// For c1 c2 != 0 the zeros of Psi form an infinite, equally spaced lattice on
// a straight line that moves and rotates with time. Nodes are indexed by an
// integer k that is odd when c1 c2 > 0 and even when c1 c2 < 0; neighbours
// along the line are k and k + 2.

#include "bohm/wave.hpp"

#include <iosfwd>
#include <vector>

namespace bohm {

enum class NodeParity { even, odd };

struct NodalPoint {
    int k = 0;
    PhasePoint position;
    NodeParity parity = NodeParity::odd;
    /// false when |x| or |y| exceeds the node window (12).
    bool in_window = true;
};

struct NodeLatticeFrame {
    double t = 0.0;
    /// dy/dx of the line of nodes; +-inf when the line is vertical.
    double inclination = 0.0;
    /// Distance between node k and node k + 2.
    double spacing = 0.0;
    /// Distance of the line of nodes from the origin.
    double origin_distance = 0.0;
    bool valid = false;
};

struct KRange {
    int lo = -15;
    int hi = 15;
};

inline constexpr double node_window = 12.0;
inline constexpr double nodes_at_infinity_window = 1e-9;

/// All lattice nodes with k in [range.lo, range.hi] of the right parity.
/// Throws NoNodes for product states and NodesAtInfinity when
/// |sin((wx - wy) t)| < 1e-9.
std::vector<NodalPoint> nodes_at(const WaveParams& params, double t, KRange range = {});

/// Position of node k (k must have the lattice parity).
PhasePoint node_position(const WaveParams& params, double t, int k);

/// Analytic d(node position)/dt.
VelocityVector node_velocity(const WaveParams& params, double t, int k);

/// Spacing, inclination and line distance; valid == false at the
/// nodes-at-infinity epochs. Throws NoNodes for product states.
NodeLatticeFrame lattice_frame(const WaveParams& params, double t);

/// Closest approach of the line of nodes to the origin over all t.
double min_line_distance(const WaveParams& params);

/// Signed distance of p from the line of nodes at time p.t (NaN if invalid).
double distance_to_node_line(const WaveParams& params, const PhasePoint& p);

struct XPoint {
    PhasePoint position;
    int paired_node = 0;
    /// Eigenvalues of the Jacobian of the flow, ascending.
    double eigenvalues[2] = {0.0, 0.0};
    int iterations = 0;
    double residual = 0.0;
};

struct XPointSearch {
    /// +1 seeds the search halfway toward node k + 2, -1 toward k - 2.
    int direction = +1;
    int max_iterations = 100;
    double tolerance = 1e-10;
    /// Half-side of the node-centered search square, in units of spacing.
    double box_half_side = 1.0;
};

/// Zero of the relative field u(p) = v(p) - d(node)/dt near a node, found by
/// damped Newton with a finite-difference Jacobian. Throws XPointNotFound if
/// Newton leaves the box or stalls, NotHyperbolic for a non-saddle zero.
XPoint find_x_point(const WaveParams& params, const NodalPoint& node, const XPointSearch& search = {});

/// Squared relative weight of the secondary term at the main blob center,
/// exp[-8 a0^2 (cos^2 wx t + cos^2 wy t)]. Independent of c2.
double collision_envelope(const WaveParams& params, double t);

/// Amplitude-level factor exp[-4 a0^2 (cos^2 wx t + cos^2 wy t)] >= exp(-8 a0^2).
double cross_term_amplitude(const WaveParams& params, double t);

struct CollisionEpoch {
    double begin = 0.0;
    double end = 0.0;
    double peak_time = 0.0;
    double peak_envelope = 0.0;
};

/// Intervals in [0, t_max] where collision_envelope exceeds threshold.
std::vector<CollisionEpoch> collision_epochs(const WaveParams& params, double t_max,
                                             double threshold = 0.01, double scan_dt = 1e-3);

/// Local minima of the node spacing on (t_begin, t_end), located to ~1e-9.
std::vector<double> spacing_minima(const WaveParams& params, double t_begin, double t_end,
                                   double scan_dt = 1e-3);

/// CSV rows (t, k, x_nod, y_nod, spacing, inclination, d_no) for every valid
/// t on the grid; invalid frames are skipped.
void write_node_csv(std::ostream& out, const WaveParams& params, const std::vector<double>& times,
                    KRange range = {-3, 3});

}  // namespace bohm
