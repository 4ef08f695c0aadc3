#include "bohm/nodes.hpp"

#include "bohm/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace bohm {

namespace {

double log_ratio(const WaveParams& w)
{
    return std::log(std::abs(w.c1 / w.c2));
}

void require_nodes(const WaveParams& w)
{
    if (w.c1 == 0.0 || w.c2 == 0.0) throw NoNodes("product state has no nodal lattice");
}

double lattice_sine(const WaveParams& w, double t)
{
    return std::sin((w.omega_x - w.omega_y) * t);
}

bool at_infinity(double s)
{
    return std::abs(s) < nodes_at_infinity_window;
}

int first_k(int lo, NodeParity parity)
{
    const bool odd = parity == NodeParity::odd;
    const bool lo_odd = (lo % 2) != 0;
    return lo_odd == odd ? lo : lo + 1;
}

NodeParity lattice_parity(const WaveParams& w)
{
    return w.parity() > 0 ? NodeParity::odd : NodeParity::even;
}

// Golden-section minimization of f on [a, b].
template <class F>
double golden_min(F f, double a, double b, double tol = 1e-10)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d, d = c, fd = fc;
            c = b - g * (b - a), fc = f(c);
        } else {
            a = c, c = d, fc = fd;
            d = a + g * (b - a), fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double spacing_value(const WaveParams& w, double t)
{
    const double s = lattice_sine(w, t);
    const double cx = std::cos(w.omega_x * t), cy = std::cos(w.omega_y * t);
    return std::numbers::pi / (w.a0 * std::abs(s)) *
           std::sqrt((w.omega_x * cx * cx + w.omega_y * cy * cy) / (2.0 * w.omega_x * w.omega_y));
}

}  // namespace

PhasePoint node_position(const WaveParams& params, double t, int k)
{
    require_nodes(params);
    const double s = lattice_sine(params, t);
    const double L = log_ratio(params);
    const double kp = k * std::numbers::pi;
    const double wx = params.omega_x, wy = params.omega_y;
    const double x = std::numbers::sqrt2 * (kp * std::cos(wy * t) + L * std::sin(wy * t)) /
                     (4.0 * std::sqrt(wx) * params.a0 * s);
    const double y = std::numbers::sqrt2 * (kp * std::cos(wx * t) + L * std::sin(wx * t)) /
                     (4.0 * std::sqrt(wy) * params.a0 * s);
    return {x, y, t};
}

VelocityVector node_velocity(const WaveParams& params, double t, int k)
{
    require_nodes(params);
    const double wx = params.omega_x, wy = params.omega_y, om = wx - wy;
    const double s = std::sin(om * t), ds = om * std::cos(om * t);
    const double L = log_ratio(params);
    const double kp = k * std::numbers::pi;
    // d/dt [ (kp cos(w t) + L sin(w t)) / s ]
    auto rate = [&](double w) {
        const double num = kp * std::cos(w * t) + L * std::sin(w * t);
        const double dnum = w * (-kp * std::sin(w * t) + L * std::cos(w * t));
        return (dnum * s - num * ds) / (s * s);
    };
    return {std::numbers::sqrt2 * rate(wy) / (4.0 * std::sqrt(wx) * params.a0),
            std::numbers::sqrt2 * rate(wx) / (4.0 * std::sqrt(wy) * params.a0)};
}

std::vector<NodalPoint> nodes_at(const WaveParams& params, double t, KRange range)
{
    require_nodes(params);
    if (at_infinity(lattice_sine(params, t))) {
        std::ostringstream os;
        os << "nodes are at infinity at t = " << t;
        throw NodesAtInfinity(os.str());
    }
    const NodeParity parity = lattice_parity(params);
    std::vector<NodalPoint> out;
    for (int k = first_k(range.lo, parity); k <= range.hi; k += 2) {
        NodalPoint n;
        n.k = k;
        n.parity = parity;
        n.position = node_position(params, t, k);
        n.in_window = std::abs(n.position.x) <= node_window && std::abs(n.position.y) <= node_window;
        out.push_back(n);
    }
    return out;
}

NodeLatticeFrame lattice_frame(const WaveParams& params, double t)
{
    require_nodes(params);
    const double wx = params.omega_x, wy = params.omega_y;
    const double cx = std::cos(wx * t), cy = std::cos(wy * t);
    NodeLatticeFrame f;
    f.t = t;
    f.valid = !at_infinity(lattice_sine(params, t));
    f.inclination = cy == 0.0 ? std::copysign(std::numeric_limits<double>::infinity(), cx)
                              : std::sqrt(wx / wy) * cx / cy;
    f.spacing = f.valid ? spacing_value(params, t) : std::numeric_limits<double>::infinity();
    f.origin_distance = std::numbers::sqrt2 * std::abs(log_ratio(params)) /
                        (4.0 * params.a0 * std::sqrt(cx * cx * wx + wy * cy * cy));
    return f;
}

double min_line_distance(const WaveParams& params)
{
    require_nodes(params);
    return std::numbers::sqrt2 * std::abs(log_ratio(params)) /
           (4.0 * params.a0 * std::sqrt(params.omega_x + params.omega_y));
}

double distance_to_node_line(const WaveParams& params, const PhasePoint& p)
{
    if (params.c1 == 0.0 || params.c2 == 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double wx = params.omega_x, wy = params.omega_y;
    const double cx = std::cos(wx * p.t), cy = std::cos(wy * p.t);
    const double nx = -std::sqrt(wx) * cx, ny = std::sqrt(wy) * cy;
    const double offset = log_ratio(params) / (2.0 * std::numbers::sqrt2 * params.a0);
    return (nx * p.x + ny * p.y - offset) / std::hypot(nx, ny);
}

XPoint find_x_point(const WaveParams& params, const NodalPoint& node, const XPointSearch& search)
{
    const double t = node.position.t;
    const NodeLatticeFrame frame = lattice_frame(params, t);
    if (!frame.valid) throw NodesAtInfinity("lattice frame invalid at requested time");

    const VelocityVector drift = node_velocity(params, t, node.k);
    const PhasePoint neighbour = node_position(params, t, node.k + 2 * search.direction);
    const double half_box = search.box_half_side * frame.spacing;

    auto field = [&](double x, double y, double out[2]) {
        const auto v = guided_velocity(params, {x, y, t});
        if (!v) return false;
        out[0] = v->vx - drift.vx;
        out[1] = v->vy - drift.vy;
        return true;
    };
    auto inside = [&](double x, double y) {
        return std::abs(x - node.position.x) <= half_box && std::abs(y - node.position.y) <= half_box;
    };

    double x = 0.5 * (node.position.x + neighbour.x);
    double y = 0.5 * (node.position.y + neighbour.y);
    double u[2];
    if (!field(x, y, u)) throw XPointNotFound("seed point lies on a node");
    double norm = std::hypot(u[0], u[1]);
    const double h = 1e-7 * frame.spacing;

    int it = 0;
    for (; it < search.max_iterations && norm > search.tolerance; ++it) {
        double up[2], um[2], j[2][2];
        if (!field(x + h, y, up) || !field(x - h, y, um)) throw XPointNotFound("hit a node");
        j[0][0] = (up[0] - um[0]) / (2 * h);
        j[1][0] = (up[1] - um[1]) / (2 * h);
        if (!field(x, y + h, up) || !field(x, y - h, um)) throw XPointNotFound("hit a node");
        j[0][1] = (up[0] - um[0]) / (2 * h);
        j[1][1] = (up[1] - um[1]) / (2 * h);
        const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if (det == 0.0 || !std::isfinite(det)) throw XPointNotFound("singular Jacobian");
        const double dx = -(j[1][1] * u[0] - j[0][1] * u[1]) / det;
        const double dy = -(-j[1][0] * u[0] + j[0][0] * u[1]) / det;

        double lambda = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
            const double nx = x + lambda * dx, ny = y + lambda * dy;
            double un[2];
            if (!inside(nx, ny) || !field(nx, ny, un)) continue;
            const double nn = std::hypot(un[0], un[1]);
            if (nn < norm) {
                x = nx, y = ny, u[0] = un[0], u[1] = un[1], norm = nn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (!(norm <= search.tolerance)) {
        std::ostringstream os;
        os << "Newton stopped at |u| = " << norm << " after " << it << " iterations";
        throw XPointNotFound(os.str());
    }

    const auto jac = velocity_jacobian(params, {x, y, t});
    const double mean = 0.5 * (jac.xx + jac.yy);
    const double rad = std::hypot(0.5 * (jac.xx - jac.yy), jac.xy);
    XPoint xp;
    xp.position = {x, y, t};
    xp.paired_node = node.k;
    xp.eigenvalues[0] = mean - rad;
    xp.eigenvalues[1] = mean + rad;
    xp.iterations = it;
    xp.residual = norm;
    if (!(xp.eigenvalues[0] * xp.eigenvalues[1] < 0.0)) {
        std::ostringstream os;
        os << "zero at (" << x << ", " << y << ") has eigenvalues " << xp.eigenvalues[0] << ", "
           << xp.eigenvalues[1];
        throw NotHyperbolic(os.str());
    }
    return xp;
}

double collision_envelope(const WaveParams& params, double t)
{
    const double cx = std::cos(params.omega_x * t), cy = std::cos(params.omega_y * t);
    return std::exp(-8.0 * params.a0 * params.a0 * (cx * cx + cy * cy));
}

double cross_term_amplitude(const WaveParams& params, double t)
{
    const double cx = std::cos(params.omega_x * t), cy = std::cos(params.omega_y * t);
    return std::exp(-4.0 * params.a0 * params.a0 * (cx * cx + cy * cy));
}

std::vector<CollisionEpoch> collision_epochs(const WaveParams& params, double t_max, double threshold,
                                             double scan_dt)
{
    if (!(t_max > 0.0)) throw InvalidArgument("t_max must be positive");
    std::vector<CollisionEpoch> out;
    const auto steps = static_cast<long>(std::ceil(t_max / scan_dt));
    bool open = false;
    CollisionEpoch cur;
    for (long i = 0; i <= steps; ++i) {
        const double t = std::min(t_max, i * scan_dt);
        const double e = collision_envelope(params, t);
        if (e > threshold && !open) {
            open = true;
            cur = {t, t, t, e};
        }
        if (open) {
            if (e > cur.peak_envelope) cur.peak_time = t, cur.peak_envelope = e;
            if (e <= threshold || i == steps) {
                cur.end = t;
                const double lo = std::max(cur.begin, cur.peak_time - scan_dt);
                const double hi = std::min(cur.end, cur.peak_time + scan_dt);
                cur.peak_time = golden_min([&](double s) { return -collision_envelope(params, s); }, lo, hi);
                cur.peak_envelope = collision_envelope(params, cur.peak_time);
                out.push_back(cur);
                open = false;
            }
        }
    }
    return out;
}

std::vector<double> spacing_minima(const WaveParams& params, double t_begin, double t_end, double scan_dt)
{
    require_nodes(params);
    std::vector<double> out;
    auto value = [&](double t) {
        const double s = lattice_sine(params, t);
        return at_infinity(s) ? std::numeric_limits<double>::infinity() : spacing_value(params, t);
    };
    double prev = value(t_begin), cur = value(t_begin + scan_dt);
    for (double t = t_begin + scan_dt; t + scan_dt <= t_end; t += scan_dt) {
        const double next = value(t + scan_dt);
        if (std::isfinite(cur) && cur < prev && cur <= next)
            out.push_back(golden_min(value, t - scan_dt, t + scan_dt, 1e-11));
        prev = cur;
        cur = next;
    }
    return out;
}

void write_node_csv(std::ostream& out, const WaveParams& params, const std::vector<double>& times,
                    KRange range)
{
    out << "t,k,x_nod,y_nod,spacing,inclination,d_no\n";
    out.precision(17);
    for (double t : times) {
        const NodeLatticeFrame f = lattice_frame(params, t);
        if (!f.valid) continue;
        for (const auto& n : nodes_at(params, t, range)) {
            out << t << ',' << n.k << ',' << n.position.x << ',' << n.position.y << ',' << f.spacing << ','
                << f.inclination << ',' << f.origin_distance << '\n';
        }
    }
}

}  // namespace bohm
