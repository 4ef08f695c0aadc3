#include "bohm/wave.hpp"

#include "bohm/errors.hpp"

#include <cmath>
#include <sstream>

namespace bohm {

namespace {

constexpr Complex I{0.0, 1.0};

// Time-dependent data of the right-displaced coherent state along one axis.
// The left-displaced state has center and momentum negated.
struct Mode {
    double omega;
    double center;      // sqrt(2/w) a0 cos(w t)
    double momentum;    // -sqrt(2 w) a0 sin(w t)
    double phase;       // (a0^2 sin(2 w t) - w t) / 2
    double d_center;
    double d_momentum;
    double d_phase;
    double log_norm;    // log((w/pi)^(1/4))

    Mode(double w, double a0, double t) : omega(w)
    {
        const double c = std::cos(w * t);
        const double s = std::sin(w * t);
        const double amp_x = std::sqrt(2.0 / w) * a0;
        const double amp_p = std::sqrt(2.0 * w) * a0;
        center = amp_x * c;
        momentum = -amp_p * s;
        phase = 0.5 * (a0 * a0 * std::sin(2.0 * w * t) - w * t);
        d_center = -amp_x * w * s;
        d_momentum = -amp_p * w * c;
        d_phase = 0.5 * (2.0 * w * a0 * a0 * std::cos(2.0 * w * t) - w);
        log_norm = 0.25 * std::log(w / std::numbers::pi);
    }

    static double sign(Branch b) { return b == Branch::right ? 1.0 : -1.0; }

    Complex log_value(Branch b, double q) const
    {
        const double s = sign(b);
        const double dq = q - s * center;
        return {log_norm - 0.5 * omega * dq * dq, s * momentum * q + phase};
    }

    // d log Y / dq
    Complex log_grad(Branch b, double q) const
    {
        const double s = sign(b);
        return {-omega * (q - s * center), s * momentum};
    }

    // d log Y / dt
    Complex log_dt(Branch b, double q) const
    {
        const double s = sign(b);
        return {omega * (q - s * center) * s * d_center, s * d_momentum * q + d_phase};
    }
};

// The two product terms A = Y_R(x) Y_L(y) and B = Y_L(x) Y_R(y).
struct Terms {
    Mode mx;
    Mode my;
    Complex log_a, log_b;
    Complex ga_x, ga_y, gb_x, gb_y;

    Terms(const WaveParams& w, const PhasePoint& p)
        : mx(w.omega_x, w.a0, p.t), my(w.omega_y, w.a0, p.t)
    {
        log_a = mx.log_value(Branch::right, p.x) + my.log_value(Branch::left, p.y);
        log_b = mx.log_value(Branch::left, p.x) + my.log_value(Branch::right, p.y);
        ga_x = mx.log_grad(Branch::right, p.x);
        ga_y = my.log_grad(Branch::left, p.y);
        gb_x = mx.log_grad(Branch::left, p.x);
        gb_y = my.log_grad(Branch::right, p.y);
    }
};

// Weight of the B term in grad Psi / Psi, computed without forming A or B.
struct Mixing {
    Complex w_b;
    double cancellation;
};

Mixing mix(double c1, double c2, Complex log_ratio)
{
    if (c2 == 0.0) return {0.0, 1.0};
    if (c1 == 0.0) return {1.0, 1.0};
    if (log_ratio.real() <= 0.0) {
        const Complex r = std::exp(log_ratio);
        const Complex den = c1 + c2 * r;
        return {c2 * r / den, std::abs(den) / (std::abs(c1) + std::abs(c2) * std::abs(r))};
    }
    const Complex s = std::exp(-log_ratio);
    const Complex den = c1 * s + c2;
    return {c2 / den, std::abs(den) / (std::abs(c1) * std::abs(s) + std::abs(c2))};
}

// Position-independent pieces of the fast velocity path.
struct FlowFrame {
    double px;      // momentum of Y_R(x)
    double py;      // momentum of Y_R(y)
    Complex delta_x;  // d log A/dx - d log B/dx
    Complex delta_y;
    Complex slope_x;  // log(B/A) is linear in (x, y)
    Complex slope_y;

    FlowFrame(const WaveParams& w, double t)
    {
        const double cx = std::cos(w.omega_x * t), sx = std::sin(w.omega_x * t);
        const double cy = std::cos(w.omega_y * t), sy = std::sin(w.omega_y * t);
        const double xc = std::sqrt(2.0 / w.omega_x) * w.a0 * cx;
        const double yc = std::sqrt(2.0 / w.omega_y) * w.a0 * cy;
        px = -std::sqrt(2.0 * w.omega_x) * w.a0 * sx;
        py = -std::sqrt(2.0 * w.omega_y) * w.a0 * sy;
        delta_x = Complex{2.0 * w.omega_x * xc, 2.0 * px};
        delta_y = Complex{-2.0 * w.omega_y * yc, -2.0 * py};
        slope_x = -delta_x;
        slope_y = -delta_y;
    }

    Complex log_ratio(double x, double y) const { return slope_x * x + slope_y * y; }
};

double rel_residual(const WaveParams& w, const PhasePoint& p, const OscillatorFrequencies& h)
{
    const Terms tr(w, p);
    const double potential =
        0.5 * (h.omega_x * h.omega_x * p.x * p.x + h.omega_y * h.omega_y * p.y * p.y);
    auto term_error = [&](Complex gx, Complex gy, Complex dt_log) {
        const Complex kinetic = -0.5 * ((gx * gx - w.omega_x) + (gy * gy - w.omega_y));
        return I * dt_log - (kinetic + potential);
    };
    const Complex dta = tr.mx.log_dt(Branch::right, p.x) + tr.my.log_dt(Branch::left, p.y);
    const Complex dtb = tr.mx.log_dt(Branch::left, p.x) + tr.my.log_dt(Branch::right, p.y);
    const Complex ea = term_error(tr.ga_x, tr.ga_y, dta);
    const Complex eb = term_error(tr.gb_x, tr.gb_y, dtb);

    const double shift = std::max(tr.log_a.real(), tr.log_b.real());
    const Complex a = w.c1 * std::exp(tr.log_a - shift);
    const Complex b = w.c2 * std::exp(tr.log_b - shift);
    const double scale = std::abs(a) + std::abs(b);
    if (scale == 0.0) return 0.0;
    return std::abs(a * ea + b * eb) / scale;
}

}  // namespace

WaveParams WaveParams::from_c2(double c2)
{
    WaveParams p;
    p.c2 = c2;
    p.c1 = std::sqrt(std::max(0.0, 1.0 - c2 * c2));
    return p;
}

int WaveParams::parity() const noexcept
{
    const double s = c1 * c2;
    return (s > 0.0) - (s < 0.0);
}

void WaveParams::validate() const
{
    const double norm = c1 * c1 + c2 * c2;
    if (!(std::abs(norm - 1.0) <= 1e-12)) {
        std::ostringstream os;
        os << "c1^2 + c2^2 = " << norm << ", expected 1";
        throw InvalidArgument(os.str());
    }
    if (!(a0 > 0.0)) throw InvalidArgument("a0 must be positive");
    if (!(omega_x > 0.0) || !(omega_y > 0.0)) throw InvalidArgument("frequencies must be positive");
}

double product_peak_density(const WaveParams& params) noexcept
{
    return std::sqrt(params.omega_x * params.omega_y) / std::numbers::pi;
}

Complex eval_component(const WaveParams& params, Branch which, Axis axis, double coord, double t)
{
    const double w = axis == Axis::x ? params.omega_x : params.omega_y;
    return std::exp(Mode(w, params.a0, t).log_value(which, coord));
}

Complex eval_psi(const WaveParams& params, const PhasePoint& p)
{
    const Terms tr(params, p);
    return params.c1 * std::exp(tr.log_a) + params.c2 * std::exp(tr.log_b);
}

double density(const WaveParams& params, const PhasePoint& p)
{
    return std::norm(eval_psi(params, p));
}

std::pair<Complex, Complex> eval_psi_gradient(const WaveParams& params, const PhasePoint& p)
{
    const Terms tr(params, p);
    const Complex a = params.c1 * std::exp(tr.log_a);
    const Complex b = params.c2 * std::exp(tr.log_b);
    return {a * tr.ga_x + b * tr.gb_x, a * tr.ga_y + b * tr.gb_y};
}

Complex eval_psi_time_derivative(const WaveParams& params, const PhasePoint& p)
{
    const Terms tr(params, p);
    const Complex dta = tr.mx.log_dt(Branch::right, p.x) + tr.my.log_dt(Branch::left, p.y);
    const Complex dtb = tr.mx.log_dt(Branch::left, p.x) + tr.my.log_dt(Branch::right, p.y);
    return params.c1 * std::exp(tr.log_a) * dta + params.c2 * std::exp(tr.log_b) * dtb;
}

std::optional<VelocityVector> guided_velocity(const WaveParams& params, const PhasePoint& p)
{
    const FlowFrame f(params, p.t);
    const Mixing m = mix(params.c1, params.c2, f.log_ratio(p.x, p.y));
    if (!(m.cancellation * m.cancellation >= singularity_floor)) return std::nullopt;
    return VelocityVector{f.px - std::imag(m.w_b * f.delta_x),
                          -f.py - std::imag(m.w_b * f.delta_y)};
}

std::optional<FlowSample> guided_flow(const WaveParams& params, const PhasePoint& p)
{
    const FlowFrame f(params, p.t);
    const Mixing m = mix(params.c1, params.c2, f.log_ratio(p.x, p.y));
    if (!(m.cancellation * m.cancellation >= singularity_floor)) return std::nullopt;
    FlowSample out;
    out.v = {f.px - std::imag(m.w_b * f.delta_x), -f.py - std::imag(m.w_b * f.delta_y)};
    // Hessian of the phase: Im(w_A w_B delta_i delta_j)
    const Complex ww = (1.0 - m.w_b) * m.w_b;
    out.jacobian.xx = std::imag(ww * f.delta_x * f.delta_x);
    out.jacobian.xy = std::imag(ww * f.delta_x * f.delta_y);
    out.jacobian.yy = std::imag(ww * f.delta_y * f.delta_y);
    out.cancellation = m.cancellation;
    return out;
}

VelocityVector velocity(const WaveParams& params, const PhasePoint& p)
{
    const double rho = density(params, p);
    if (!(rho >= singularity_floor)) {
        std::ostringstream os;
        os << "|Psi|^2 = " << rho << " at (" << p.x << ", " << p.y << ", t=" << p.t << ")";
        throw NearNodeSingularity(os.str());
    }
    auto v = guided_velocity(params, p);
    if (!v) throw NearNodeSingularity("product terms cancel at evaluation point");
    return *v;
}

double relative_amplitude(const WaveParams& params, const PhasePoint& p)
{
    const FlowFrame f(params, p.t);
    return mix(params.c1, params.c2, f.log_ratio(p.x, p.y)).cancellation;
}

VelocityJacobian velocity_jacobian(const WaveParams& params, const PhasePoint& p)
{
    auto f = guided_flow(params, p);
    if (!f) throw NearNodeSingularity("Jacobian requested on a node");
    return f->jacobian;
}

std::pair<BlobCenter, BlobCenter> blob_centers(const WaveParams& params, double t)
{
    const double xc = std::sqrt(2.0 / params.omega_x) * params.a0 * std::cos(params.omega_x * t);
    const double yc = -std::sqrt(2.0 / params.omega_y) * params.a0 * std::cos(params.omega_y * t);
    return {BlobCenter{xc, yc, BlobKind::main}, BlobCenter{-xc, -yc, BlobKind::secondary}};
}

double origin_distance(const WaveParams& params, double t)
{
    const double cx = std::cos(params.omega_x * t);
    const double cy = std::cos(params.omega_y * t);
    return std::sqrt(2.0 / (params.omega_x * params.omega_y)) * params.a0 *
           std::sqrt(params.omega_y * cx * cx + params.omega_x * cy * cy);
}

std::array<double, 2> blob_top_residual(const WaveParams& params, double t)
{
    const auto [main, secondary] = blob_centers(params, t);
    const PhasePoint p{main.x, main.y, t};
    const Complex psi = eval_psi(params, p);
    const auto [dx, dy] = eval_psi_gradient(params, p);
    return {2.0 * std::real(std::conj(psi) * dx), 2.0 * std::real(std::conj(psi) * dy)};
}

double schrodinger_residual(const WaveParams& params, const PhasePoint& p)
{
    return rel_residual(params, p, {params.omega_x, params.omega_y});
}

double schrodinger_residual(const WaveParams& params, const PhasePoint& p,
                            const OscillatorFrequencies& hamiltonian)
{
    return rel_residual(params, p, hamiltonian);
}

}  // namespace bohm
