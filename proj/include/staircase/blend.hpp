#pragma once

// One-dimensional building blocks of the buffer regions: the quadratic
// travel profile g1, the quintic cross-curvature blend g2, the cubic Hermite
// interpolant they are modelled on, and the periodic floor [x]_period.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "staircase/params.hpp"

namespace staircase {

struct ValueSlope {
    double value = 0.0;
    double slope = 0.0;
};

/// Largest multiple of `period` that is no larger than `x`.
inline double local_offset(double x, double period) {
    if (!(period > 0.0)) throw std::invalid_argument("local_offset: period must be positive");
    return std::floor(x / period) * period;
}

/// Coefficients of p(y) = c0 + c1 (y - y0) + c2 (y - y0)^2 + c3 (y - y0)^3
/// matching value and slope at both ends of [y0, y1].
struct HermiteCubic {
    std::array<double, 4> c{};
    double y0 = 0.0;

    double operator()(double y) const {
        const double d = y - y0;
        return c[0] + d * (c[1] + d * (c[2] + d * c[3]));
    }
    double derivative(double y) const {
        const double d = y - y0;
        return c[1] + d * (2.0 * c[2] + d * 3.0 * c[3]);
    }
};

inline HermiteCubic hermite_cubic(double f0, double f1, double df0, double df1, double y0,
                                  double y1) {
    const double h = y1 - y0;
    if (h == 0.0) throw std::invalid_argument("hermite_cubic: degenerate interval y0 == y1");
    const double secant = (f1 - f0) / h;
    HermiteCubic p;
    p.y0 = y0;
    p.c[0] = f0;
    p.c[1] = df0;
    p.c[2] = (3.0 * secant - df1 - 2.0 * df0) / h;
    p.c[3] = -(2.0 * secant - df1 - df0) / (h * h);
    return p;
}

/// Entry/exit coefficients of the cross-curvature blend across a buffer.
struct BufferBranch {
    double c1 = 0.0;  // curvature at the entry edge (always L)
    double c2 = 0.0;  // curvature at the exit edge: -gamma, L2, or L before the final block
};

namespace detail {

inline void require_buffer_range(double u, double tau, const char* who) {
    if (!(u >= tau && u <= 2.0 * tau))
        throw std::out_of_range(std::string(who) + ": u=" + std::to_string(u) +
                                " outside [tau, 2tau]");
}

// g1 written around u = tau: g1(tau + s) = -gamma tau^2/4 - gamma tau s + (gamma - L) s^2 / 2.
// Identical to p(u) - p(tau) - gamma tau^2 / 4 with the quadratic p, but without cancellation.
inline ValueSlope g1(double u, double L, double gamma, double tau) {
    const double s = u - tau;
    return {-0.25 * gamma * tau * tau - gamma * tau * s + 0.5 * (gamma - L) * s * s,
            -gamma * tau + (gamma - L) * s};
}

// Quintic smoothstep from c1 at u = tau to c2 at u = 2 tau; flat at both ends.
inline ValueSlope g2(double u, BufferBranch b, double tau) {
    const double s = (u - 2.0 * tau) / tau;  // in [-1, 0]
    const double jump = b.c1 - b.c2;
    const double s3 = s * s * s;
    const double value = b.c2 - jump * s3 * (10.0 + s * (15.0 + 6.0 * s));
    const double one_plus = 1.0 + s;
    const double slope = -30.0 * jump * s * s * one_plus * one_plus / tau;
    return {value, slope};
}

}  // namespace detail

/// Travel profile of every buffer: value and derivative at u in [tau, 2tau].
inline ValueSlope buffer_g1(double u, const LandscapeParams& params) {
    detail::require_buffer_range(u, params.tau, "buffer_g1");
    return detail::g1(u, params.L, params.gamma, params.tau);
}

/// Cross-curvature blend of a buffer: value and derivative at u in [tau, 2tau].
inline ValueSlope buffer_g2(double u, BufferBranch branch, double tau) {
    detail::require_buffer_range(u, tau, "buffer_g2");
    return detail::g2(u, branch, tau);
}

inline DerivedConstants derive_constants(const LandscapeParams& params) {
    params.validate();
    const double tau = params.tau;
    DerivedConstants c;
    c.L2 = 4.0 * params.L;
    // The exit level of the buffer must meet the next block's edge value.
    c.nu = 0.25 * params.L * tau * tau - detail::g1(2.0 * tau, params.L, params.gamma, tau).value;
    c.eta_default = 1.0 / (4.0 * params.L);
    c.lower_bound_base = params.L / params.gamma;
    return c;
}

}  // namespace staircase
