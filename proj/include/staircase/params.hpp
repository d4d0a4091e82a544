#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace staircase {

// Thrown for parameter sets that violate a construction precondition.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when a point (or a neighbour needed to evaluate it) lies outside D.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Point {
    double x1 = 0.0;
    double x2 = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Point operator-(Point a, Point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Point operator*(double s, Point p) { return {s * p.x1, s * p.x2}; }
inline double norm(Point p) { return std::hypot(p.x1, p.x2); }
inline bool is_finite(Point p) { return std::isfinite(p.x1) && std::isfinite(p.x2); }

/// User-facing shape of the staircase.
///
/// `L` is the curvature of the contracting directions, `gamma` the curvature
/// of the escape direction, `tau` the side of every block and buffer square.
/// The chain holds `n_saddles` saddle blocks followed by one final block.
struct LandscapeParams {
    double L = 1.0;
    double gamma = 0.5;
    double tau = 1.0;
    int n_saddles = 9;

    int n_blocks() const { return n_saddles + 1; }
    int n_regions() const { return 2 * n_blocks() - 1; }

    void validate() const {
        if (!(std::isfinite(L) && L > 0.0))
            throw ParameterError("L must be positive, got " + std::to_string(L));
        if (!(std::isfinite(gamma) && gamma > 0.0))
            throw ParameterError("gamma must be positive, got " + std::to_string(gamma));
        if (!(std::isfinite(tau) && tau > 0.0))
            throw ParameterError("tau must be positive, got " + std::to_string(tau));
        if (L < gamma)
            throw ParameterError("L >= gamma required, got L=" + std::to_string(L) +
                                 " gamma=" + std::to_string(gamma));
        if (n_saddles < 1)
            throw ParameterError("n_saddles >= 1 required, got " + std::to_string(n_saddles));
    }
};

struct DerivedConstants {
    double L2 = 0.0;           // wrong-side curvature, 4L
    double nu = 0.0;           // per-block drop in level
    double eta_default = 0.0;  // 1/(4L); eta * L2 == 1
    double lower_bound_base = 0.0;  // L/gamma
};

}  // namespace staircase
