#pragma once

// Numerical oracles for the landscape: finite-difference gradients, seam
// scans, stationary-point probes, a sampled global-minimum check and a
// gradient Lipschitz probe.
//
// The checks are templates over a model exposing params(), value(Point),
// gradient(Point) and, for seam_scan, evaluate(Point) and
// evaluate_in(RegionId, Point). Landscape satisfies all of them; tests wrap
// it to inject faults.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "staircase/landscape.hpp"

namespace staircase {

struct Witness {
    Point point;
    std::string where;
    double error = 0.0;
};

struct CheckReport {
    std::string name;
    long samples = 0;
    double worst_error = 0.0;
    double threshold = 0.0;
    bool passed = true;
    std::vector<Witness> witnesses;  // worst first
    std::vector<std::pair<std::string, double>> stats;
    std::vector<CheckReport> parts;

    double stat(const std::string& key) const {
        for (const auto& [k, v] : stats)
            if (k == key) return v;
        throw std::out_of_range("CheckReport: no stat " + key);
    }
};

namespace detail {

inline std::string describe(RegionId r) {
    if (r.outside()) return "Outside";
    return std::string(to_string(r.kind)) + " " + std::to_string(r.index);
}

// Keeps the `capacity` largest errors seen so far.
class WorstTracker {
public:
    explicit WorstTracker(std::size_t capacity = 5) : capacity_(capacity) {}

    void offer(Point p, double error, const std::string& where) {
        if (std::isnan(error)) error = INFINITY;
        worst_ = std::max(worst_, error);
        if (witnesses_.size() == capacity_ && error <= witnesses_.back().error) return;
        const auto pos = std::find_if(witnesses_.begin(), witnesses_.end(),
                                      [&](const Witness& w) { return w.error < error; });
        witnesses_.insert(pos, {p, where, error});
        if (witnesses_.size() > capacity_) witnesses_.pop_back();
    }

    double worst() const { return worst_; }
    std::vector<Witness> take() { return std::move(witnesses_); }

private:
    std::size_t capacity_;
    double worst_ = 0.0;
    std::vector<Witness> witnesses_;
};

inline CheckReport finish(std::string name, long samples, WorstTracker& tracker,
                          double threshold) {
    CheckReport r;
    r.name = std::move(name);
    r.samples = samples;
    r.worst_error = tracker.worst();
    r.threshold = threshold;
    r.passed = r.worst_error <= threshold;
    r.witnesses = tracker.take();
    return r;
}

// Distance from `p` to the nearest line where the owning piece changes
// formula: the region's edges and its branch line.
inline double distance_to_seams(const Landscape& land, RegionId r, Point p) {
    const BlockGeometry g = block_geometry(land.params(), r);
    double d = std::min({p.x1 - g.bounds.x1_min, g.bounds.x1_max - p.x1, p.x2 - g.bounds.x2_min,
                         g.bounds.x2_max - p.x2});
    const Point off = p - g.center;
    const int travel = travel_axis(r, land.params().n_blocks());
    if (is_saddle_block(r.kind)) d = std::min(d, std::abs(travel == 0 ? off.x1 : off.x2));
    if (is_buffer(r.kind)) d = std::min(d, std::abs(travel == 0 ? off.x2 : off.x1));
    return d;
}

template <class Rng>
Point uniform_in(const Rect& rect, Rng& rng) {
    std::uniform_real_distribution<double> u1(rect.x1_min, rect.x1_max);
    std::uniform_real_distribution<double> u2(rect.x2_min, rect.x2_max);
    const double a = u1(rng);
    return {a, u2(rng)};
}

// Uniform point of D; every region has the same area.
template <class Rng>
std::pair<RegionId, Point> uniform_in_domain(const LandscapeParams& params, Rng& rng) {
    std::uniform_int_distribution<int> pick(0, params.n_regions() - 1);
    const RegionId r = region_at(params, pick(rng));
    return {r, uniform_in(block_geometry(params, r).bounds, rng)};
}

inline double gradient_scale(const LandscapeParams& params, Point g) {
    return std::max(norm(g), params.L * params.tau);
}

}  // namespace detail

/// Central differences with step `h` along each axis.
template <class Model>
Point fd_gradient(const Model& model, Point p, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
    const auto& params = model.params();
    const Point e1{h, 0.0}, e2{0.0, h};
    for (Point q : {p + e1, p - e1, p + e2, p - e2})
        if (classify(params, q).outside())
            throw DomainError("fd_gradient: neighbour (" + std::to_string(q.x1) + ", " +
                              std::to_string(q.x2) + ") outside D");
    return {(model.value(p + e1) - model.value(p - e1)) / (2.0 * h),
            (model.value(p + e2) - model.value(p - e2)) / (2.0 * h)};
}

inline Point fd_gradient(const LandscapeParams& params, Point p, double h) {
    return fd_gradient(Landscape(params), p, h);
}

struct GradientCheckOptions {
    long n_samples = 10'000;
    double h_rel = 1e-5;  // step is h_rel * tau
    double tol = 1e-6;
    std::uint64_t seed = 0;
};

/// Analytic vs central-difference gradient at points of D that stay more
/// than 10 h away from every seam. Error is ||g - g_fd|| / max(||g||, L tau).
template <class Model>
CheckReport gradient_check(const Model& model, const GradientCheckOptions& opt = {}) {
    const LandscapeParams& params = model.params();
    const Landscape geometry(params);
    const double h = opt.h_rel * params.tau;
    const double margin = 10.0 * h;
    std::mt19937_64 rng(opt.seed);
    detail::WorstTracker worst;
    for (long i = 0; i < opt.n_samples;) {
        const auto [r, p] = detail::uniform_in_domain(params, rng);
        if (detail::distance_to_seams(geometry, r, p) <= margin) continue;
        ++i;
        const Point g = model.gradient(p);
        const Point g_fd = fd_gradient(model, p, h);
        worst.offer(p, norm(g - g_fd) / detail::gradient_scale(params, g), detail::describe(r));
    }
    return detail::finish("gradient_check", opt.n_samples, worst, opt.tol);
}

/// A line across which the owning formula changes.
struct Seam {
    std::string label;
    Point start, end;   // segment on the seam
    Point normal;       // unit normal, pointing along the chain / cross axis
    std::optional<std::pair<RegionId, RegionId>> neighbours;  // region edges only
};

/// Every interior seam: block/buffer edges, the escape-axis branch line of
/// each saddle block, and the cross-axis branch line of each buffer whose
/// blend splits by side.
inline std::vector<Seam> interior_seams(const LandscapeParams& params) {
    std::vector<Seam> seams;
    const int n = params.n_blocks();
    auto unit = [](int axis) { return axis == 0 ? Point{1.0, 0.0} : Point{0.0, 1.0}; };
    for (const RegionId r : all_regions(params)) {
        const BlockGeometry g = block_geometry(params, r);
        const Rect& b = g.bounds;
        const int travel = travel_axis(r, n);
        const std::string name = detail::describe(r);
        if (is_saddle_block(r.kind)) {
            if (travel == 0)
                seams.push_back({name + " branch line", {g.center.x1, b.x2_min},
                                 {g.center.x1, b.x2_max}, unit(0), std::nullopt});
            else
                seams.push_back({name + " branch line", {b.x1_min, g.center.x2},
                                 {b.x1_max, g.center.x2}, unit(1), std::nullopt});
        }
        if (!is_buffer(r.kind)) continue;
        const RegionId before = region_at(params, r.order - 1);
        const RegionId after = region_at(params, r.order + 1);
        if (travel == 0) {
            seams.push_back({name + " entry", {b.x1_min, b.x2_min}, {b.x1_min, b.x2_max}, unit(0),
                             std::pair{before, r}});
            seams.push_back({name + " exit", {b.x1_max, b.x2_min}, {b.x1_max, b.x2_max}, unit(0),
                             std::pair{r, after}});
            if (r.index + 1 < n)
                seams.push_back({name + " branch line", {b.x1_min, g.center.x2},
                                 {b.x1_max, g.center.x2}, unit(1), std::nullopt});
        } else {
            seams.push_back({name + " entry", {b.x1_min, b.x2_min}, {b.x1_max, b.x2_min}, unit(1),
                             std::pair{before, r}});
            seams.push_back({name + " exit", {b.x1_min, b.x2_max}, {b.x1_max, b.x2_max}, unit(1),
                             std::pair{r, after}});
            if (r.index + 1 < n)
                seams.push_back({name + " branch line", {g.center.x1, b.x2_min},
                                 {g.center.x1, b.x2_max}, unit(0), std::nullopt});
        }
    }
    return seams;
}

struct SeamScanOptions {
    long samples_per_seam = 1000;
    double tol_value = 1e-9;
    double tol_grad = 1e-5;
    double offset_rel = 1e-7;  // seam offset is offset_rel * tau
    std::uint64_t seed = 0;
};

/// Continuity and differentiability across every interior seam.
///
/// Value jump: both one-sided samples at +-delta are extrapolated to the seam
/// with their own gradients and compared, relative to max(1, |f|); on region
/// edges the two neighbouring formulas are also evaluated on the seam itself.
/// Gradient jump: one-sided gradients, the two formulas on the seam, and the
/// central difference straddling the seam against the analytic normal
/// derivative, relative to max(||g||, L tau).
template <class Model>
CheckReport seam_scan(const Model& model, const SeamScanOptions& opt = {}) {
    const LandscapeParams& params = model.params();
    const double delta = opt.offset_rel * params.tau;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> along(0.0, 1.0);
    detail::WorstTracker value_worst, grad_worst;
    long samples = 0;
    const auto dot = [](Point a, Point b) { return a.x1 * b.x1 + a.x2 * b.x2; };

    for (const Seam& seam : interior_seams(params)) {
        for (long i = 0; i < opt.samples_per_seam; ++i) {
            ++samples;
            const double s = along(rng);
            const Point q = seam.start + s * (seam.end - seam.start);
            const Point lo = q - delta * seam.normal;
            const Point hi = q + delta * seam.normal;
            const Evaluation e_lo = model.evaluate(lo);
            const Evaluation e_hi = model.evaluate(hi);
            const Evaluation e_q = model.evaluate(q);
            const double vscale = std::max(1.0, std::abs(e_q.value));
            const double gscale = detail::gradient_scale(params, e_q.gradient);

            const double to_seam_lo = e_lo.value + delta * dot(e_lo.gradient, seam.normal);
            const double to_seam_hi = e_hi.value - delta * dot(e_hi.gradient, seam.normal);
            double vjump = std::abs(to_seam_lo - to_seam_hi) / vscale;
            double gjump = norm(e_lo.gradient - e_hi.gradient) / gscale;

            const double fd = (e_hi.value - e_lo.value) / (2.0 * delta);
            gjump = std::max(gjump, std::abs(fd - dot(e_q.gradient, seam.normal)) / gscale);

            if (seam.neighbours) {
                const Evaluation a = model.evaluate_in(seam.neighbours->first, q);
                const Evaluation b = model.evaluate_in(seam.neighbours->second, q);
                vjump = std::max(vjump, std::abs(a.value - b.value) / vscale);
                gjump = std::max(gjump, norm(a.gradient - b.gradient) / gscale);
            }
            value_worst.offer(q, vjump, seam.label);
            grad_worst.offer(q, gjump, seam.label);
        }
    }

    CheckReport value = detail::finish("seam_value_jump", samples, value_worst, opt.tol_value);
    CheckReport grad = detail::finish("seam_gradient_jump", samples, grad_worst, opt.tol_grad);
    CheckReport r;
    r.name = "seam_scan";
    r.samples = samples;
    // Combined error is the larger of the two jumps in units of their tolerances.
    r.worst_error = std::max(value.worst_error / opt.tol_value, grad.worst_error / opt.tol_grad);
    r.threshold = 1.0;
    r.passed = value.passed && grad.passed;
    r.witnesses = value.passed && !grad.passed ? grad.witnesses : value.witnesses;
    r.stats = {{"seams", static_cast<double>(interior_seams(params).size())},
               {"worst_value_jump", value.worst_error},
               {"worst_gradient_jump", grad.worst_error}};
    r.parts = {std::move(value), std::move(grad)};
    return r;
}

struct StationaryOptions {
    int probes = 64;
    double radius_rel = 1e-3;  // probe radius is radius_rel * tau
};

/// Zero gradient and saddle signature at every saddle center, strict local
/// minimum at the final center.
template <class Model>
CheckReport stationary_check(const Model& model, const StationaryOptions& opt = {}) {
    const LandscapeParams& params = model.params();
    const double radius = opt.radius_rel * params.tau;
    detail::WorstTracker failures;
    int saddles = 0, minima = 0, failed = 0;
    long samples = 0;
    for (int i = 1; i <= params.n_blocks(); ++i) {
        const RegionId r = region_at(params, 2 * (i - 1));
        const Point c = block_geometry(params, r).center;
        const Point g = model.gradient(c);
        const double fc = model.value(c);
        bool lower = false, higher = false, all_higher = true;
        for (int k = 0; k < opt.probes; ++k) {
            const double angle = 2.0 * std::numbers::pi * (k + 0.5) / opt.probes;
            const double f = model.value({c.x1 + radius * std::cos(angle),
                                          c.x2 + radius * std::sin(angle)});
            lower |= f < fc;
            higher |= f > fc;
            all_higher &= f > fc;
            ++samples;
        }
        const bool zero = g.x1 == 0.0 && g.x2 == 0.0;
        const bool ok = r.kind == RegionKind::FinalBlock ? zero && all_higher : zero && lower && higher;
        if (ok) {
            (r.kind == RegionKind::FinalBlock ? minima : saddles) += 1;
        } else {
            ++failed;
            failures.offer(c, 1.0 + norm(g), detail::describe(r));
        }
    }
    CheckReport rep;
    rep.name = "stationary_check";
    rep.samples = samples;
    rep.worst_error = failed;
    rep.threshold = 0.0;
    rep.passed = failed == 0;
    rep.witnesses = failures.take();
    rep.stats = {{"saddles_confirmed", static_cast<double>(saddles)},
                 {"minima_confirmed", static_cast<double>(minima)}};
    return rep;
}

/// f at uniform points of D never drops below the final block's center value,
/// and only the center itself reaches it.
template <class Model>
CheckReport global_min_probe(const Model& model, long n_points = 1'000'000,
                             std::uint64_t seed = 0) {
    const LandscapeParams& params = model.params();
    const RegionId final_block = region_at(params, params.n_regions() - 1);
    const Point c = block_geometry(params, final_block).center;
    const double f_min = model.value(c);
    std::mt19937_64 rng(seed);
    detail::WorstTracker worst;
    double closest = INFINITY;
    for (long i = 0; i < n_points; ++i) {
        const auto [r, p] = detail::uniform_in_domain(params, rng);
        const double f = model.value(p);
        closest = std::min(closest, f - f_min);
        // Violation: at or below the minimum anywhere but the center.
        if (f <= f_min && !(p == c)) worst.offer(p, f_min - f + 1e-300, detail::describe(r));
    }
    CheckReport rep = detail::finish("global_min_probe", n_points, worst, 0.0);
    rep.stats = {{"f_min", f_min}, {"closest_gap", closest}};
    return rep;
}

struct LipschitzEstimate {
    double estimate = 0.0;
    double analytic_bound = 0.0;
    long pairs = 0;
    Point worst_a, worst_b;
};

/// Documented bound on the gradient Lipschitz constant: the steepest
/// quadratic branch plus the quintic blend's cross term.
inline double lipschitz_bound(const LandscapeParams& params) {
    const double L2 = 4.0 * params.L;
    const double half = 0.5 * params.tau;
    return 2.0 * L2 + 30.0 * (L2 + params.gamma) * half * half / params.tau;
}

/// Largest ||grad f(x) - grad f(y)|| / ||x - y|| over random pairs sharing a
/// region. `only` restricts sampling to regions of one kind.
template <class Model>
LipschitzEstimate lipschitz_probe(const Model& model, long n_pairs, std::uint64_t seed = 0,
                                  std::optional<RegionKind> only = std::nullopt) {
    if (n_pairs < 1) throw std::invalid_argument("lipschitz_probe: n_pairs must be >= 1");
    const LandscapeParams& params = model.params();
    std::vector<RegionId> pool;
    for (const RegionId r : all_regions(params))
        if (!only || r.kind == *only) pool.push_back(r);
    if (pool.empty()) throw std::invalid_argument("lipschitz_probe: no region of requested kind");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    LipschitzEstimate est;
    est.analytic_bound = lipschitz_bound(params);
    for (long i = 0; i < n_pairs; ++i) {
        const RegionId r = pool[pick(rng)];
        const Rect rect = block_geometry(params, r).bounds;
        const Point a = detail::uniform_in(rect, rng);
        const Point b = detail::uniform_in(rect, rng);
        ++est.pairs;
        const double dist = norm(a - b);
        if (dist == 0.0) continue;
        const double ratio = norm(model.gradient(a) - model.gradient(b)) / dist;
        if (ratio > est.estimate) {
            est.estimate = ratio;
            est.worst_a = a;
            est.worst_b = b;
        }
    }
    return est;
}

inline CheckReport to_report(const LipschitzEstimate& est) {
    CheckReport rep;
    rep.name = "lipschitz_probe";
    rep.samples = est.pairs;
    rep.worst_error = est.estimate;
    rep.threshold = est.analytic_bound;
    rep.passed = est.estimate <= est.analytic_bound;
    rep.witnesses = {{est.worst_a, "pair start", est.estimate}, {est.worst_b, "pair end", est.estimate}};
    rep.stats = {{"estimate", est.estimate}, {"analytic_bound", est.analytic_bound}};
    return rep;
}

}  // namespace staircase
