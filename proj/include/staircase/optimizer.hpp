#pragma once

// Plain and noisy gradient descent on the staircase.

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "staircase/landscape.hpp"

namespace staircase {

struct GdConfig {
    std::optional<double> eta;  // unset: 1/(4L)
    long max_iter = 1'000'000;
    double stop_grad_norm = 1e-10;
    long record_every = 1;

    double step_size(const DerivedConstants& c) const { return eta ? *eta : c.eta_default; }

    void validate() const {
        if (eta && !(*eta > 0.0)) throw ParameterError("eta must be positive");
        if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
        if (record_every < 1) throw ParameterError("record_every must be >= 1");
    }
};

struct NoiseConfig {
    double variance = 0.1;  // per coordinate
    std::uint64_t seed = 0;
    bool scale_by_eta = false;  // add eta * zeta instead of zeta

    void validate() const {
        if (!(variance >= 0.0)) throw ParameterError("noise variance must be >= 0");
    }
};

enum class Event { None, BlockEntry, BufferEntry, Projected, Stalled, Converged, LeftDomain };

inline std::string_view to_string(Event e) {
    switch (e) {
        case Event::None: return "";
        case Event::BlockEntry: return "BlockEntry";
        case Event::BufferEntry: return "BufferEntry";
        case Event::Projected: return "Projected";
        case Event::Stalled: return "Stalled";
        case Event::Converged: return "Converged";
        case Event::LeftDomain: return "LeftDomain";
    }
    return "?";
}

enum class Outcome { ReachedMinimum, Budget, Stalled, LeftDomain };

inline std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::ReachedMinimum: return "ReachedMinimum";
        case Outcome::Budget: return "Budget";
        case Outcome::Stalled: return "Stalled";
        case Outcome::LeftDomain: return "LeftDomain";
    }
    return "?";
}

struct Iterate {
    long t = 0;
    Point position;
    Point offset;  // from the center of `region`
    double f_value = 0.0;
    double grad_norm = 0.0;
    RegionId region;
    Event event = Event::None;
};

struct Trajectory {
    LandscapeParams params;
    GdConfig config;
    std::optional<NoiseConfig> noise;
    std::vector<Iterate> iterates;
    Outcome outcome = Outcome::Budget;
    long total_iters = 0;                   // index of the last iterate
    std::optional<long> final_block_entry;  // first t inside the final block
};

/// Start point in B1 with |x1 - s1| uniform on (0, tau/(2e^2)] and x2 uniform
/// across the block.
template <class Rng>
Point init_sample(const LandscapeParams& params, Rng& rng) {
    params.validate();
    const double tau = params.tau;
    const double band = tau / (2.0 * std::exp(2.0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double magnitude = band * (1.0 - unit(rng));  // (0, band]
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    const double x2 = tau * unit(rng);
    return {0.5 * tau + sign * magnitude, x2};
}

namespace detail {

inline bool bitwise_equal(const LocalPoint& a, const LocalPoint& b) {
    return a.region == b.region &&
           std::bit_cast<std::uint64_t>(a.offset.x1) == std::bit_cast<std::uint64_t>(b.offset.x1) &&
           std::bit_cast<std::uint64_t>(a.offset.x2) == std::bit_cast<std::uint64_t>(b.offset.x2);
}

inline LocalPoint require_inside(const Landscape& land, Point p) {
    const LocalPoint lp = land.locate(p);
    if (lp.region.outside())
        throw DomainError("point (" + std::to_string(p.x1) + ", " + std::to_string(p.x2) +
                          ") is outside D");
    return lp;
}

inline LocalPoint descend(const Landscape& land, const LocalPoint& at, Point grad, double eta) {
    return land.relocate({at.region, at.offset - eta * grad});
}

// Noisy step followed by projection onto D. Sets `projected` when the
// projection moved the point.
inline LocalPoint perturb(const Landscape& land, const LocalPoint& at, Point grad, double eta,
                          Point zeta, bool& projected) {
    const LocalPoint moved{at.region, at.offset - eta * grad + zeta};
    const Point p = land.absolute(moved);
    const Point q = project_to_D(land.params(), p);
    projected = !(q == p);
    return projected ? land.locate(q) : land.relocate(moved);
}

template <class Rng>
Point draw_noise(const NoiseConfig& noise, double eta, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise.variance));
    const double z1 = gauss(rng);
    const double z2 = gauss(rng);
    const double scale = noise.scale_by_eta ? eta : 1.0;
    return {scale * z1, scale * z2};
}

}  // namespace detail

inline Point gd_step(const Landscape& land, Point p, double eta) {
    const LocalPoint lp = detail::require_inside(land, p);
    return land.absolute(detail::descend(land, lp, land.evaluate(lp).gradient, eta));
}

inline Point gd_step(const LandscapeParams& params, Point p, double eta) {
    return gd_step(Landscape(params), p, eta);
}

template <class Rng>
Point sgd_step(const Landscape& land, Point p, double eta, const NoiseConfig& noise, Rng& rng) {
    const LocalPoint lp = detail::require_inside(land, p);
    const Point grad = land.evaluate(lp).gradient;
    const Point zeta = detail::draw_noise(noise, eta, rng);
    bool projected = false;
    return land.absolute(detail::perturb(land, lp, grad, eta, zeta, projected));
}

template <class Rng>
Point sgd_step(const LandscapeParams& params, Point p, double eta, const NoiseConfig& noise,
               Rng& rng) {
    return sgd_step(Landscape(params), p, eta, noise, rng);
}

struct NullObserver {
    void operator()(const Iterate&) const {}
};

/// Runs descent from `start` until the final block is reached, the budget
/// runs out, or the iterate stalls. With noise, reaching the final block is
/// enough; without it the gradient norm there must drop below
/// `stop_grad_norm`. `observer` sees every iterate; the returned trajectory
/// keeps every `record_every`-th one plus all tagged ones.
template <class Observer = NullObserver>
Trajectory run(const Landscape& land, const GdConfig& config,
               const std::optional<NoiseConfig>& noise, Point start,
               Observer&& observer = Observer{}) {
    config.validate();
    if (noise) noise->validate();
    const double eta = config.step_size(land.constants());

    Trajectory traj;
    traj.params = land.params();
    traj.config = config;
    traj.noise = noise;

    std::mt19937_64 rng(noise ? noise->seed : 0);
    LocalPoint cur = detail::require_inside(land, start);
    LocalPoint prev = cur;
    bool projected = false;

    for (long t = 0;; ++t) {
        Iterate it;
        it.t = t;
        it.region = cur.region;
        it.position = land.absolute(cur);
        it.offset = cur.offset;

        std::optional<Outcome> done;
        Point grad;
        if (cur.region.outside()) {
            it.f_value = NAN;
            it.grad_norm = NAN;
            it.event = Event::LeftDomain;
            done = Outcome::LeftDomain;
        } else {
            const Evaluation ev = land.evaluate(cur);
            grad = ev.gradient;
            it.f_value = ev.value;
            it.grad_norm = norm(grad);
            const bool in_final = cur.region.kind == RegionKind::FinalBlock;
            if (in_final && !traj.final_block_entry) traj.final_block_entry = t;

            if (t > 0) {
                if (projected)
                    it.event = Event::Projected;
                else if (cur.region != prev.region)
                    it.event = is_buffer(cur.region.kind) ? Event::BufferEntry : Event::BlockEntry;
            }
            if (in_final && (noise || it.grad_norm <= config.stop_grad_norm)) {
                it.event = Event::Converged;
                done = Outcome::ReachedMinimum;
            } else if (!in_final && grad.x1 == 0.0 && grad.x2 == 0.0) {
                it.event = Event::Stalled;
                done = Outcome::Stalled;
            } else if (t > 0 && detail::bitwise_equal(cur, prev)) {
                it.event = Event::Stalled;
                done = Outcome::Stalled;
            } else if (t >= config.max_iter) {
                done = Outcome::Budget;
            }
        }

        observer(static_cast<const Iterate&>(it));
        if (done || it.event != Event::None || t % config.record_every == 0)
            traj.iterates.push_back(it);
        if (done) {
            traj.outcome = *done;
            traj.total_iters = t;
            return traj;
        }

        prev = cur;
        if (noise) {
            const Point zeta = detail::draw_noise(*noise, eta, rng);
            cur = detail::perturb(land, cur, grad, eta, zeta, projected);
        } else {
            cur = detail::descend(land, cur, grad, eta);
        }
    }
}

template <class Observer = NullObserver>
Trajectory run(const LandscapeParams& params, const GdConfig& config,
               const std::optional<NoiseConfig>& noise, Point start,
               Observer&& observer = Observer{}) {
    return run(Landscape(params), config, noise, start, std::forward<Observer>(observer));
}

}  // namespace staircase
