#pragma once

// The staircase function f on D and its exact gradient.
//
// Every region is evaluated in coordinates relative to its own center. Chain
// neighbours share the center coordinate of the axis they do not travel
// along, so an offset on that axis carries across region changes without
// rounding. The optimizer keeps its state in this form, which is what lets
// an exponentially small cross offset survive until it underflows.

#include <string>

#include "staircase/blend.hpp"
#include "staircase/geometry.hpp"
#include "staircase/params.hpp"

namespace staircase {

/// A point expressed as (region, offset from the region center).
struct LocalPoint {
    RegionId region;
    Point offset;  // absolute coordinates when region is Outside

    friend bool operator==(const LocalPoint&, const LocalPoint&) = default;
};

struct Evaluation {
    double value = 0.0;
    Point gradient;
};

class Landscape {
public:
    explicit Landscape(const LandscapeParams& params)
        : params_(params), constants_(derive_constants(params)) {}

    /// Landscape with caller-supplied constants. Used by tests to build
    /// deliberately broken variants; regular code uses the constructor.
    static Landscape with_constants(const LandscapeParams& params, const DerivedConstants& c) {
        Landscape l(params);
        l.constants_ = c;
        return l;
    }

    const LandscapeParams& params() const { return params_; }
    const DerivedConstants& constants() const { return constants_; }

    RegionId classify(Point p) const { return staircase::classify(params_, p); }
    Point center(RegionId r) const { return block_geometry(params_, r).center; }

    LocalPoint locate(Point p) const {
        const RegionId r = classify(p);
        if (r.outside()) return {r, p};
        return {r, p - center(r)};
    }

    Point absolute(const LocalPoint& lp) const {
        if (lp.region.outside()) return lp.offset;
        return center(lp.region) + lp.offset;
    }

    /// Re-anchors `lp` after its offset changed. The offset is kept untouched
    /// while the absolute position still belongs to the same region.
    LocalPoint relocate(const LocalPoint& lp) const {
        const Point p = absolute(lp);
        const RegionId r = classify(p);
        if (r == lp.region) return lp;
        if (r.outside()) return {r, p};
        if (lp.region.outside()) return {r, p - center(r)};
        return {r, lp.offset + (center(lp.region) - center(r))};
    }

    /// Coefficients of the cross-curvature blend in buffer `r` for a point
    /// whose cross offset from the shared center is `cross`.
    BufferBranch branch(RegionId r, double cross) const {
        if (r.index + 1 == params_.n_blocks()) return {params_.L, params_.L};
        return {params_.L, cross > 0.0 ? -params_.gamma : constants_.L2};
    }

    /// Value and gradient of the piece owning `lp`.
    Evaluation evaluate(const LocalPoint& lp) const {
        const RegionId r = lp.region;
        const double d1 = lp.offset.x1;
        const double d2 = lp.offset.x2;
        const double L = params_.L;
        const double level = -r.index * constants_.nu;
        switch (r.kind) {
            case RegionKind::OddBlock: {
                const double a = d1 > 0.0 ? -params_.gamma : constants_.L2;
                return {level + a * d1 * d1 + L * d2 * d2, {2.0 * a * d1, 2.0 * L * d2}};
            }
            case RegionKind::EvenBlock: {
                const double a = d2 > 0.0 ? -params_.gamma : constants_.L2;
                return {level + L * d1 * d1 + a * d2 * d2, {2.0 * L * d1, 2.0 * a * d2}};
            }
            case RegionKind::FinalBlock:
                return {level + L * d1 * d1 + L * d2 * d2, {2.0 * L * d1, 2.0 * L * d2}};
            case RegionKind::OddToEvenBuffer: {
                const auto [v, dv] = buffer_terms(r, 1.5 * params_.tau + d1, d2);
                return {level + v, {dv.x1, dv.x2}};
            }
            case RegionKind::EvenToOddBuffer: {
                const auto [v, dv] = buffer_terms(r, 1.5 * params_.tau + d2, d1);
                return {level + v, {dv.x2, dv.x1}};
            }
            case RegionKind::Outside: break;
        }
        throw DomainError("evaluate: point outside D");
    }

    /// Evaluates the formula of region `r` at absolute point `p`, whether or
    /// not `r` owns `p`. Lets seam checks compare both neighbours on an edge.
    Evaluation evaluate_in(RegionId r, Point p) const {
        if (r.outside()) throw DomainError("evaluate_in: region is Outside");
        return evaluate({r, p - center(r)});
    }

    Evaluation evaluate(Point p) const {
        const LocalPoint lp = locate(p);
        if (lp.region.outside()) throw outside_error(p);
        return evaluate(lp);
    }
    double value(Point p) const { return evaluate(p).value; }
    Point gradient(Point p) const { return evaluate(p).gradient; }

private:
    struct BufferTerms {
        double value;
        Point slope;  // (d/du, d/dw) in travel/cross coordinates
    };

    BufferTerms buffer_terms(RegionId r, double u, double w) const {
        const ValueSlope p1 = detail::g1(u, params_.L, params_.gamma, params_.tau);
        const ValueSlope p2 = detail::g2(u, branch(r, w), params_.tau);
        return {p1.value + p2.value * w * w, {p1.slope + p2.slope * w * w, 2.0 * p2.value * w}};
    }

    static DomainError outside_error(Point p) {
        return DomainError("point (" + std::to_string(p.x1) + ", " + std::to_string(p.x2) +
                           ") is outside D");
    }

    LandscapeParams params_;
    DerivedConstants constants_;
};

inline double eval_f(const LandscapeParams& params, Point p) { return Landscape(params).value(p); }

inline Point eval_grad(const LandscapeParams& params, Point p) {
    return Landscape(params).gradient(p);
}

}  // namespace staircase
