#pragma once

// Layout of the domain D: a staircase of tau x tau squares visited in chain
// order B1, B'1, B2, B'2, ..., Bn. Odd blocks are left of their buffer, even
// blocks are below theirs, so the chain alternates right and up.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "staircase/blend.hpp"
#include "staircase/params.hpp"

namespace staircase {

enum class RegionKind { OddBlock, EvenBlock, OddToEvenBuffer, EvenToOddBuffer, FinalBlock, Outside };

inline std::string_view to_string(RegionKind k) {
    switch (k) {
        case RegionKind::OddBlock: return "OddBlock";
        case RegionKind::EvenBlock: return "EvenBlock";
        case RegionKind::OddToEvenBuffer: return "OddToEvenBuffer";
        case RegionKind::EvenToOddBuffer: return "EvenToOddBuffer";
        case RegionKind::FinalBlock: return "FinalBlock";
        case RegionKind::Outside: return "Outside";
    }
    return "?";
}

inline bool is_block(RegionKind k) {
    return k == RegionKind::OddBlock || k == RegionKind::EvenBlock || k == RegionKind::FinalBlock;
}
inline bool is_buffer(RegionKind k) {
    return k == RegionKind::OddToEvenBuffer || k == RegionKind::EvenToOddBuffer;
}
inline bool is_saddle_block(RegionKind k) {
    return k == RegionKind::OddBlock || k == RegionKind::EvenBlock;
}

struct RegionId {
    RegionKind kind = RegionKind::Outside;
    int index = 0;   // 1-based block/buffer index; 0 for Outside
    int order = -1;  // position in the chain; -1 for Outside

    bool outside() const { return kind == RegionKind::Outside; }
    friend bool operator==(const RegionId&, const RegionId&) = default;
};

inline constexpr RegionId kOutside{};

struct Rect {
    double x1_min = 0.0, x1_max = 0.0, x2_min = 0.0, x2_max = 0.0;

    bool contains(Point p) const {
        return p.x1 >= x1_min && p.x1 <= x1_max && p.x2 >= x2_min && p.x2 <= x2_max;
    }
    Point clamp(Point p) const {
        return {std::clamp(p.x1, x1_min, x1_max), std::clamp(p.x2, x2_min, x2_max)};
    }
};

struct BlockGeometry {
    Rect bounds;
    Point center;
};

/// Axis along which the chain leaves a region, 0 for x1 and 1 for x2.
/// Odd blocks and odd-to-even buffers travel along x1, the rest along x2.
/// The final block has no escape axis; its entry axis is returned.
inline int travel_axis(RegionId r, int n_blocks) {
    switch (r.kind) {
        case RegionKind::OddBlock:
        case RegionKind::OddToEvenBuffer: return 0;
        case RegionKind::EvenBlock:
        case RegionKind::EvenToOddBuffer: return 1;
        case RegionKind::FinalBlock: return n_blocks % 2 == 0 ? 0 : 1;
        case RegionKind::Outside: break;
    }
    throw DomainError("travel_axis: region is Outside");
}

inline RegionId region_at(const LandscapeParams& params, int order) {
    if (order < 0 || order >= params.n_regions())
        throw std::out_of_range("region_at: chain order " + std::to_string(order) +
                                " out of range");
    const int index = order / 2 + 1;
    RegionKind kind;
    if (order % 2 == 0) {
        if (index == params.n_blocks())
            kind = RegionKind::FinalBlock;
        else
            kind = index % 2 == 1 ? RegionKind::OddBlock : RegionKind::EvenBlock;
    } else {
        kind = index % 2 == 1 ? RegionKind::OddToEvenBuffer : RegionKind::EvenToOddBuffer;
    }
    return {kind, index, order};
}

inline BlockGeometry block_geometry(const LandscapeParams& params, RegionId r) {
    if (r.outside()) throw DomainError("block_geometry: region is Outside");
    const int i = r.index;
    const bool buffer = is_buffer(r.kind);
    if (i < 1 || i > params.n_blocks() || (buffer && i >= params.n_blocks()))
        throw std::out_of_range("block_geometry: index " + std::to_string(i) + " out of range");
    // Lower-left corner in units of tau.
    int a, b;
    if (buffer) {
        a = i;
        b = i - 1;
    } else if (i % 2 == 1) {
        a = i - 1;
        b = i - 1;
    } else {
        a = i;
        b = i - 2;
    }
    const double tau = params.tau;
    BlockGeometry g;
    g.bounds = {a * tau, (a + 1) * tau, b * tau, (b + 1) * tau};
    g.center = {(a + 0.5) * tau, (b + 0.5) * tau};
    return g;
}

/// Region owning `p`. Shared edges go to the region earlier in the chain.
inline RegionId classify(const LandscapeParams& params, Point p) {
    if (!is_finite(p)) return kOutside;
    const double period = 2.0 * params.tau;
    const double k_real = local_offset(p.x1, period) / period;
    if (k_real < -1.0 || k_real > params.n_blocks()) return kOutside;
    // Regions touching x1 in [2k tau, 2(k+1) tau] have chain orders 4k-3 .. 4k+2;
    // the window is one period wider on each side to absorb rounding in k.
    const int k = static_cast<int>(std::lround(k_real));
    const int first = std::max(0, 4 * k - 7);
    const int last = std::min(params.n_regions() - 1, 4 * k + 6);
    for (int order = first; order <= last; ++order) {
        const RegionId r = region_at(params, order);
        if (block_geometry(params, r).bounds.contains(p)) return r;
    }
    return kOutside;
}

inline std::vector<RegionId> all_regions(const LandscapeParams& params) {
    std::vector<RegionId> out;
    out.reserve(params.n_regions());
    for (int order = 0; order < params.n_regions(); ++order) out.push_back(region_at(params, order));
    return out;
}

/// Euclidean nearest point of D. Ties go to the earliest region in the chain.
inline Point project_to_D(const LandscapeParams& params, Point p) {
    if (!classify(params, p).outside()) return p;
    Point best = p;
    double best_dist = INFINITY;
    for (int order = 0; order < params.n_regions(); ++order) {
        const Point q = block_geometry(params, region_at(params, order)).bounds.clamp(p);
        const double d = norm(q - p);
        if (d < best_dist) {
            best_dist = d;
            best = q;
        }
    }
    return best;
}

}  // namespace staircase
