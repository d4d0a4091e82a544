#pragma once

// Escape-time bookkeeping on descent runs and the comparisons against the
// lower-bound argument: buffer residence, containment, the per-block
// recurrence and the fitted geometric growth.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "staircase/optimizer.hpp"

namespace staircase {

/// Residence of the run in block i and in the buffer that follows it.
struct EscapeRecord {
    int index = 0;
    long t = 0;        // iterates spent in block i
    long t_prime = 0;  // iterates spent in buffer i (0 for the final block)
    long T = 0;        // iterates spent up to leaving the neighbourhood of block i
    bool complete = false;  // the run went on to block i+1
};

class SegmentationError : public std::runtime_error {
public:
    SegmentationError(const std::string& what, long t) : std::runtime_error(what), t_(t) {}
    long offending_t() const { return t_; }

private:
    long t_;
};

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SegmentMode {
    Strict,        // any return to an earlier region is an error
    FirstPassage,  // residence counted against the furthest region reached so far
};

/// Online residence counter. Pass it as the run observer to segment runs
/// whose stored trajectory is thinned.
class ResidenceTally {
public:
    explicit ResidenceTally(const LandscapeParams& params, SegmentMode mode = SegmentMode::Strict)
        : params_(params), mode_(mode), residence_(params.n_regions(), 0) {}

    void operator()(const Iterate& it) {
        ++length_;
        if (it.region.outside()) {
            ++outside_;
            if (mode_ == SegmentMode::Strict)
                throw SegmentationError("iterate " + std::to_string(it.t) + " is outside D", it.t);
            return;
        }
        if (it.region.order < furthest_) {
            if (mode_ == SegmentMode::Strict)
                throw SegmentationError("iterate " + std::to_string(it.t) +
                                            " revisits an earlier region",
                                        it.t);
            if (revisits_++ == 0) first_revisit_ = it.t;
        }
        if (last_order_ >= 0 && it.region.order > last_order_ + 1) ++skips_;
        last_order_ = it.region.order;
        furthest_ = std::max(furthest_, it.region.order);
        ++residence_[furthest_];
    }

    long length() const { return length_; }
    long outside() const { return outside_; }
    long revisits() const { return revisits_; }  // iterates behind the furthest region
    std::optional<long> first_revisit() const { return first_revisit_; }
    long skips() const { return skips_; }  // steps that jumped over a region

    std::vector<EscapeRecord> records() const {
        std::vector<EscapeRecord> out;
        if (furthest_ < 0) return out;
        long cumulative = 0;
        const int last_block = furthest_ / 2 + 1;
        for (int i = 1; i <= last_block; ++i) {
            EscapeRecord r;
            r.index = i;
            r.t = residence_[2 * (i - 1)];
            const int buffer = 2 * (i - 1) + 1;
            r.t_prime = buffer < params_.n_regions() ? residence_[buffer] : 0;
            cumulative += r.t + r.t_prime;
            r.T = cumulative;
            r.complete = furthest_ >= 2 * i;
            out.push_back(r);
        }
        return out;
    }

private:
    LandscapeParams params_;
    SegmentMode mode_;
    std::vector<long> residence_;
    int furthest_ = -1;
    long length_ = 0;
    long outside_ = 0;
    long revisits_ = 0;
    long skips_ = 0;
    int last_order_ = -1;
    std::optional<long> first_revisit_;
};

/// Escape records of a full (unthinned) trajectory.
inline std::vector<EscapeRecord> segment(const Trajectory& traj, const LandscapeParams& params,
                                         SegmentMode mode = SegmentMode::Strict) {
    if (traj.iterates.empty()) throw std::invalid_argument("segment: empty trajectory");
    ResidenceTally tally(params, mode);
    long expected = traj.iterates.front().t;
    for (const Iterate& it : traj.iterates) {
        if (it.t != expected)
            throw std::invalid_argument("segment: trajectory is thinned; tally with an observer");
        ++expected;
        tally(it);
    }
    return tally.records();
}

/// One inequality evaluated on measured numbers.
struct Comparison {
    std::string label;
    int index = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

struct TheoryCheck {
    std::string name;
    bool passed = true;
    bool skipped = false;
    std::string note;
    std::vector<Comparison> comparisons;

    const Comparison* first_failure() const {
        for (const auto& c : comparisons)
            if (!c.holds) return &c;
        return nullptr;
    }
};

namespace detail {

inline void add(TheoryCheck& check, std::string label, int index, double lhs, double rhs,
                bool holds) {
    check.comparisons.push_back({std::move(label), index, lhs, rhs, holds});
    check.passed = check.passed && holds;
}

// ceil(x), forgiving x landing a few ulps above an integer.
inline long ceil_count(double x) { return static_cast<long>(std::ceil(x - 1e-9 * std::max(1.0, x))); }

}  // namespace detail

/// Every buffer residence is at most ceil(1/(eta gamma)).
inline TheoryCheck check_lemma1(const std::vector<EscapeRecord>& records,
                                const LandscapeParams& params, double eta) {
    TheoryCheck check;
    check.name = "lemma1_buffer_residence";
    const long bound = detail::ceil_count(1.0 / (eta * params.gamma));
    check.note = "t' <= " + std::to_string(bound);
    for (const EscapeRecord& r : records) {
        if (r.index >= params.n_blocks()) continue;
        detail::add(check, "t'", r.index, static_cast<double>(r.t_prime),
                    static_cast<double>(bound), r.t_prime <= bound);
    }
    return check;
}

/// No iterate left D and no projection happened. Not claimed for noisy runs.
inline TheoryCheck check_lemma2(const Trajectory& traj) {
    TheoryCheck check;
    check.name = "lemma2_containment";
    if (traj.noise) {
        check.skipped = true;
        check.note = "noisy descent: containment is not claimed";
        return check;
    }
    long violations = 0;
    for (const Iterate& it : traj.iterates) {
        if (it.region.outside() || it.event == Event::Projected || it.event == Event::LeftDomain) {
            if (violations++ == 0)
                detail::add(check, it.region.outside() ? "outside D" : "projected",
                            static_cast<int>(it.t), 1.0, 0.0, false);
        }
    }
    check.note = std::to_string(violations) + " violating iterates";
    return check;
}

/// Per-block recurrence on consecutive completed saddle blocks:
///   t[k+1] > (L/gamma) t[k] - 1/(eta gamma)
///   t[k+1] - c > (L/gamma) (t[k] - c),  c = 4L/(L - gamma)
/// and t[1] > 4L/gamma. Requires L >= 2 gamma.
inline TheoryCheck check_theorem3(const std::vector<EscapeRecord>& records,
                                  const LandscapeParams& params, double eta) {
    if (params.L < 2.0 * params.gamma)
        throw ParameterError("check_theorem3 requires L >= 2 gamma, got L=" +
                             std::to_string(params.L) + " gamma=" + std::to_string(params.gamma));
    TheoryCheck check;
    check.name = "theorem3_recurrence";
    const double ratio = params.L / params.gamma;
    const double slack = 1.0 / (eta * params.gamma);
    const double shift = 4.0 * params.L / (params.L - params.gamma);

    std::vector<EscapeRecord> saddles;
    for (const EscapeRecord& r : records)
        if (r.index <= params.n_saddles && r.complete) saddles.push_back(r);
    std::sort(saddles.begin(), saddles.end(),
              [](const EscapeRecord& a, const EscapeRecord& b) { return a.index < b.index; });

    if (!saddles.empty() && saddles.front().index == 1) {
        const double t1 = static_cast<double>(saddles.front().t);
        detail::add(check, "t1 > 4L/gamma", 1, t1, 4.0 * params.L / params.gamma,
                    t1 > 4.0 * params.L / params.gamma);
    }
    for (std::size_t k = 0; k + 1 < saddles.size(); ++k) {
        if (saddles[k + 1].index != saddles[k].index + 1) continue;
        const double a = static_cast<double>(saddles[k].t);
        const double b = static_cast<double>(saddles[k + 1].t);
        detail::add(check, "t[k+1] > (L/gamma) t[k] - 1/(eta gamma)", saddles[k].index, b,
                    ratio * a - slack, b > ratio * a - slack);
        detail::add(check, "t[k+1] - c > (L/gamma)(t[k] - c)", saddles[k].index, b - shift,
                    ratio * (a - shift), b - shift > ratio * (a - shift));
    }
    if (check.comparisons.empty()) check.note = "no completed saddle blocks to compare";
    return check;
}

struct GrowthSummary {
    double growth_ratio = 0.0;  // exp(slope) of least squares on log t[k]
    std::vector<long> saddle_times;
    std::vector<double> floor_per_block;  // unrolled shifted recurrence from measured t[1]
    double floor_total = 0.0;             // over all saddle blocks
    double floor_completed = 0.0;         // over the completed ones
    long measured_completed = 0;          // iterates spent in completed neighbourhoods
    std::optional<long> hitting_time;     // iterates before the final block; none if never
    bool exceeds_floor = false;           // hitting time (infinite if never) > floor_total
    bool completed_exceeds_floor = false;
};

/// Geometric growth of per-block escape times and the recurrence floor.
inline GrowthSummary growth_summary(const std::vector<EscapeRecord>& records,
                                    const LandscapeParams& params) {
    std::vector<EscapeRecord> saddles;
    for (const EscapeRecord& r : records)
        if (r.index <= params.n_saddles && r.complete) saddles.push_back(r);
    std::sort(saddles.begin(), saddles.end(),
              [](const EscapeRecord& a, const EscapeRecord& b) { return a.index < b.index; });
    if (saddles.size() < 3)
        throw InsufficientData("growth_summary needs >= 3 completed saddle blocks, got " +
                               std::to_string(saddles.size()));
    if (saddles.front().index != 1)
        throw InsufficientData("growth_summary needs the first block's escape time");

    GrowthSummary g;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(saddles.size());
    for (const EscapeRecord& r : saddles) {
        g.saddle_times.push_back(r.t);
        const double x = r.index;
        const double y = std::log(static_cast<double>(std::max<long>(r.t, 1)));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        g.measured_completed += r.t + r.t_prime;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    g.growth_ratio = std::exp(slope);

    const double ratio = params.L / params.gamma;
    const double shift = params.L > params.gamma ? 4.0 * params.L / (params.L - params.gamma) : 0.0;
    const double t1 = static_cast<double>(saddles.front().t);
    for (int k = 1; k <= params.n_saddles; ++k) {
        const double floor_k = shift + std::pow(ratio, k - 1) * (t1 - shift);
        g.floor_per_block.push_back(floor_k);
        g.floor_total += floor_k;
        if (k <= static_cast<int>(saddles.size())) g.floor_completed += floor_k;
    }
    for (const EscapeRecord& r : records)
        if (r.index == params.n_blocks()) g.hitting_time = r.T - r.t;
    g.exceeds_floor = !g.hitting_time || static_cast<double>(*g.hitting_time) > g.floor_total;
    g.completed_exceeds_floor = static_cast<double>(g.measured_completed) > g.floor_completed;
    return g;
}

struct StallInfo {
    long t = 0;
    Point position;
    RegionId region;
    std::string reason;
};

/// First iterate where plain descent can no longer make progress: the cross
/// offset in a saddle block is exactly zero, the gradient vanished away from
/// the final block, or a step left the state bitwise unchanged.
inline std::optional<StallInfo> detect_stall(const Trajectory& traj, const LandscapeParams& params) {
    for (const Iterate& it : traj.iterates) {
        if (it.event == Event::Stalled) {
            const std::string why = it.grad_norm == 0.0 ? "zero gradient" : "position fixed by step";
            return StallInfo{it.t, it.position, it.region, why};
        }
        if (is_saddle_block(it.region.kind)) {
            const int cross = 1 - travel_axis(it.region, params.n_blocks());
            const double d = cross == 0 ? it.offset.x1 : it.offset.x2;
            if (d == 0.0) return StallInfo{it.t, it.position, it.region, "cross coordinate pinned"};
        }
    }
    return std::nullopt;
}

struct TheoryReport {
    TheoryCheck lemma1;
    TheoryCheck lemma2;
    TheoryCheck theorem3;
    std::optional<GrowthSummary> growth;
    std::string growth_note;

    bool passed() const {
        return (lemma1.skipped || lemma1.passed) && (lemma2.skipped || lemma2.passed) &&
               (theorem3.skipped || theorem3.passed);
    }
};

inline TheoryReport theory_report(const std::vector<EscapeRecord>& records, const Trajectory& traj,
                                  const LandscapeParams& params, double eta) {
    TheoryReport rep;
    rep.lemma1 = check_lemma1(records, params, eta);
    rep.lemma2 = check_lemma2(traj);
    if (traj.noise) {
        rep.lemma1.skipped = true;
        rep.lemma1.note = "noisy descent: bound is claimed for plain descent only";
    }
    if (traj.noise) {
        rep.theorem3 = {"theorem3_recurrence", true, true, "noisy descent: not claimed", {}};
    } else if (params.L < 2.0 * params.gamma) {
        rep.theorem3 = {"theorem3_recurrence", true, true, "requires L >= 2 gamma", {}};
    } else {
        rep.theorem3 = check_theorem3(records, params, eta);
    }
    try {
        rep.growth = growth_summary(records, params);
    } catch (const InsufficientData& e) {
        rep.growth_note = e.what();
    }
    return rep;
}

}  // namespace staircase
