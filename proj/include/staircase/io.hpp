#pragma once

// CSV and JSON encodings of runs and reports.

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "staircase/analysis.hpp"
#include "staircase/verification.hpp"

namespace staircase::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kTrajectoryHeader =
    "iter,x1,x2,f,grad_norm,region_kind,region_index,event";
inline constexpr const char* kSweepHeader =
    "L,gamma,tau,n_saddles,seed,algo,outcome,total_iters,growth_ratio";

/// Decimal with 17 significant digits; round-trips every double.
inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv_row(std::ostream& os, const Iterate& it) {
    os << it.t << ',' << num(it.position.x1) << ',' << num(it.position.x2) << ','
       << num(it.f_value) << ',' << num(it.grad_norm) << ',' << to_string(it.region.kind) << ','
       << it.region.index << ',' << to_string(it.event) << '\n';
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << kTrajectoryHeader << '\n';
    for (const Iterate& it : traj.iterates) write_csv_row(os, it);
}

inline json to_json(Point p) { return json::array({p.x1, p.x2}); }

inline json to_json(RegionId r) {
    return {{"kind", to_string(r.kind)}, {"index", r.index}, {"order", r.order}};
}

inline json to_json(const LandscapeParams& p) {
    return {{"L", p.L}, {"gamma", p.gamma}, {"tau", p.tau}, {"n_saddles", p.n_saddles},
            {"n_blocks", p.n_blocks()}};
}

inline json to_json(const DerivedConstants& c) {
    return {{"L2", c.L2}, {"nu", c.nu}, {"eta_default", c.eta_default},
            {"lower_bound_base", c.lower_bound_base}};
}

inline json to_json(const GdConfig& c, const DerivedConstants& k) {
    return {{"eta", c.step_size(k)}, {"max_iter", c.max_iter}, {"stop_grad_norm", c.stop_grad_norm},
            {"record_every", c.record_every}};
}

inline json to_json(const NoiseConfig& n) {
    return {{"variance", n.variance}, {"seed", n.seed}, {"scale_by_eta", n.scale_by_eta}};
}

inline json to_json(const CheckReport& r) {
    json witnesses = json::array();
    for (const Witness& w : r.witnesses)
        witnesses.push_back({{"point", to_json(w.point)}, {"where", w.where}, {"error", w.error}});
    json stats = json::object();
    for (const auto& [k, v] : r.stats) stats[k] = v;
    json j = {{"name", r.name},           {"samples", r.samples},   {"worst_error", r.worst_error},
              {"threshold", r.threshold}, {"passed", r.passed},     {"witnesses", witnesses},
              {"stats", stats}};
    if (!r.parts.empty()) {
        json parts = json::array();
        for (const CheckReport& p : r.parts) parts.push_back(to_json(p));
        j["parts"] = parts;
    }
    return j;
}

inline json to_json(const EscapeRecord& r) {
    return {{"index", r.index}, {"t", r.t}, {"t_prime", r.t_prime}, {"T", r.T},
            {"complete", r.complete}};
}

inline json to_json(const TheoryCheck& c) {
    json comps = json::array();
    for (const Comparison& x : c.comparisons)
        comps.push_back({{"label", x.label}, {"index", x.index}, {"lhs", x.lhs}, {"rhs", x.rhs},
                         {"holds", x.holds}});
    return {{"name", c.name}, {"passed", c.passed}, {"skipped", c.skipped}, {"note", c.note},
            {"comparisons", comps}};
}

inline json to_json(const GrowthSummary& g) {
    json j = {{"growth_ratio", g.growth_ratio},
              {"saddle_times", g.saddle_times},
              {"floor_per_block", g.floor_per_block},
              {"floor_total", g.floor_total},
              {"floor_completed", g.floor_completed},
              {"measured_completed", g.measured_completed},
              {"hitting_time", nullptr},
              {"exceeds_floor", g.exceeds_floor},
              {"completed_exceeds_floor", g.completed_exceeds_floor}};
    if (g.hitting_time) j["hitting_time"] = *g.hitting_time;
    return j;
}

inline json to_json(const TheoryReport& r) {
    json j = {{"passed", r.passed()},
              {"lemma1", to_json(r.lemma1)},
              {"lemma2", to_json(r.lemma2)},
              {"theorem3", to_json(r.theorem3)},
              {"growth", nullptr}};
    if (r.growth)
        j["growth"] = to_json(*r.growth);
    else
        j["growth_note"] = r.growth_note;
    return j;
}

inline json to_json(const std::optional<StallInfo>& s) {
    if (!s) return nullptr;
    return {{"t", s->t}, {"position", to_json(s->position)}, {"region", to_json(s->region)},
            {"reason", s->reason}};
}

}  // namespace staircase::io
