#pragma once

// Experiment runner behind the command-line tool: seeded descent runs,
// landscape checks, parameter sweeps and plot-ready series.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "staircase/io.hpp"

namespace staircase {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitIo = 3 };

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Algo { GD, SGD };

inline std::string_view to_string(Algo a) { return a == Algo::GD ? "gd" : "sgd"; }

inline Algo parse_algo(const std::string& s) {
    if (s == "gd") return Algo::GD;
    if (s == "sgd") return Algo::SGD;
    throw UsageError("unknown algorithm '" + s + "' (expected gd or sgd)");
}

/// Start point for `seed`. Independent of the noise stream of the same seed.
inline Point seeded_start(const LandscapeParams& params, std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 1u};
    std::mt19937_64 rng(seq);
    return init_sample(params, rng);
}

struct RunResult {
    LandscapeParams params;
    Algo algo = Algo::GD;
    std::uint64_t seed = 0;
    Point start;
    Trajectory trajectory;
    std::vector<EscapeRecord> records;
    TheoryReport theory;
    std::optional<StallInfo> stall;
    long revisits = 0;
    long skips = 0;
    double wall_seconds = 0.0;

    std::string tag() const {
        return std::string(to_string(algo)) + "_seed" + std::to_string(seed);
    }
};

struct RunOptions {
    GdConfig config;
    double noise_variance = 0.1;
    bool noise_scale_by_eta = false;
};

/// One seeded run with residence tallied over every iterate.
inline RunResult run_experiment(const LandscapeParams& params, Algo algo, std::uint64_t seed,
                                const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult res;
    res.params = params;
    res.algo = algo;
    res.seed = seed;
    res.start = seeded_start(params, seed);

    std::optional<NoiseConfig> noise;
    if (algo == Algo::SGD) noise = NoiseConfig{opt.noise_variance, seed, opt.noise_scale_by_eta};

    const Landscape land(params);
    ResidenceTally tally(params, SegmentMode::FirstPassage);
    res.trajectory = run(land, opt.config, noise, res.start, tally);
    res.records = tally.records();
    res.revisits = tally.revisits();
    res.skips = tally.skips();
    const double eta = opt.config.step_size(land.constants());
    res.theory = theory_report(res.records, res.trajectory, params, eta);
    if (algo == Algo::GD) res.stall = detect_stall(res.trajectory, params);
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/// Runs `n` independent jobs on up to `jobs` threads; results keep job order.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t n, int jobs, Fn&& fn) {
    std::vector<Result> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

struct ExperimentSpec {
    std::vector<double> L{1.0};
    std::vector<double> gamma;  // empty: gamma = L/2 for each L
    std::vector<double> tau{1.0};
    std::vector<int> n_saddles{9};
    std::vector<Algo> algos{Algo::GD};
    std::vector<std::uint64_t> seeds{0};
    RunOptions run;
    std::filesystem::path out_dir;
    int jobs = 1;

    std::vector<LandscapeParams> grid() const {
        std::vector<LandscapeParams> out;
        for (double l : L) {
            const std::vector<double> gammas = gamma.empty() ? std::vector<double>{l / 2.0} : gamma;
            for (double g : gammas)
                for (double t : tau)
                    for (int n : n_saddles) out.push_back({l, g, t, n});
        }
        return out;
    }

    /// Rejects the spec before anything runs; messages name the violated rule.
    void validate() const {
        if (L.empty() || tau.empty() || n_saddles.empty() || algos.empty())
            throw UsageError("parameter grid is empty");
        if (seeds.empty()) throw UsageError("seed list is empty");
        if (jobs < 1) throw UsageError("--jobs must be >= 1");
        try {
            for (const LandscapeParams& p : grid()) p.validate();
            run.config.validate();
            NoiseConfig{run.noise_variance, 0, run.noise_scale_by_eta}.validate();
        } catch (const ParameterError& e) {
            throw UsageError(e.what());
        }
    }

    LandscapeParams single() const {
        const auto g = grid();
        if (g.size() != 1) throw UsageError("this command takes a single parameter set");
        return g.front();
    }
};

namespace detail {

inline void prepare_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto probe = dir / ".write_probe";
    {
        std::ofstream os(probe);
        if (!os) throw IoError("output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    os << content;
    if (!os) throw IoError("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline io::json run_json(const RunResult& r, const std::string& csv_name) {
    io::json records = io::json::array();
    for (const EscapeRecord& rec : r.records) records.push_back(io::to_json(rec));
    io::json j = {{"tag", r.tag()},
                  {"algo", to_string(r.algo)},
                  {"seed", r.seed},
                  {"params", io::to_json(r.params)},
                  {"start", io::to_json(r.start)},
                  {"outcome", to_string(r.trajectory.outcome)},
                  {"total_iters", r.trajectory.total_iters},
                  {"final_block_entry", nullptr},
                  {"escape_records", records},
                  {"theory", io::to_json(r.theory)},
                  {"stall", io::to_json(r.stall)},
                  {"revisits", r.revisits},
                  {"region_skips", r.skips},
                  {"csv", csv_name}};
    if (r.trajectory.final_block_entry) j["final_block_entry"] = *r.trajectory.final_block_entry;
    return j;
}

}  // namespace detail

struct CheckSettings {
    GradientCheckOptions gradient;
    SeamScanOptions seams;
    StationaryOptions stationary;
    long lipschitz_pairs = 100'000;
    long global_min_points = 1'000'000;
};

inline std::vector<CheckReport> run_checks(const LandscapeParams& params,
                                           const CheckSettings& s = {}) {
    const Landscape land(params);
    return {gradient_check(land, s.gradient), seam_scan(land, s.seams),
            stationary_check(land, s.stationary),
            global_min_probe(land, s.global_min_points, s.gradient.seed),
            to_report(lipschitz_probe(land, s.lipschitz_pairs, s.gradient.seed))};
}

/// Landscape self-checks; writes check.json. Exit 0 iff every check passes.
inline int cmd_check(const ExperimentSpec& spec, const CheckSettings& settings = {}) {
    spec.validate();
    const LandscapeParams params = spec.single();
    detail::prepare_output_dir(spec.out_dir);
    const auto reports = run_checks(params, settings);
    bool passed = true;
    io::json checks = io::json::array();
    for (const CheckReport& r : reports) {
        passed = passed && r.passed;
        checks.push_back(io::to_json(r));
    }
    io::json doc = {{"schema_version", io::kSchemaVersion},
                    {"command", "check"},
                    {"params", io::to_json(params)},
                    {"derived", io::to_json(derive_constants(params))},
                    {"checks", checks},
                    {"passed", passed}};
    detail::write_file(spec.out_dir / "check.json", doc.dump(2) + "\n");
    return passed ? kExitOk : kExitCheckFailed;
}

/// One run per (algorithm, seed): a trajectory CSV each, summary.json with
/// escape records and theory checks, timing.json with wall times.
inline int cmd_run(const ExperimentSpec& spec, std::vector<RunResult>* results_out = nullptr) {
    spec.validate();
    const LandscapeParams params = spec.single();
    detail::prepare_output_dir(spec.out_dir);

    std::vector<std::pair<Algo, std::uint64_t>> jobs;
    for (Algo a : spec.algos)
        for (std::uint64_t s : spec.seeds) jobs.emplace_back(a, s);
    auto results = parallel_map<RunResult>(jobs.size(), spec.jobs, [&](std::size_t i) {
        return run_experiment(params, jobs[i].first, jobs[i].second, spec.run);
    });

    bool passed = true;
    io::json runs = io::json::array();
    io::json timing = io::json::object();
    for (const RunResult& r : results) {
        const std::string csv = "run_" + r.tag() + ".csv";
        std::ostringstream os;
        io::write_trajectory_csv(os, r.trajectory);
        detail::write_file(spec.out_dir / csv, os.str());
        runs.push_back(detail::run_json(r, csv));
        timing[r.tag()] = r.wall_seconds;
        passed = passed && r.theory.passed();
    }
    const DerivedConstants derived = derive_constants(params);
    io::json doc = {{"schema_version", io::kSchemaVersion},
                    {"command", "run"},
                    {"params", io::to_json(params)},
                    {"derived", io::to_json(derived)},
                    {"config", io::to_json(spec.run.config, derived)},
                    {"noise", {{"variance", spec.run.noise_variance},
                               {"scale_by_eta", spec.run.noise_scale_by_eta}}},
                    {"runs", runs},
                    {"passed", passed}};
    detail::write_file(spec.out_dir / "summary.json", doc.dump(2) + "\n");
    detail::write_file(spec.out_dir / "timing.json",
                       io::json{{"wall_seconds", timing}}.dump(2) + "\n");
    if (results_out) *results_out = std::move(results);
    return passed ? kExitOk : kExitCheckFailed;
}

struct SweepRow {
    LandscapeParams params;
    Algo algo = Algo::GD;
    std::uint64_t seed = 0;
    Outcome outcome = Outcome::Budget;
    long total_iters = 0;
    std::optional<double> growth_ratio;
    bool theory_passed = true;
};

/// Cartesian product grid x algorithms x seeds; writes sweep.csv in that order.
inline int cmd_sweep(const ExperimentSpec& spec, std::vector<SweepRow>* rows_out = nullptr) {
    spec.validate();
    detail::prepare_output_dir(spec.out_dir);
    struct Job {
        LandscapeParams params;
        Algo algo;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const LandscapeParams& p : spec.grid())
        for (Algo a : spec.algos)
            for (std::uint64_t s : spec.seeds) jobs.push_back({p, a, s});
    auto rows = parallel_map<SweepRow>(jobs.size(), spec.jobs, [&](std::size_t i) {
        const RunResult r = run_experiment(jobs[i].params, jobs[i].algo, jobs[i].seed, spec.run);
        SweepRow row{r.params, r.algo, r.seed, r.trajectory.outcome, r.trajectory.total_iters, {}, true};
        if (r.theory.growth) row.growth_ratio = r.theory.growth->growth_ratio;
        row.theory_passed = r.theory.passed();
        return row;
    });
    std::ostringstream os;
    os << io::kSweepHeader << '\n';
    bool passed = true;
    for (const SweepRow& r : rows) {
        os << io::num(r.params.L) << ',' << io::num(r.params.gamma) << ',' << io::num(r.params.tau)
           << ',' << r.params.n_saddles << ',' << r.seed << ',' << to_string(r.algo) << ','
           << to_string(r.outcome) << ',' << r.total_iters << ','
           << (r.growth_ratio ? io::num(*r.growth_ratio) : std::string("nan")) << '\n';
        passed = passed && r.theory_passed;
    }
    detail::write_file(spec.out_dir / "sweep.csv", os.str());
    if (rows_out) *rows_out = std::move(rows);
    return passed ? kExitOk : kExitCheckFailed;
}

/// Plot-ready series from a cmd_run output directory: f against iteration,
/// the x1/x2 escape path, and per-block residence bars for every run.
inline int cmd_plotdata(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir) {
    const auto summary_path = in_dir / "summary.json";
    if (!std::filesystem::exists(summary_path))
        throw IoError("missing " + summary_path.string() + " (run `staircase run` first)");
    io::json summary;
    try {
        summary = io::json::parse(detail::read_file(summary_path));
        summary.at("runs");
    } catch (const io::json::exception& e) {
        throw IoError("unreadable " + summary_path.string() + ": " + e.what());
    }
    detail::prepare_output_dir(out_dir);

    for (const auto& run : summary.at("runs")) {
        const std::string tag = run.at("tag").get<std::string>();
        const std::string csv = detail::read_file(in_dir / run.at("csv").get<std::string>());
        std::istringstream lines(csv);
        std::string line;
        std::getline(lines, line);  // header
        std::ostringstream f_series, path;
        f_series << "iter,f\n";
        path << "iter,x1,x2\n";
        while (std::getline(lines, line)) {
            if (line.empty()) continue;
            std::vector<std::string> cols;
            std::istringstream row(line);
            for (std::string cell; std::getline(row, cell, ',');) cols.push_back(cell);
            if (cols.size() < 4) throw IoError("malformed trajectory row in " + tag + ": " + line);
            f_series << cols[0] << ',' << cols[3] << '\n';
            path << cols[0] << ',' << cols[1] << ',' << cols[2] << '\n';
        }
        std::ostringstream bars;
        bars << "block,t,t_prime\n";
        for (const auto& rec : run.at("escape_records"))
            bars << rec.at("index").get<int>() << ',' << rec.at("t").get<long>() << ','
                 << rec.at("t_prime").get<long>() << '\n';
        detail::write_file(out_dir / ("f_series_" + tag + ".csv"), f_series.str());
        detail::write_file(out_dir / ("path_" + tag + ".csv"), path.str());
        detail::write_file(out_dir / ("escape_bars_" + tag + ".csv"), bars.str());
    }
    return kExitOk;
}

}  // namespace staircase
