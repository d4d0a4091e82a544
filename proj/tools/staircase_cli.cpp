// staircase: build the saddle staircase, check it, run descent experiments
// and export plot data.
//
//   staircase check    --L 1 --gamma 0.5 --tau 1 --n-saddles 9 --out out/check
//   staircase run      --n-saddles 9 --algo gd,sgd --seeds 20 --out out/run
//   staircase sweep    --L 1,1.5 --algo gd,sgd --seeds 20 --jobs 8 --out out/sweep
//   staircase plotdata --in out/run --out out/plots
//
// Every option may also come from `--config file` holding `key = value`
// lines; command-line flags win over the file.

#include <chrono>
#include <ctime>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "staircase/experiment.hpp"

namespace {

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace staircase;

    CLI::App app{"Gradient descent on the saddle staircase"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "File of `key = value` lines; flags override it");

    std::vector<double> L{1.0}, gamma, tau{1.0};
    std::vector<int> n_saddles{9};
    std::vector<std::string> algos{"gd"};
    double eta = 0.0;
    long max_iter = 1'000'000;
    double stop_grad = 1e-10;
    long record_every = 1;
    std::uint64_t seed = 0;
    int seeds = 1;
    double noise_var = 0.1;
    bool noise_scaled = false;
    std::string out, in;
    int jobs = 1;
    long check_samples = 10'000, seam_samples = 1000, lipschitz_pairs = 100'000,
         min_points = 1'000'000;

    app.add_option("--L", L, "Curvature L (comma list for sweep)")->delimiter(',');
    app.add_option("--gamma", gamma, "Escape curvature (default L/2)")->delimiter(',');
    app.add_option("--tau", tau, "Block side length")->delimiter(',');
    app.add_option("--n-saddles", n_saddles, "Number of saddle blocks")->delimiter(',');
    app.add_option("--eta", eta, "Step size (default 1/(4L))");
    app.add_option("--max-iter", max_iter, "Iteration budget");
    app.add_option("--stop-grad", stop_grad, "Gradient norm that ends a run in the final block");
    app.add_option("--record-every", record_every, "Keep every k-th iterate in CSV output");
    app.add_option("--seed", seed, "First seed");
    app.add_option("--seeds", seeds, "Number of consecutive seeds starting at --seed");
    app.add_option("--noise-var", noise_var, "Per-coordinate noise variance for sgd");
    app.add_flag("--noise-scaled", noise_scaled, "Add eta * noise instead of noise");
    app.add_option("--algo", algos, "gd, sgd, or gd,sgd")->delimiter(',');
    app.add_option("--out", out, "Output directory (default ./out/<timestamp>)");
    app.add_option("--jobs", jobs, "Worker threads for run and sweep");
    app.add_option("--samples", check_samples, "check: gradient-check samples");
    app.add_option("--seam-samples", seam_samples, "check: samples per seam");
    app.add_option("--lipschitz-pairs", lipschitz_pairs, "check: Lipschitz probe pairs");
    app.add_option("--min-points", min_points, "check: global-minimum probe points");

    auto* check = app.add_subcommand("check", "Run the landscape self-checks");
    auto* runc = app.add_subcommand("run", "Run seeded descent experiments");
    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid");
    auto* plot = app.add_subcommand("plotdata", "Export plot-ready CSV from a run directory");
    plot->add_option("--in", in, "Directory written by `run`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return e.get_exit_code() == 0 ? code : kExitUsage;
    }

    try {
        ExperimentSpec spec;
        spec.L = L;
        spec.gamma = gamma;
        spec.tau = tau;
        spec.n_saddles = n_saddles;
        spec.algos.clear();
        for (const auto& a : algos) spec.algos.push_back(parse_algo(a));
        if (eta != 0.0) spec.run.config.eta = eta;
        spec.run.config.max_iter = max_iter;
        spec.run.config.stop_grad_norm = stop_grad;
        spec.run.config.record_every = record_every;
        spec.run.noise_variance = noise_var;
        spec.run.noise_scale_by_eta = noise_scaled;
        if (seeds < 1) throw UsageError("--seeds must be >= 1");
        spec.seeds.clear();
        for (int k = 0; k < seeds; ++k) spec.seeds.push_back(seed + k);
        spec.jobs = jobs;
        spec.out_dir = out.empty() ? std::filesystem::path("out") / timestamp()
                                   : std::filesystem::path(out);

        int code = kExitOk;
        if (check->parsed()) {
            CheckSettings s;
            s.gradient.n_samples = check_samples;
            s.seams.samples_per_seam = seam_samples;
            s.lipschitz_pairs = lipschitz_pairs;
            s.global_min_points = min_points;
            s.gradient.seed = s.seams.seed = seed;
            code = cmd_check(spec, s);
        } else if (runc->parsed()) {
            code = cmd_run(spec);
        } else if (sweep->parsed()) {
            code = cmd_sweep(spec);
        } else if (plot->parsed()) {
            code = cmd_plotdata(in, spec.out_dir);
        }
        std::cout << "wrote " << spec.out_dir.string() << (code == kExitOk ? "" : " (checks failed)")
                  << '\n';
        return code;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}
