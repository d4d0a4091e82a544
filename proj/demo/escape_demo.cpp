// Runs gradient descent and noisy descent from the same start and prints how
// long each spent in every block on the way down.

#include <cstdio>
#include <random>

#include "staircase/staircase.hpp"

int main() {
    using namespace staircase;

    const LandscapeParams params{1.0, 0.5, 1.0, 6};
    const Landscape land(params);
    std::mt19937_64 rng(7);
    const Point start = init_sample(params, rng);
    std::printf("start (%.3g, %.3g), f = %.6g\n", start.x1, start.x2, land.value(start));

    GdConfig config;
    config.max_iter = 200'000;
    for (bool noisy : {false, true}) {
        std::optional<NoiseConfig> noise;
        if (noisy) noise = NoiseConfig{0.1, 7, false};
        ResidenceTally tally(params, SegmentMode::FirstPassage);
        const Trajectory traj = run(land, config, noise, start, tally);
        std::printf("\n%s: %s after %ld steps\n", noisy ? "noisy descent" : "gradient descent",
                    std::string(to_string(traj.outcome)).c_str(), traj.total_iters);
        for (const EscapeRecord& r : tally.records())
            std::printf("  block %2d  %6ld steps, buffer %3ld, total %6ld%s\n", r.index, r.t,
                        r.t_prime, r.T, r.complete ? "" : "  (run ended here)");
    }
}
