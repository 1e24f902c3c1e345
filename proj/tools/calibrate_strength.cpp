// One-time calibration of the hybrid prior pseudo-count scale: grid search
// over integer strengths against the reference hybrid regret column.

#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "mechcert/sim.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Calibrate the hybrid Beta prior strength"};
    mechcert::ExperimentConfig config;
    int s_max = 40;
    app.add_option("--trials", config.trials, "Monte Carlo trials per cell")->check(CLI::PositiveNumber);
    app.add_option("--seed", config.seed, "master seed");
    app.add_option("--max-strength", s_max, "largest integer strength tried")->check(CLI::PositiveNumber);
    app.add_option("--workers", config.workers, "worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    std::vector<double> candidates;
    for (int s = 1; s <= s_max; ++s) {
        candidates.push_back(s);
    }
    const std::vector<double> targets(std::begin(mechcert::kReferenceHybridRegret),
                                      std::end(mechcert::kReferenceHybridRegret));
    const auto fits = mechcert::fit_prior_strength(config, candidates, targets);
    std::printf("strength,squared_error\n");
    for (const auto& f : fits) {
        std::printf("%g,%.6g\n", f.strength, f.squared_error);
    }
    const auto best = mechcert::best_fit(fits);
    std::fprintf(stderr, "best strength %g (squared error %.6g)\n", best.strength, best.squared_error);
    return 0;
}
