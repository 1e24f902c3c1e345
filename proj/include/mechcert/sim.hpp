#pragma once

// Seeded Monte Carlo engine for Beta-Bernoulli Thompson sampling with and
// without a hybrid mechanistic prior, against a fixed off-grid dose.
//
// Keying: the environment of trial m (recommended arm and true optimum) is
// drawn from stream (seed, Environment, m) and is shared by every
// algorithm. Both Thompson variants play from stream (seed, Thompson, m, t)
// at round t, so with a uniform hybrid prior they follow identical
// trajectories.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <thread>
#include <variant>
#include <vector>

#include "mechcert/csv.hpp"
#include "mechcert/error.hpp"
#include "mechcert/prior.hpp"
#include "mechcert/rng.hpp"

namespace mechcert {

/// Two-sided normal quantile for a 96% interval.
inline constexpr double kZ96 = 2.0537;

/// Pseudo-count scale of the hybrid Beta encoding, fixed once by
/// `calibrate_strength` against the reference hybrid regret column.
inline constexpr double kDefaultPriorStrength = 2.0;

struct BanditEnvironment {
    std::vector<double> means;
    int optimal = 0;

    [[nodiscard]] int k() const noexcept { return static_cast<int>(means.size()); }
    [[nodiscard]] double best() const { return means.at(static_cast<std::size_t>(optimal)); }
};

/// One arm at `p_opt`, the rest at `p_bsa`.
[[nodiscard]] inline BanditEnvironment build_environment(int k, int optimal, double p_opt, double p_bsa) {
    detail::require(k >= 2, "k", "arm count must be >= 2");
    detail::require(optimal >= 0 && optimal < k, "optimal", "must be an arm index in [0, k)");
    detail::require(p_bsa >= 0.0 && p_opt <= 1.0, "p_opt", "attainment probabilities must lie in [0, 1]");
    detail::require(p_bsa < p_opt, "p_bsa", "must be strictly below p_opt");
    BanditEnvironment env;
    env.means.assign(static_cast<std::size_t>(k), p_bsa);
    env.means[static_cast<std::size_t>(optimal)] = p_opt;
    env.optimal = optimal;
    return env;
}

struct HybridTS {
    TwoLevelPrior prior;
    double strength = kDefaultPriorStrength;
};

struct UninformedTS {};

/// Off-grid fixed dose with the given attainment probability.
struct FixedArm {
    double attainment = 0.20;
};

using Policy = std::variant<HybridTS, UninformedTS, FixedArm>;

enum class Algorithm : std::uint64_t { HybridTS = 0, UninformedTS = 1, FixedBSA = 2 };

[[nodiscard]] constexpr const char* to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::HybridTS: return "hybrid_ts";
        case Algorithm::UninformedTS: return "uninformed_ts";
        case Algorithm::FixedBSA: return "bsa";
    }
    return "?";
}

enum class Stream : std::uint64_t { Environment = 1, Thompson = 2 };

namespace detail {

struct BetaArm {
    double a = 1.0;
    double b = 1.0;
};

inline std::vector<BetaArm> initial_posteriors(const Policy& policy, int k) {
    std::vector<BetaArm> arms(static_cast<std::size_t>(k));
    if (const auto* h = std::get_if<HybridTS>(&policy)) {
        require(h->prior.k == k, "prior", "arm count must match the environment");
        require(h->strength >= 0.0, "strength", "must be >= 0");
        const double u = 1.0 / k;
        const double scale = h->strength * k;
        for (int j = 0; j < k; ++j) {
            const double m = h->prior.mass(j);
            arms[static_cast<std::size_t>(j)] = {1.0 + scale * std::max(m - u, 0.0),
                                                 1.0 + scale * std::max(u - m, 0.0)};
        }
    }
    return arms;
}

inline double sample_beta(rng::CounterEngine& e, double a, double b) {
    const double x = std::gamma_distribution<double>(a, 1.0)(e);
    const double y = std::gamma_distribution<double>(b, 1.0)(e);
    return x / (x + y);
}

}  // namespace detail

/// Cumulative pseudo-regret of one trial. `trial_key` seeds the per-round
/// Thompson streams; FixedArm is deterministic.
[[nodiscard]] inline double run_trial(const Policy& policy, const BanditEnvironment& env, int n,
                                      std::uint64_t trial_key) {
    detail::require(n >= 1, "n", "horizon must be >= 1");
    detail::require(env.k() >= 2, "env", "needs at least two arms");
    const double best = env.best();

    if (const auto* f = std::get_if<FixedArm>(&policy)) {
        detail::require(f->attainment <= best, "attainment", "must not exceed the optimal mean");
        double regret = 0.0;
        for (int t = 0; t < n; ++t) {
            regret += best - f->attainment;
        }
        return regret;
    }

    auto arms = detail::initial_posteriors(policy, env.k());
    double regret = 0.0;
    for (int t = 0; t < n; ++t) {
        rng::CounterEngine e(rng::derive_key(trial_key, static_cast<std::uint64_t>(t)));
        int pick = 0;
        double top = -1.0;
        for (int j = 0; j < env.k(); ++j) {
            const auto& arm = arms[static_cast<std::size_t>(j)];
            const double theta = detail::sample_beta(e, arm.a, arm.b);
            if (theta > top) {  // strict: ties go to the lowest index
                top = theta;
                pick = j;
            }
        }
        const double mean = env.means[static_cast<std::size_t>(pick)];
        regret += best - mean;
        auto& arm = arms[static_cast<std::size_t>(pick)];
        if (rng::uniform01(e) < mean) {
            arm.a += 1.0;
        } else {
            arm.b += 1.0;
        }
    }
    return regret;
}

struct ExperimentConfig {
    int k = 8;
    int n = 12;
    int trials = 10000;
    std::uint64_t seed = 42;
    double p_opt = 0.85;
    double p_bsa = 0.20;
    std::vector<double> r_mech_grid{0.0, 0.3, 0.8, 1.4, 1.9};
    double prior_strength = kDefaultPriorStrength;
    /// Horizon sweep and fixed information level of the finite-sample table.
    std::vector<int> n_grid{5, 10, 20, 50, 200};
    double table2_r_mech = 1.9;
    unsigned workers = 1;

    void validate() const {
        detail::require(k >= 2, "k", "arm count must be >= 2");
        detail::require(n >= 1, "n", "horizon must be >= 1");
        detail::require(trials >= 1, "trials", "must be >= 1");
        detail::require(p_bsa >= 0.0 && p_opt <= 1.0 && p_bsa < p_opt, "p_opt", "need 0 <= p_bsa < p_opt <= 1");
        detail::require(prior_strength >= 0.0, "prior_strength", "must be >= 0");
        detail::require(workers >= 1, "workers", "must be >= 1");
        const double h_max = std::log(static_cast<double>(k));
        for (double r : r_mech_grid) {
            detail::require(r >= 0.0 && r <= h_max + 1e-12, "r_mech_grid", "values must lie in [0, ln k]");
        }
        detail::require(table2_r_mech >= 0.0 && table2_r_mech <= h_max + 1e-12, "table2_r_mech",
                        "must lie in [0, ln k]");
        for (int h : n_grid) {
            detail::require(h >= 1, "n_grid", "horizons must be >= 1");
        }
    }
};

struct TrialEnvironment {
    int recommended = 0;
    int optimal = 0;
};

/// Recommended arm uniform; optimum equal to it with probability beta,
/// otherwise uniform over the other arms.
[[nodiscard]] inline TrialEnvironment draw_trial_environment(std::uint64_t seed, int trial, const TwoLevelPrior& shape) {
    rng::CounterEngine e(rng::derive_key(seed, {static_cast<std::uint64_t>(Stream::Environment),
                                                static_cast<std::uint64_t>(trial)}));
    const int k = shape.k;
    TrialEnvironment env;
    env.recommended = static_cast<int>(rng::uniform_below(e, static_cast<std::uint64_t>(k)));
    const double u = rng::uniform01(e);
    const auto other = static_cast<int>(rng::uniform_below(e, static_cast<std::uint64_t>(k - 1)));
    env.optimal = u < shape.beta ? env.recommended : (env.recommended + 1 + other) % k;
    return env;
}

/// Per-trial regrets, indexed by trial. Runs on `config.workers` threads;
/// the result does not depend on the worker count.
[[nodiscard]] inline std::vector<double> simulate_trials(const ExperimentConfig& config, Algorithm algorithm,
                                                         double r_mech, int n) {
    config.validate();
    detail::require(n >= 1, "n", "horizon must be >= 1");
    const auto shape = solve_prior_for_r_mech(config.k, r_mech);
    std::vector<double> out(static_cast<std::size_t>(config.trials));

    auto run_range = [&](int begin, int end) {
        for (int m = begin; m < end; ++m) {
            const auto te = draw_trial_environment(config.seed, m, shape);
            const auto env = build_environment(config.k, te.optimal, config.p_opt, config.p_bsa);
            const std::uint64_t key = rng::derive_key(
                config.seed, {static_cast<std::uint64_t>(Stream::Thompson), static_cast<std::uint64_t>(m)});
            Policy policy = UninformedTS{};
            if (algorithm == Algorithm::HybridTS) {
                auto prior = shape;
                prior.recommended = te.recommended;
                policy = HybridTS{prior, config.prior_strength};
            } else if (algorithm == Algorithm::FixedBSA) {
                policy = FixedArm{config.p_bsa};
            }
            out[static_cast<std::size_t>(m)] = run_trial(policy, env, n, key);
        }
    };

    const int workers = static_cast<int>(std::min<unsigned>(config.workers, static_cast<unsigned>(config.trials)));
    if (workers <= 1) {
        run_range(0, config.trials);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (config.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(config.trials, begin + chunk);
        if (begin < end) {
            pool.emplace_back(run_range, begin, end);
        }
    }
    for (auto& t : pool) {
        t.join();
    }
    return out;
}

struct RegretSummary {
    double mean = 0.0;
    double ci96_halfwidth = 0.0;
    int trials = 0;
};

/// Mean and 96% normal half-width, reduced in trial order.
[[nodiscard]] inline RegretSummary summarize(const std::vector<double>& regrets) {
    detail::require(!regrets.empty(), "regrets", "must be non-empty");
    RegretSummary s;
    s.trials = static_cast<int>(regrets.size());
    // Welford's update; a constant sample keeps mean exact and variance zero.
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < regrets.size(); ++i) {
        const double d = regrets[i] - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (regrets[i] - mean);
    }
    s.mean = mean;
    if (s.trials > 1) {
        s.ci96_halfwidth = kZ96 * std::sqrt(m2 / (s.trials - 1)) / std::sqrt(static_cast<double>(s.trials));
    }
    return s;
}

[[nodiscard]] inline RegretSummary run_monte_carlo(const ExperimentConfig& config, Algorithm algorithm,
                                                   double r_mech) {
    return summarize(simulate_trials(config, algorithm, r_mech, config.n));
}

struct Table1Row {
    double r_mech = 0.0;
    double h_mech = 0.0;
    RegretSummary hyb;
    RegretSummary uninf;
    RegretSummary bsa;
    double ratio_uninf_hyb = 0.0;
    double lb_prediction = 0.0;
    double ratio_bsa_hyb = 0.0;
};

namespace detail {
inline double safe_ratio(double num, double den) {
    return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}
}  // namespace detail

/// Regret at the configured horizon across the information grid.
[[nodiscard]] inline std::vector<Table1Row> table1_experiment(const ExperimentConfig& config) {
    config.validate();
    const double h_mu = std::log(static_cast<double>(config.k));
    std::vector<Table1Row> rows;
    for (double r : config.r_mech_grid) {
        Table1Row row;
        row.r_mech = r;
        row.h_mech = std::max(h_mu - r, 0.0);
        row.hyb = run_monte_carlo(config, Algorithm::HybridTS, r);
        row.uninf = run_monte_carlo(config, Algorithm::UninformedTS, r);
        row.bsa = run_monte_carlo(config, Algorithm::FixedBSA, r);
        row.ratio_uninf_hyb = detail::safe_ratio(row.uninf.mean, row.hyb.mean);
        row.lb_prediction = std::sqrt(detail::safe_ratio(h_mu, row.h_mech));
        row.ratio_bsa_hyb = detail::safe_ratio(row.bsa.mean, row.hyb.mean);
        rows.push_back(row);
    }
    return rows;
}

struct Table2Row {
    int n = 0;
    RegretSummary hyb;
    RegretSummary uninf;
    double ratio = 0.0;
};

/// Regret across horizons at a fixed information level. Both algorithms see
/// the same environment draws for each trial index.
[[nodiscard]] inline std::vector<Table2Row> table2_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<Table2Row> rows;
    for (int h : config.n_grid) {
        Table2Row row;
        row.n = h;
        row.hyb = summarize(simulate_trials(config, Algorithm::HybridTS, config.table2_r_mech, h));
        row.uninf = summarize(simulate_trials(config, Algorithm::UninformedTS, config.table2_r_mech, h));
        row.ratio = detail::safe_ratio(row.uninf.mean, row.hyb.mean);
        rows.push_back(row);
    }
    return rows;
}

/// Reference hybrid regret column (N = 12) at the default information grid.
inline constexpr double kReferenceHybridRegret[] = {5.89, 4.32, 3.03, 1.45, 0.30};

struct StrengthFit {
    double strength = 0.0;
    double squared_error = 0.0;
};

/// Squared deviation of the simulated hybrid column from `targets` for each
/// candidate strength, in candidate order. `config.r_mech_grid` must align
/// with `targets`.
[[nodiscard]] inline std::vector<StrengthFit> fit_prior_strength(ExperimentConfig config,
                                                                 const std::vector<double>& candidates,
                                                                 const std::vector<double>& targets) {
    detail::require(config.r_mech_grid.size() == targets.size(), "targets", "must align with r_mech_grid");
    std::vector<StrengthFit> fits;
    for (double s : candidates) {
        config.prior_strength = s;
        StrengthFit f{s, 0.0};
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const double d = run_monte_carlo(config, Algorithm::HybridTS, config.r_mech_grid[i]).mean - targets[i];
            f.squared_error += d * d;
        }
        fits.push_back(f);
    }
    return fits;
}

[[nodiscard]] inline StrengthFit best_fit(const std::vector<StrengthFit>& fits) {
    detail::require(!fits.empty(), "fits", "must be non-empty");
    return *std::min_element(fits.begin(), fits.end(), [](const StrengthFit& a, const StrengthFit& b) {
        return a.squared_error < b.squared_error;
    });
}

inline void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows) {
    out << "r_mech,h_mech,hyb_mean,hyb_ci,uninf_mean,uninf_ci,bsa_mean,bsa_ci,ratio_uninf_hyb,lb_prediction,"
           "ratio_bsa_hyb\n";
    for (const auto& r : rows) {
        csv::write_row(out, {r.r_mech, r.h_mech, r.hyb.mean, r.hyb.ci96_halfwidth, r.uninf.mean,
                             r.uninf.ci96_halfwidth, r.bsa.mean, r.bsa.ci96_halfwidth, r.ratio_uninf_hyb,
                             r.lb_prediction, r.ratio_bsa_hyb});
    }
}

inline void write_table2_csv(std::ostream& out, const std::vector<Table2Row>& rows) {
    out << "n,hyb_mean,hyb_ci,uninf_mean,uninf_ci,ratio\n";
    for (const auto& r : rows) {
        csv::write_row(out, {static_cast<double>(r.n), r.hyb.mean, r.hyb.ci96_halfwidth, r.uninf.mean,
                             r.uninf.ci96_halfwidth, r.ratio});
    }
}

}  // namespace mechcert
