#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mechcert/sim.hpp"
#include "support.hpp"

using namespace mechcert;

namespace {

ExperimentConfig small_config(int trials = 500) {
    ExperimentConfig c;
    c.trials = trials;
    return c;
}

}  // namespace

TEST(BuildEnvironment, Examples) {
    const auto env = build_environment(8, 3, 0.85, 0.20);
    ASSERT_EQ(env.k(), 8);
    EXPECT_EQ(env.optimal, 3);
    for (int j = 0; j < 8; ++j) {
        EXPECT_EQ(env.means[static_cast<std::size_t>(j)], j == 3 ? 0.85 : 0.20);
    }
    const auto det = build_environment(2, 0, 1.0, 0.0);
    EXPECT_EQ(det.means, (std::vector<double>{1.0, 0.0}));
    EXPECT_THROW((void)build_environment(8, 0, 0.5, 0.5), DomainError);
    EXPECT_THROW((void)build_environment(8, 8, 0.85, 0.2), DomainError);
}

TEST(RunTrial, FixedArmIsDeterministicWorstCase) {
    const auto env = build_environment(8, 0, 0.85, 0.20);
    EXPECT_NEAR(run_trial(FixedArm{0.20}, env, 12, 1), 7.80, 1e-12);
    EXPECT_NEAR(run_trial(FixedArm{0.20}, env, 12, 1), 12 * (0.85 - 0.20), 1e-12);
}

TEST(RunTrial, RejectsZeroHorizon) {
    const auto env = build_environment(8, 0, 0.85, 0.20);
    EXPECT_THROW((void)run_trial(UninformedTS{}, env, 0, 1), DomainError);
}

TEST(RunTrial, SameKeySameTrajectory) {
    const auto env = build_environment(8, 2, 0.85, 0.20);
    for (std::uint64_t key = 0; key < 50; ++key) {
        EXPECT_EQ(run_trial(UninformedTS{}, env, 30, key), run_trial(UninformedTS{}, env, 30, key));
    }
}

TEST(RunTrial, DeterministicEnvironmentRegretCountsBadPulls) {
    const auto env = build_environment(2, 0, 1.0, 0.0);
    for (std::uint64_t key = 0; key < 50; ++key) {
        const double r = run_trial(UninformedTS{}, env, 20, key);
        EXPECT_EQ(r, std::floor(r));  // each bad pull costs exactly 1
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 20.0);
    }
}

TEST(RunTrial, SingleRoundUniformFirstPull) {
    // Exchangeable Beta(1,1) priors make the first pull uniform over arms.
    const auto env = build_environment(8, 5, 0.85, 0.20);
    const int m = 40000;
    double total = 0.0;
    for (int t = 0; t < m; ++t) {
        const double r = run_trial(UninformedTS{}, env, 1, rng::derive_key(99, {static_cast<std::uint64_t>(t)}));
        EXPECT_TRUE(r == 0.0 || std::abs(r - 0.65) < 1e-12);
        total += r;
    }
    const double expected = 7.0 / 8.0 * 0.65;
    const double se = 0.65 * std::sqrt(7.0 / 64.0) / std::sqrt(static_cast<double>(m));
    EXPECT_NEAR(total / m, expected, 5 * se);
}

TEST(RunTrial, PropertyRegretBoundedByWorstCase) {
    testsupport::Rng g(51);
    std::uniform_int_distribution<int> kd(2, 12);
    std::uniform_int_distribution<int> nd(1, 40);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const int k = kd(g);
        const double lo = 0.9 * u(g);
        const double hi = lo + 0.05 + (1.0 - lo - 0.05) * u(g);
        const auto env = build_environment(k, static_cast<int>(g() % k), hi, lo);
        const int n = nd(g);
        const double bound = n * (hi - lo) + 1e-12;
        const auto prior = solve_prior_for_r_mech(k, u(g) * std::log(static_cast<double>(k)),
                                                  static_cast<int>(g() % k));
        EXPECT_LE(run_trial(UninformedTS{}, env, n, g()), bound);
        EXPECT_LE(run_trial(HybridTS{prior, 2.0}, env, n, g()), bound);
        EXPECT_GE(run_trial(HybridTS{prior, 2.0}, env, n, g()), 0.0);
    }
}

TEST(RunTrial, PriorArmCountMustMatch) {
    const auto env = build_environment(8, 0, 0.85, 0.20);
    EXPECT_THROW((void)run_trial(HybridTS{solve_prior_for_r_mech(6, 0.5), 2.0}, env, 5, 1), DomainError);
}

TEST(DrawTrialEnvironment, OptimumFollowsRecommendationWithProbabilityBeta) {
    const auto shape = solve_prior_for_r_mech(8, 0.8);
    const int m = 20000;
    int hits = 0;
    std::vector<int> rec_counts(8, 0);
    for (int t = 0; t < m; ++t) {
        const auto te = draw_trial_environment(7, t, shape);
        ASSERT_GE(te.optimal, 0);
        ASSERT_LT(te.optimal, 8);
        hits += te.optimal == te.recommended;
        ++rec_counts[static_cast<std::size_t>(te.recommended)];
    }
    const double se = std::sqrt(shape.beta * (1 - shape.beta) / m);
    EXPECT_NEAR(static_cast<double>(hits) / m, shape.beta, 5 * se);
    for (int c : rec_counts) {
        EXPECT_NEAR(c / static_cast<double>(m), 1.0 / 8, 0.01);
    }
}

TEST(Summarize, MatchesTwoPassOracle) {
    testsupport::Rng g(52);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<double> v(1000);
    for (auto& x : v) x = u(g);
    const auto s = summarize(v);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(s.mean, mean, 1e-12);
    EXPECT_NEAR(s.ci96_halfwidth, 2.0537 * std::sqrt(ss / 999.0) / std::sqrt(1000.0), 1e-12);
    EXPECT_EQ(s.trials, 1000);
}

TEST(Summarize, ConstantSampleHasZeroWidth) {
    const auto s = summarize(std::vector<double>(777, 7.8));
    EXPECT_EQ(s.mean, 7.8);
    EXPECT_EQ(s.ci96_halfwidth, 0.0);
    EXPECT_EQ(summarize({3.0}).ci96_halfwidth, 0.0);
}

TEST(ExperimentConfig, Validation) {
    auto c = small_config();
    c.trials = 0;
    EXPECT_THROW(c.validate(), DomainError);
    c = small_config();
    c.p_bsa = 0.9;
    EXPECT_THROW(c.validate(), DomainError);
    c = small_config();
    c.r_mech_grid = {2.5};
    EXPECT_THROW(c.validate(), DomainError);
}

TEST(Simulate, HybridWithoutInformationEqualsUninformedPerTrial) {
    const auto c = small_config(2000);
    const auto hyb = simulate_trials(c, Algorithm::HybridTS, 0.0, 12);
    const auto uni = simulate_trials(c, Algorithm::UninformedTS, 0.0, 12);
    ASSERT_EQ(hyb.size(), uni.size());
    for (std::size_t i = 0; i < hyb.size(); ++i) {
        ASSERT_EQ(hyb[i], uni[i]) << "trial " << i;
    }
}

TEST(Simulate, SerialAndParallelAgreeBitwise) {
    auto serial = small_config(1001);
    auto parallel = serial;
    parallel.workers = 4;
    for (auto alg : {Algorithm::HybridTS, Algorithm::UninformedTS}) {
        EXPECT_EQ(simulate_trials(serial, alg, 1.4, 12), simulate_trials(parallel, alg, 1.4, 12));
    }
}

TEST(Simulate, RepeatedRunsAgreeAndSeedsMatter) {
    const auto c = small_config(300);
    const auto a = simulate_trials(c, Algorithm::HybridTS, 0.8, 12);
    EXPECT_EQ(a, simulate_trials(c, Algorithm::HybridTS, 0.8, 12));
    auto other = c;
    other.seed = 43;
    EXPECT_NE(a, simulate_trials(other, Algorithm::HybridTS, 0.8, 12));
}

TEST(MonteCarlo, UninformedLongHorizonBand) {
    auto c = small_config(2000);
    c.n = 200;
    const auto s = run_monte_carlo(c, Algorithm::UninformedTS, 1.9);
    EXPECT_GE(s.mean, 17.0);
    EXPECT_LE(s.mean, 18.6);
}

TEST(Table1, PredictionColumnAndShape) {
    const auto rows = table1_experiment(small_config(200));
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0].lb_prediction, 1.0);
    EXPECT_NEAR(rows[2].h_mech, 1.28, 0.01);
    EXPECT_NEAR(rows[4].lb_prediction, std::sqrt(std::log(8.0) / (std::log(8.0) - 1.9)), 1e-12);
    EXPECT_NEAR(rows[4].lb_prediction, 3.40, 0.02);
    for (const auto& r : rows) {
        EXPECT_NEAR(r.bsa.mean, 7.80, 1e-12);
        EXPECT_EQ(r.bsa.ci96_halfwidth, 0.0);
    }
}

TEST(Table2, ShortHorizonBands) {
    auto c = small_config(4000);
    c.n_grid = {5};
    const auto rows = table2_experiment(c);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_GE(rows[0].uninf.mean, 2.6);
    EXPECT_LE(rows[0].uninf.mean, 2.9);
    EXPECT_GE(rows[0].hyb.mean, 0.10);
    EXPECT_LE(rows[0].hyb.mean, 0.25);
}

TEST(StrengthFit, ReportsCandidatesInOrderAndPicksMinimum) {
    auto c = small_config(200);
    const std::vector<double> targets(std::begin(kReferenceHybridRegret), std::end(kReferenceHybridRegret));
    const auto fits = fit_prior_strength(c, {8.0, 2.0}, targets);
    ASSERT_EQ(fits.size(), 2u);
    EXPECT_EQ(fits[0].strength, 8.0);
    EXPECT_EQ(fits[1].strength, 2.0);
    EXPECT_EQ(best_fit(fits).squared_error, std::min(fits[0].squared_error, fits[1].squared_error));
    EXPECT_THROW((void)fit_prior_strength(c, {1.0}, {1.0, 2.0}), DomainError);
}

TEST(TableCsv, HeadersAreExact) {
    std::ostringstream t1, t2;
    write_table1_csv(t1, {});
    write_table2_csv(t2, {});
    EXPECT_EQ(t1.str(),
              "r_mech,h_mech,hyb_mean,hyb_ci,uninf_mean,uninf_ci,bsa_mean,bsa_ci,ratio_uninf_hyb,lb_prediction,"
              "ratio_bsa_hyb\n");
    EXPECT_EQ(t2.str(), "n,hyb_mean,hyb_ci,uninf_mean,uninf_ci,ratio\n");
}

TEST(TableCsv, SixSignificantDigits) {
    Table2Row row;
    row.n = 200;
    row.hyb = {3.5239812, 0.0895469123, 10};
    row.uninf = {17.95461, 0.1016724, 10};
    row.ratio = 5.0949912;
    std::ostringstream os;
    write_table2_csv(os, {row});
    EXPECT_EQ(os.str().substr(os.str().find('\n') + 1), "200,3.52398,0.0895469,17.9546,0.101672,5.09499\n");
}
