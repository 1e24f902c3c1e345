#pragma once

// Retention and impossibility bounds for recommendation priors deployed
// under a shift between training and test joint distributions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mechcert/error.hpp"
#include "mechcert/prior.hpp"

namespace mechcert {

inline constexpr int kRetentionMinArms = 12;

/// Largest KL shift for which half the training information is retained.
[[nodiscard]] inline double retention_threshold(double r_train, int k) {
    detail::require(r_train >= 0.0, "r_train", "must be >= 0");
    detail::require(k >= 2, "k", "arm count must be >= 2");
    const double lk = std::log(static_cast<double>(k));
    return r_train * r_train / (2.0 * k * k * lk * lk);
}

/// Smallest training information covered by the retention guarantee,
/// 2 k^(4 - k/2) ln k. Empty for k < 12, where the guarantee does not apply.
[[nodiscard]] inline std::optional<double> r_min(int k) {
    if (k < kRetentionMinArms) {
        return std::nullopt;
    }
    const double kd = static_cast<double>(k);
    return 2.0 * std::pow(kd, 4.0 - kd / 2.0) * std::log(kd);
}

/// Mutual-information perturbation bound 3 e ln k + e ln(2/e) at the
/// L1 radius e = r_train / (k ln k) implied by the retention threshold.
/// Retention holds when this stays below r_train / 2.
[[nodiscard]] inline double retention_perturbation_bound(double r_train, int k) {
    detail::require(r_train > 0.0, "r_train", "must be > 0");
    detail::require(k >= 2, "k", "arm count must be >= 2");
    const double lk = std::log(static_cast<double>(k));
    const double eps = r_train / (k * lk);
    return 3.0 * eps * lk + eps * std::log(2.0 / eps);
}

enum class Retention { Guaranteed, NotGuaranteed, OutOfScope };

[[nodiscard]] constexpr const char* to_string(Retention r) noexcept {
    switch (r) {
        case Retention::Guaranteed: return "Guaranteed";
        case Retention::NotGuaranteed: return "NotGuaranteed";
        case Retention::OutOfScope: return "OutOfScope";
    }
    return "?";
}

struct ShiftReport {
    double r_train = 0.0;
    int k = 0;
    double delta_pi = 0.0;
    double threshold = 0.0;
    std::optional<double> r_min;
    Retention retained = Retention::NotGuaranteed;
};

/// A shift above the threshold, or training information below r_min, is
/// NotGuaranteed. A shift within the threshold at k < 12 is OutOfScope.
[[nodiscard]] inline ShiftReport check_retention(double r_train, int k, double delta_pi) {
    detail::require(delta_pi >= 0.0, "delta_pi", "must be >= 0");
    ShiftReport r;
    r.r_train = r_train;
    r.k = k;
    r.delta_pi = delta_pi;
    r.threshold = retention_threshold(r_train, k);
    r.r_min = r_min(k);
    if (delta_pi > r.threshold) {
        r.retained = Retention::NotGuaranteed;
    } else if (!r.r_min) {
        r.retained = Retention::OutOfScope;
    } else {
        r.retained = r_train >= *r.r_min ? Retention::Guaranteed : Retention::NotGuaranteed;
    }
    return r;
}

/// First k/2 arm indices.
[[nodiscard]] inline std::vector<int> default_subset(int k) {
    std::vector<int> s(static_cast<std::size_t>(k / 2));
    for (int i = 0; i < k / 2; ++i) {
        s[static_cast<std::size_t>(i)] = i;
    }
    return s;
}

namespace detail {

inline std::vector<bool> subset_mask(int k, const std::vector<int>& subset) {
    require(k >= 2 && k % 2 == 0, "k", "impossibility construction needs an even arm count");
    require(subset.size() == static_cast<std::size_t>(k / 2), "subset", "must hold exactly k/2 arms");
    std::vector<bool> in(static_cast<std::size_t>(k), false);
    for (int s : subset) {
        require(s >= 0 && s < k, "subset", "arm index out of range");
        require(!in[static_cast<std::size_t>(s)], "subset", "arm indices must be distinct");
        in[static_cast<std::size_t>(s)] = true;
    }
    return in;
}

inline void require_uniform_rows(const JointDistribution& p) {
    const double u = 1.0 / p.k();
    for (double m : p.row_marginal()) {
        require(std::abs(m - u) <= 1e-9, "joint", "row marginal must be uniform");
    }
}

}  // namespace detail

/// Test joint Q keeping P's conditionals on `subset` and replacing the rest
/// by uniform recommendations. The row marginal of P is preserved.
[[nodiscard]] inline JointDistribution impossibility_construction(const JointDistribution& p,
                                                                  const std::vector<int>& subset) {
    const int k = p.k();
    const auto in = detail::subset_mask(k, subset);
    detail::require_uniform_rows(p);
    const auto rows = p.row_marginal();
    std::vector<double> q(p.probs().begin(), p.probs().end());
    for (int i = 0; i < k; ++i) {
        if (in[static_cast<std::size_t>(i)]) {
            continue;
        }
        for (int j = 0; j < k; ++j) {
            q[static_cast<std::size_t>(i * k + j)] = rows[static_cast<std::size_t>(i)] / k;
        }
    }
    return JointDistribution::create(k, std::move(q));
}

struct ImpossibilityReport {
    JointDistribution q;
    double h_cond_p = 0.0;
    double h_cond_q = 0.0;
    double mi_p = 0.0;
    double mi_q = 0.0;
    std::optional<double> kl_q_p;  ///< D_KL(Q || P), the forward test-vs-train shift
    std::optional<double> kl_p_q;  ///< D_KL(P || Q)
    /// |H_Q(pi_hat|pi*) - (H_P(pi_hat|pi*)/2 + ln k / 2)|
    double residual_a = 0.0;
    /// |D_KL(Q||P) - (ln k - H_P(pi_hat|pi*))/2|, infinite on support violation
    double residual_b = 0.0;
    /// max(I_Q - ln k / 2, 0)
    double residual_c = 0.0;
};

[[nodiscard]] inline ImpossibilityReport verify_impossibility(const JointDistribution& p,
                                                              const std::vector<int>& subset) {
    const double lk = std::log(static_cast<double>(p.k()));
    ImpossibilityReport r;
    r.q = impossibility_construction(p, subset);
    const auto& q = r.q;
    r.h_cond_p = conditional_entropy(p);
    r.h_cond_q = conditional_entropy(q);
    r.mi_p = mutual_information(p);
    r.mi_q = mutual_information(q);
    r.kl_q_p = kl_divergence(q, p);
    r.kl_p_q = kl_divergence(p, q);
    r.residual_a = std::abs(r.h_cond_q - (0.5 * r.h_cond_p + 0.5 * lk));
    r.residual_b = r.kl_q_p ? std::abs(*r.kl_q_p - 0.5 * (lk - r.h_cond_p))
                            : std::numeric_limits<double>::infinity();
    r.residual_c = std::max(r.mi_q - 0.5 * lk, 0.0);
    return r;
}

}  // namespace mechcert
