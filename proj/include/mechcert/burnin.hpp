#pragma once

// Lower bound on the regret a confident-but-wrong prior forces before the
// optimum is identified, via a sequential-test argument.

#include <cmath>

#include "mechcert/error.hpp"

namespace mechcert {

/// Bernoulli KL divergence kl(p, q) in nats, p and q in (0, 1).
[[nodiscard]] inline double binary_kl(double p, double q) {
    detail::require(p > 0.0 && p < 1.0, "p", "must lie in (0, 1)");
    detail::require(q > 0.0 && q < 1.0, "q", "must lie in (0, 1)");
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

/// Prior weight on pi* once the remaining mass is spread over all k arms.
[[nodiscard]] inline double effective_prior_weight(double epsilon, int k) {
    detail::require(epsilon > 0.0 && epsilon < 1.0, "epsilon", "must lie in (0, 1)");
    detail::require(k >= 2, "k", "arm count must be >= 2");
    return epsilon / (1.0 - epsilon + epsilon * k);
}

struct BurnInParams {
    double epsilon = 0.2;  ///< prior mass on the true optimum
    double delta = 0.01;   ///< allowed identification failure probability
    double gap = 0.2;      ///< sub-optimality gap of the nominated arm
    int k = 8;
};

struct BurnInReport {
    double bound = 0.0;  ///< cycles
    double epsilon_k = 0.0;
    double kl = 0.0;
    bool degenerate = false;           ///< delta >= 1 - epsilon: log term non-positive
    bool assumption_violated = false;  ///< epsilon > delta
};

[[nodiscard]] inline BurnInReport burn_in_lower_bound(const BurnInParams& p) {
    detail::require(p.epsilon > 0.0 && p.epsilon < 1.0, "epsilon", "must lie in (0, 1)");
    detail::require(p.delta > 0.0 && p.delta < 0.5, "delta", "must lie in (0, 1/2)");
    detail::require(p.gap >= 0.0 && std::isfinite(p.gap), "gap", "must be finite and >= 0");
    detail::require(p.k >= 2, "k", "arm count must be >= 2");

    BurnInReport r;
    r.epsilon_k = effective_prior_weight(p.epsilon, p.k);
    r.kl = binary_kl(r.epsilon_k, 1.0 - r.epsilon_k);
    r.assumption_violated = p.epsilon > p.delta;
    const double odds = (1.0 - p.epsilon) / p.delta;
    // relative slack so that delta == 1 - epsilon is caught despite rounding
    if (odds <= 1.0 + 1e-12) {
        r.degenerate = true;
        return r;
    }
    r.bound = (1.0 - p.delta) * (1.0 - p.epsilon) * p.gap * std::log(odds) / r.kl;
    return r;
}

}  // namespace mechcert
