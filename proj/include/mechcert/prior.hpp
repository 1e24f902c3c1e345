#pragma once

// Two-level hybrid priors and discrete information measures over a finite
// policy class.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mechcert/error.hpp"

namespace mechcert {

namespace detail {

[[nodiscard]] inline double xlogx(double x) noexcept { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace detail

/// Shannon entropy in nats, 0 ln 0 := 0.
[[nodiscard]] inline double entropy(std::span<const double> probs) noexcept {
    double h = 0.0;
    for (double p : probs) {
        h -= detail::xlogx(p);
    }
    return h;
}

/// Mass `beta` on the recommended arm, `alpha` on each of the other k-1.
struct TwoLevelPrior {
    int k = 0;
    int recommended = 0;
    double beta = 0.0;
    double alpha = 0.0;

    [[nodiscard]] double mass(int arm) const noexcept { return arm == recommended ? beta : alpha; }

    [[nodiscard]] std::vector<double> masses() const {
        std::vector<double> m(static_cast<std::size_t>(k), alpha);
        m[static_cast<std::size_t>(recommended)] = beta;
        return m;
    }
};

[[nodiscard]] inline double two_level_entropy(int k, double beta) {
    detail::require(k >= 2, "k", "arm count must be >= 2");
    const double lo = 1.0 / k;
    detail::require(beta >= lo - 1e-15 && beta <= 1.0, "beta", "must lie in [1/k, 1]");
    const double rest = 1.0 - beta;
    return -detail::xlogx(beta) - (rest > 0.0 ? rest * std::log(rest / (k - 1)) : 0.0);
}

/// Two-level prior whose entropy is ln k - r_mech. Entropy is strictly
/// decreasing in beta on [1/k, 1], so bisection brackets the unique root.
[[nodiscard]] inline TwoLevelPrior solve_prior_for_r_mech(int k, double r_mech, int recommended = 0) {
    detail::require(k >= 2, "k", "arm count must be >= 2");
    detail::require(recommended >= 0 && recommended < k, "recommended", "must be an arm index in [0, k)");
    const double h_max = std::log(static_cast<double>(k));
    detail::require(r_mech >= 0.0 && r_mech <= h_max + 1e-12, "r_mech", "must lie in [0, ln k]");

    TwoLevelPrior prior{k, recommended, 1.0 / k, 1.0 / k};
    if (r_mech == 0.0) {
        return prior;
    }
    const double target = h_max - r_mech;
    double lo = 1.0 / k;
    double hi = 1.0;
    if (target <= 0.0) {
        lo = 1.0;
    }
    while (hi > lo) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (two_level_entropy(k, mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint closer in entropy
    const double beta = std::abs(two_level_entropy(k, lo) - target) <= std::abs(two_level_entropy(k, hi) - target)
                            ? lo
                            : hi;
    prior.beta = beta;
    prior.alpha = (1.0 - beta) / (k - 1);
    return prior;
}

/// K x K table of P(pi* = i, pi_hat = j), row-major.
class JointDistribution {
public:
    static JointDistribution create(int k, std::vector<double> probs) {
        detail::require(k >= 1, "k", "must be >= 1");
        detail::require(probs.size() == static_cast<std::size_t>(k) * static_cast<std::size_t>(k), "probs",
                        "must hold k*k entries");
        double total = 0.0;
        for (double p : probs) {
            detail::require(p >= 0.0 && std::isfinite(p), "probs", "entries must be finite and >= 0");
            total += p;
        }
        detail::require(std::abs(total - 1.0) <= 1e-9, "probs", "entries must sum to 1");
        JointDistribution j;
        j.k_ = k;
        j.probs_ = std::move(probs);
        return j;
    }

    /// Rows of P(pi_hat | pi*) weighted by a row marginal.
    static JointDistribution from_conditional(std::span<const double> row_marginal,
                                              std::span<const double> conditional) {
        const auto k = row_marginal.size();
        detail::require(conditional.size() == k * k, "conditional", "must hold k*k entries");
        std::vector<double> probs(k * k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                probs[i * k + j] = row_marginal[i] * conditional[i * k + j];
            }
        }
        return create(static_cast<int>(k), std::move(probs));
    }

    static JointDistribution product(std::span<const double> row, std::span<const double> col) {
        detail::require(row.size() == col.size(), "col", "marginals must have equal length");
        const auto k = row.size();
        std::vector<double> probs(k * k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                probs[i * k + j] = row[i] * col[j];
            }
        }
        return create(static_cast<int>(k), std::move(probs));
    }

    /// Uniform pi* with the symmetric two-level channel P(pi_hat = pi* | pi*) = beta.
    static JointDistribution symmetric_two_level(int k, double beta) {
        detail::require(k >= 2, "k", "arm count must be >= 2");
        detail::require(beta >= 0.0 && beta <= 1.0, "beta", "must lie in [0, 1]");
        const double alpha = (1.0 - beta) / (k - 1);
        const auto n = static_cast<std::size_t>(k);
        std::vector<double> probs(n * n, alpha / k);
        for (std::size_t i = 0; i < n; ++i) {
            probs[i * n + i] = beta / k;
        }
        return create(k, std::move(probs));
    }

    [[nodiscard]] int k() const noexcept { return k_; }
    [[nodiscard]] double at(int i, int j) const { return probs_.at(index(i, j)); }
    [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }

    [[nodiscard]] std::span<const double> row(int i) const {
        return std::span<const double>(probs_).subspan(index(i, 0), static_cast<std::size_t>(k_));
    }

    [[nodiscard]] std::vector<double> row_marginal() const {
        std::vector<double> m(static_cast<std::size_t>(k_), 0.0);
        for (int i = 0; i < k_; ++i) {
            for (double p : row(i)) {
                m[static_cast<std::size_t>(i)] += p;
            }
        }
        return m;
    }

    [[nodiscard]] std::vector<double> col_marginal() const {
        std::vector<double> m(static_cast<std::size_t>(k_), 0.0);
        for (int i = 0; i < k_; ++i) {
            for (int j = 0; j < k_; ++j) {
                m[static_cast<std::size_t>(j)] += probs_[index(i, j)];
            }
        }
        return m;
    }

    /// P(pi_hat | pi* = i); empty row mass yields an all-zero row.
    [[nodiscard]] std::vector<double> conditional_row(int i) const {
        auto r = row(i);
        std::vector<double> out(r.begin(), r.end());
        double mass = 0.0;
        for (double p : out) {
            mass += p;
        }
        if (mass > 0.0) {
            for (double& p : out) {
                p /= mass;
            }
        }
        return out;
    }

private:
    [[nodiscard]] std::size_t index(int i, int j) const {
        detail::require(i >= 0 && i < k_ && j >= 0 && j < k_, "index", "out of range");
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(j);
    }

    int k_ = 0;
    std::vector<double> probs_;
};

[[nodiscard]] inline double joint_entropy(const JointDistribution& j) noexcept { return entropy(j.probs()); }

[[nodiscard]] inline double mutual_information(const JointDistribution& j) {
    const auto rows = j.row_marginal();
    const auto cols = j.col_marginal();
    double mi = 0.0;
    for (int a = 0; a < j.k(); ++a) {
        for (int b = 0; b < j.k(); ++b) {
            const double p = j.at(a, b);
            if (p > 0.0) {
                mi += p * std::log(p / (rows[static_cast<std::size_t>(a)] * cols[static_cast<std::size_t>(b)]));
            }
        }
    }
    return std::max(mi, 0.0);
}

/// H(pi_hat | pi*) = H(joint) - H(row marginal).
[[nodiscard]] inline double conditional_entropy(const JointDistribution& j) {
    const auto rows = j.row_marginal();
    return std::max(joint_entropy(j) - entropy(rows), 0.0);
}

/// D_KL(p || q) in nats; empty when p puts mass where q has none.
[[nodiscard]] inline std::optional<double> kl_divergence(const JointDistribution& p, const JointDistribution& q) {
    detail::require(p.k() == q.k(), "q", "joints must have the same arm count");
    const auto pp = p.probs();
    const auto qq = q.probs();
    double d = 0.0;
    for (std::size_t i = 0; i < pp.size(); ++i) {
        if (pp[i] == 0.0) {
            continue;
        }
        if (qq[i] == 0.0) {
            return std::nullopt;
        }
        d += pp[i] * std::log(pp[i] / qq[i]);
    }
    return std::max(d, 0.0);
}

// CSV: first line k, then k rows of k comma-separated probabilities.

inline void write_joint_csv(std::ostream& out, const JointDistribution& j) {
    out << j.k() << '\n';
    char buf[32];
    for (int i = 0; i < j.k(); ++i) {
        for (int c = 0; c < j.k(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", j.at(i, c));
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
}

[[nodiscard]] inline JointDistribution read_joint_csv(std::istream& in) {
    std::string line;
    detail::require(static_cast<bool>(std::getline(in, line)), "joint", "missing k header");
    int k = 0;
    try {
        std::size_t used = 0;
        k = std::stoi(line, &used);
        detail::require(line.find_first_not_of(" \t\r", used) == std::string::npos, "joint",
                        "header must be a single integer");
    } catch (const std::logic_error&) {
        throw DomainError("joint", "header must be an integer arm count");
    }
    detail::require(k >= 1, "joint", "arm count must be >= 1");
    std::vector<double> probs;
    probs.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
        detail::require(static_cast<bool>(std::getline(in, line)), "joint", "fewer than k rows");
        std::stringstream ss(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                probs.push_back(std::stod(cell));
            } catch (const std::logic_error&) {
                throw DomainError("joint", "row " + std::to_string(r + 1) + ": unparsable value '" + cell + "'");
            }
            ++cols;
        }
        detail::require(cols == k, "joint", "row " + std::to_string(r + 1) + " must have k entries");
    }
    return JointDistribution::create(k, std::move(probs));
}

}  // namespace mechcert
