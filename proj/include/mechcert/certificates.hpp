#pragma once

// Closed-form certificate quantities for a hybrid mechanistic prior:
// the Gaussian-channel capacity bound on mechanistic information, the
// residual entropy floor, the critical bias, regret envelopes and the
// calibration helpers used to pin the working parameters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>

#include "mechcert/error.hpp"

namespace mechcert {

inline constexpr double kNatsPerBit = 0.69314718055994530942;

[[nodiscard]] inline double to_bits(double nats) noexcept { return nats / kNatsPerBit; }

/// Raw calibration inputs. Unset `h_mu` means a uniform prior over `k`
/// policies (H = ln k); unset `sigma_f2` selects the canonical residual
/// variance.
struct CalibrationSpec {
    int k = 8;
    int n = 12;
    double sigma = 0.40;
    double kappa_mu = 1.8;
    double d_f = 3.0;
    double b_mu = 0.22;
    std::optional<double> h_mu;
    std::optional<double> sigma_f2;
};

[[nodiscard]] inline double canonical_sigma_f2(double sigma, double h_mu, double kappa_mu, double d_f) {
    detail::require(sigma > 0.0, "sigma", "must be > 0");
    detail::require(kappa_mu > 0.0, "kappa_mu", "must be > 0");
    detail::require(d_f > 0.0, "d_f", "must be > 0");
    detail::require(h_mu >= 0.0, "h_mu", "must be >= 0");
    return 2.0 * sigma * sigma * h_mu / (kappa_mu * kappa_mu * d_f);
}

/// Validated, immutable certificate parameters.
class CalibrationParams {
public:
    static CalibrationParams create(const CalibrationSpec& spec) {
        detail::require(spec.k >= 2, "k", "arm count must be >= 2");
        detail::require(spec.n >= 1, "n", "horizon must be >= 1");
        detail::require(spec.sigma > 0.0 && std::isfinite(spec.sigma), "sigma", "must be finite and > 0");
        detail::require(spec.kappa_mu > 0.0 && std::isfinite(spec.kappa_mu), "kappa_mu",
                        "must be finite and > 0");
        detail::require(spec.d_f > 0.0 && std::isfinite(spec.d_f), "d_f", "must be finite and > 0");
        detail::require(spec.b_mu >= 0.0 && std::isfinite(spec.b_mu), "b_mu", "must be finite and >= 0");

        CalibrationParams p;
        p.k_ = spec.k;
        p.n_ = spec.n;
        p.sigma_ = spec.sigma;
        p.kappa_mu_ = spec.kappa_mu;
        p.d_f_ = spec.d_f;
        p.b_mu_ = spec.b_mu;
        p.uniform_prior_ = !spec.h_mu.has_value();
        p.h_mu_ = spec.h_mu.value_or(std::log(static_cast<double>(spec.k)));
        detail::require(p.h_mu_ >= 0.0 && std::isfinite(p.h_mu_), "h_mu", "must be finite and >= 0");
        p.canonical_ = !spec.sigma_f2.has_value();
        if (p.canonical_) {
            p.sigma_f2_ = canonical_sigma_f2(p.sigma_, p.h_mu_, p.kappa_mu_, p.d_f_);
        } else {
            detail::require(*spec.sigma_f2 > 0.0 && std::isfinite(*spec.sigma_f2), "sigma_f2",
                            "must be finite and > 0");
            p.sigma_f2_ = *spec.sigma_f2;
        }
        return p;
    }

    [[nodiscard]] int k() const noexcept { return k_; }
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] double kappa_mu() const noexcept { return kappa_mu_; }
    [[nodiscard]] double d_f() const noexcept { return d_f_; }
    [[nodiscard]] double b_mu() const noexcept { return b_mu_; }
    [[nodiscard]] double h_mu() const noexcept { return h_mu_; }
    [[nodiscard]] double sigma_f2() const noexcept { return sigma_f2_; }
    [[nodiscard]] bool canonical() const noexcept { return canonical_; }
    [[nodiscard]] bool uniform_prior() const noexcept { return uniform_prior_; }

private:
    CalibrationParams() = default;

    int k_ = 0;
    int n_ = 0;
    double sigma_ = 0.0;
    double kappa_mu_ = 0.0;
    double d_f_ = 0.0;
    double b_mu_ = 0.0;
    double h_mu_ = 0.0;
    double sigma_f2_ = 0.0;
    bool canonical_ = true;
    bool uniform_prior_ = true;
};

/// Upper bound on mechanistic information (nats) through a Gaussian channel
/// whose noise is model bias plus reward noise.
[[nodiscard]] inline double channel_capacity(double b_mu, const CalibrationParams& p) {
    detail::require(b_mu >= 0.0 && !std::isnan(b_mu), "b_mu", "must be >= 0");
    const double k2 = p.kappa_mu() * p.kappa_mu();
    const double snr = k2 * p.sigma_f2() / (k2 * b_mu * b_mu + p.sigma() * p.sigma());
    return 0.5 * p.d_f() * std::log1p(snr);
}

[[nodiscard]] inline double residual_entropy(double h_mu, double r_mech) {
    detail::require(h_mu >= 0.0, "h_mu", "must be >= 0");
    detail::require(r_mech >= 0.0, "r_mech", "must be >= 0");
    return std::max(h_mu - r_mech, 0.0);
}

/// Bias at which the capacity bound equals `target` nats. Empty when even a
/// perfect model (zero bias) cannot carry that much information.
[[nodiscard]] inline std::optional<double> solve_bias_for_capacity(double target, const CalibrationParams& p) {
    detail::require(target > 0.0 && std::isfinite(target), "target", "must be finite and > 0");
    if (target > channel_capacity(0.0, p)) {
        return std::nullopt;
    }
    const double s2 = p.sigma() * p.sigma();
    const double k2 = p.kappa_mu() * p.kappa_mu();
    const double bracket = (k2 * p.sigma_f2() / s2) / std::expm1(2.0 * target / p.d_f()) - 1.0;
    // bracket can dip a few ulps below zero at target == C(0)
    return std::sqrt(s2 / k2 * std::max(bracket, 0.0));
}

/// Critical bias at the default working point H(mu)/N, or at `target` nats
/// when given.
[[nodiscard]] inline std::optional<double> critical_bias(const CalibrationParams& p,
                                                         std::optional<double> target = std::nullopt) {
    const double t = target.value_or(p.h_mu() / static_cast<double>(p.n()));
    return solve_bias_for_capacity(t, p);
}

enum class Regime { DataEfficient, Baseline };

[[nodiscard]] constexpr const char* to_string(Regime r) noexcept {
    return r == Regime::DataEfficient ? "DataEfficient" : "Baseline";
}

[[nodiscard]] inline Regime classify_regime(double b_mu, const std::optional<double>& b_crit) noexcept {
    return (b_crit && b_mu < *b_crit) ? Regime::DataEfficient : Regime::Baseline;
}

[[nodiscard]] inline Regime classify_regime(double b_mu, const CalibrationParams& p,
                                            std::optional<double> target = std::nullopt) {
    detail::require(b_mu >= 0.0, "b_mu", "must be >= 0");
    return classify_regime(b_mu, critical_bias(p, target));
}

namespace detail {
inline void check_envelope_args(int k, int n, double h_mech) {
    require(k >= 2, "k", "arm count must be >= 2");
    require(n >= 1, "n", "horizon must be >= 1");
    require(h_mech >= 0.0, "h_mech", "must be >= 0");
}
}  // namespace detail

/// Lower-bound regret scaling sqrt(K N H / ln K), universal constant omitted.
[[nodiscard]] inline double lb_envelope(int k, int n, double h_mech) {
    detail::check_envelope_args(k, n, h_mech);
    return std::sqrt(static_cast<double>(k) * n * h_mech / std::log(static_cast<double>(k)));
}

/// Thompson-sampling upper-bound scaling sqrt(K N H), constant omitted.
[[nodiscard]] inline double ub_envelope(int k, int n, double h_mech) {
    detail::check_envelope_args(k, n, h_mech);
    return std::sqrt(static_cast<double>(k) * n * h_mech);
}

/// H(mu)/H_mech. Empty means an infinite ratio (the optimum is fully
/// identified by the model).
[[nodiscard]] inline std::optional<double> sample_complexity_ratio(double h_mu, double h_mech) {
    detail::require(h_mech >= 0.0, "h_mech", "must be >= 0");
    detail::require(h_mu >= h_mech, "h_mu", "must be >= h_mech");
    if (h_mech == 0.0) {
        return std::nullopt;
    }
    return h_mu / h_mech;
}

/// Occupancy-weighted RMS gap between true and model per-arm rewards.
[[nodiscard]] inline double occupancy_bias(std::span<const double> weights, std::span<const double> j_true,
                                           std::span<const double> j_model) {
    detail::require(!weights.empty(), "weights", "must be non-empty");
    detail::require(j_true.size() == weights.size() && j_model.size() == weights.size(), "j_model",
                    "reward vectors must match the weight vector length");
    double total = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        detail::require(weights[i] >= 0.0, "weights", "entries must be >= 0");
        total += weights[i];
        const double gap = j_true[i] - j_model[i];
        acc += weights[i] * gap * gap;
    }
    detail::require(std::abs(total - 1.0) <= 1e-9, "weights", "must sum to 1");
    return std::sqrt(acc);
}

/// Dimensionless steady-state dose sensitivity: AUC scale over
/// (dose scale x dose-AUC slope).
[[nodiscard]] inline double steady_state_sensitivity(double y_norm, double u_norm, double slope) {
    detail::require(y_norm > 0.0, "y_norm", "must be > 0");
    detail::require(u_norm > 0.0, "u_norm", "must be > 0");
    detail::require(slope > 0.0, "slope", "must be > 0");
    return y_norm / (u_norm * slope);
}

/// Effective dimension of a kernel spectrum, (sum l)^2 / sum l^2.
[[nodiscard]] inline double participation_ratio(std::span<const double> eigenvalues) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (double l : eigenvalues) {
        detail::require(l >= 0.0, "eigenvalues", "entries must be >= 0");
        s1 += l;
        s2 += l * l;
    }
    detail::require(s2 > 0.0, "eigenvalues", "at least one entry must be > 0");
    return s1 * s1 / s2;
}

struct CertificateReport {
    double sigma_f2 = 0.0;
    double capacity_at_bias = 0.0;
    double residual_entropy_floor = 0.0;
    double target = 0.0;
    std::optional<double> critical_bias;  ///< empty: target unreachable
    std::optional<double> bias_ratio;     ///< b_mu / critical_bias
    std::optional<double> margin;         ///< critical_bias / b_mu, empty when either is 0 or unreachable
    Regime regime = Regime::Baseline;
    std::optional<double> sample_ratio;   ///< empty: infinite
    double lb_envelope = 0.0;
    double ub_envelope = 0.0;
    bool capacity_exceeds_prior_entropy = false;
};

[[nodiscard]] inline CertificateReport certify(const CalibrationParams& p,
                                               std::optional<double> target = std::nullopt) {
    CertificateReport r;
    r.sigma_f2 = p.sigma_f2();
    r.capacity_at_bias = channel_capacity(p.b_mu(), p);
    r.capacity_exceeds_prior_entropy = r.capacity_at_bias > p.h_mu();
    r.residual_entropy_floor = residual_entropy(p.h_mu(), r.capacity_at_bias);
    r.target = target.value_or(p.h_mu() / static_cast<double>(p.n()));
    r.critical_bias = critical_bias(p, r.target);
    if (r.critical_bias) {
        if (*r.critical_bias > 0.0) {
            r.bias_ratio = p.b_mu() / *r.critical_bias;
        }
        if (p.b_mu() > 0.0 && *r.critical_bias > 0.0) {
            r.margin = *r.critical_bias / p.b_mu();
        }
    }
    r.regime = classify_regime(p.b_mu(), r.critical_bias);
    r.sample_ratio = sample_complexity_ratio(p.h_mu(), r.residual_entropy_floor);
    r.lb_envelope = lb_envelope(p.k(), p.n(), r.residual_entropy_floor);
    r.ub_envelope = ub_envelope(p.k(), p.n(), r.residual_entropy_floor);
    return r;
}

}  // namespace mechcert
