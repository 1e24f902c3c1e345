#pragma once

// One- and two-dimensional sensitivity sweeps of the certificate over the
// calibration parameters, plus the arm-count sweep of the critical bias.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mechcert/certificates.hpp"
#include "mechcert/csv.hpp"
#include "mechcert/error.hpp"

namespace mechcert {

enum class SweepParameter { Sigma, KappaMu, DF, K, POpt, BMu };

inline constexpr SweepParameter kAllSweepParameters[] = {SweepParameter::Sigma, SweepParameter::KappaMu,
                                                         SweepParameter::DF,    SweepParameter::K,
                                                         SweepParameter::POpt,  SweepParameter::BMu};

[[nodiscard]] constexpr const char* to_string(SweepParameter p) noexcept {
    switch (p) {
        case SweepParameter::Sigma: return "sigma";
        case SweepParameter::KappaMu: return "kappa_mu";
        case SweepParameter::DF: return "d_f";
        case SweepParameter::K: return "k";
        case SweepParameter::POpt: return "p_opt";
        case SweepParameter::BMu: return "b_mu";
    }
    return "?";
}

[[nodiscard]] inline SweepParameter parse_sweep_parameter(std::string_view name) {
    for (auto p : kAllSweepParameters) {
        if (name == to_string(p)) {
            return p;
        }
    }
    throw DomainError("param", "unknown sweep parameter '" + std::string(name) +
                                   "' (expected sigma, kappa_mu, d_f, k, p_opt or b_mu)");
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
[[nodiscard]] inline std::vector<double> linear_grid(double lo, double hi, int steps) {
    detail::require(steps >= 1, "steps", "must be >= 1");
    detail::require(std::isfinite(lo) && std::isfinite(hi), "range", "bounds must be finite");
    if (steps == 1) {
        return {lo};
    }
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        v[static_cast<std::size_t>(i)] = i == steps - 1 ? hi : lo + (hi - lo) * i / (steps - 1);
    }
    return v;
}

inline constexpr int kDefaultSteps1d = 50;
inline constexpr int kDefaultSteps2d = 60;

/// Reference sensitivity ranges around the working point.
[[nodiscard]] inline std::vector<double> default_sweep_values(SweepParameter p, int steps = kDefaultSteps1d) {
    switch (p) {
        case SweepParameter::Sigma: return linear_grid(0.357, 0.50, steps);
        case SweepParameter::KappaMu: return linear_grid(0.6, 3.0, steps);
        case SweepParameter::DF: return {2, 3, 4, 5};
        case SweepParameter::K: return {4, 6, 8, 10, 12, 16};
        case SweepParameter::POpt: return linear_grid(0.50, 0.95, steps);
        case SweepParameter::BMu: return linear_grid(0.10, 0.40, steps);
    }
    return {};
}

struct SweepSpec {
    SweepParameter parameter = SweepParameter::KappaMu;
    std::vector<double> values;
    CalibrationSpec base;
};

/// Base spec with one parameter replaced. Varying k resets H(mu) to ln k;
/// varying p_opt sets sigma = sqrt(p_opt (1 - p_opt)); the canonical
/// residual variance is always recomputed.
[[nodiscard]] inline CalibrationSpec apply_sweep_value(CalibrationSpec spec, SweepParameter p, double value) {
    detail::require(std::isfinite(value), to_string(p), "value must be finite");
    spec.sigma_f2.reset();
    switch (p) {
        case SweepParameter::Sigma: spec.sigma = value; break;
        case SweepParameter::KappaMu: spec.kappa_mu = value; break;
        case SweepParameter::DF: spec.d_f = value; break;
        case SweepParameter::K:
            detail::require(value == std::floor(value) && value >= 2 && value <= 1e6, "k",
                            "must be an integer >= 2");
            spec.k = static_cast<int>(value);
            spec.h_mu.reset();
            break;
        case SweepParameter::POpt:
            detail::require(value > 0.0 && value < 1.0, "p_opt", "must lie in (0, 1)");
            spec.sigma = std::sqrt(value * (1.0 - value));
            break;
        case SweepParameter::BMu: spec.b_mu = value; break;
    }
    return spec;
}

struct CellResult {
    double capacity = 0.0;
    std::optional<double> critical_bias;
    double ratio = 0.0;  ///< b_mu / critical_bias, infinite when unreachable
    Regime regime = Regime::Baseline;
};

[[nodiscard]] inline CellResult evaluate_cell(const CalibrationSpec& spec) {
    const auto p = CalibrationParams::create(spec);
    CellResult c;
    c.capacity = channel_capacity(p.b_mu(), p);
    c.critical_bias = critical_bias(p);
    if (!c.critical_bias) {
        c.ratio = std::numeric_limits<double>::infinity();
    } else if (p.b_mu() == 0.0) {
        c.ratio = 0.0;
    } else {
        c.ratio = *c.critical_bias > 0.0 ? p.b_mu() / *c.critical_bias : std::numeric_limits<double>::infinity();
    }
    c.regime = classify_regime(p.b_mu(), c.critical_bias);
    return c;
}

struct Sweep1dRow {
    SweepParameter parameter = SweepParameter::KappaMu;
    double value = 0.0;
    std::optional<CellResult> cell;  ///< empty: invalid value
    std::string error;
};

[[nodiscard]] inline std::vector<Sweep1dRow> sweep_1d(const SweepSpec& spec) {
    detail::require(!spec.values.empty(), "values", "sweep needs at least one value");
    std::vector<Sweep1dRow> rows;
    rows.reserve(spec.values.size());
    for (double v : spec.values) {
        Sweep1dRow row{spec.parameter, v, std::nullopt, {}};
        try {
            row.cell = evaluate_cell(apply_sweep_value(spec.base, spec.parameter, v));
        } catch (const DomainError& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct SweepAxis {
    SweepParameter parameter = SweepParameter::KappaMu;
    std::vector<double> values;
};

struct Sweep2dRow {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> ratio;  ///< empty: invalid cell
};

/// Cartesian grid, x outer and y inner.
[[nodiscard]] inline std::vector<Sweep2dRow> sweep_2d(const SweepAxis& x, const SweepAxis& y,
                                                      const CalibrationSpec& base) {
    detail::require(!x.values.empty() && !y.values.empty(), "values", "both axes need values");
    detail::require(x.parameter != y.parameter, "y_param", "axes must differ");
    std::vector<Sweep2dRow> rows;
    rows.reserve(x.values.size() * y.values.size());
    for (double xv : x.values) {
        for (double yv : y.values) {
            Sweep2dRow row{xv, yv, std::nullopt};
            try {
                auto spec = apply_sweep_value(apply_sweep_value(base, x.parameter, xv), y.parameter, yv);
                row.ratio = evaluate_cell(spec).ratio;
            } catch (const DomainError&) {
            }
            rows.push_back(row);
        }
    }
    return rows;
}

struct KSweepRow {
    int k = 0;
    std::optional<double> critical_bias;
    double capacity_at_base_bias = 0.0;
};

[[nodiscard]] inline std::vector<KSweepRow> k_sweep(const CalibrationSpec& base, const std::vector<int>& k_values,
                                                    int n) {
    std::vector<KSweepRow> rows;
    rows.reserve(k_values.size());
    for (int k : k_values) {
        detail::require(k >= 2 && k <= 64, "k_values", "arm counts must lie in [2, 64]");
        auto spec = apply_sweep_value(base, SweepParameter::K, k);
        spec.n = n;
        const auto p = CalibrationParams::create(spec);
        rows.push_back({k, critical_bias(p), channel_capacity(p.b_mu(), p)});
    }
    return rows;
}

/// Extremes of one 1-D sweep, as reported in a sensitivity table.
struct SensitivityRange {
    SweepParameter parameter = SweepParameter::KappaMu;
    double c_min = std::numeric_limits<double>::infinity();
    double c_max = -std::numeric_limits<double>::infinity();
    double b_crit_min = std::numeric_limits<double>::infinity();
    double b_crit_max = -std::numeric_limits<double>::infinity();
    bool all_data_efficient = true;
};

[[nodiscard]] inline SensitivityRange summarize_sweep(const std::vector<Sweep1dRow>& rows) {
    detail::require(!rows.empty(), "rows", "must be non-empty");
    SensitivityRange s;
    s.parameter = rows.front().parameter;
    for (const auto& r : rows) {
        if (!r.cell || !r.cell->critical_bias) {
            s.all_data_efficient = false;
            continue;
        }
        s.c_min = std::min(s.c_min, r.cell->capacity);
        s.c_max = std::max(s.c_max, r.cell->capacity);
        s.b_crit_min = std::min(s.b_crit_min, *r.cell->critical_bias);
        s.b_crit_max = std::max(s.b_crit_max, *r.cell->critical_bias);
        s.all_data_efficient = s.all_data_efficient && r.cell->regime == Regime::DataEfficient;
    }
    return s;
}

/// All six default sweeps around `base`.
[[nodiscard]] inline std::vector<std::vector<Sweep1dRow>> sensitivity_table(const CalibrationSpec& base,
                                                                            int steps = kDefaultSteps1d) {
    std::vector<std::vector<Sweep1dRow>> out;
    for (auto p : kAllSweepParameters) {
        out.push_back(sweep_1d({p, default_sweep_values(p, steps), base}));
    }
    return out;
}

inline void write_sweep1d_header(std::ostream& out) { out << "param,value,capacity_nats,critical_bias,ratio,regime\n"; }

inline void write_sweep1d_rows(std::ostream& out, const std::vector<Sweep1dRow>& rows) {
    for (const auto& r : rows) {
        out << to_string(r.parameter) << ',' << csv::format_number(r.value) << ',';
        if (!r.cell) {
            out << ",,,invalid\n";
            continue;
        }
        out << csv::format_number(r.cell->capacity) << ',' << csv::format_number(r.cell->critical_bias, "unreachable")
            << ',' << csv::format_number(r.cell->ratio) << ',' << to_string(r.cell->regime) << '\n';
    }
}

inline void write_sweep2d_csv(std::ostream& out, SweepParameter x, SweepParameter y,
                              const std::vector<Sweep2dRow>& rows) {
    out << "x_param,y_param,x,y,ratio\n";
    for (const auto& r : rows) {
        out << to_string(x) << ',' << to_string(y) << ',' << csv::format_number(r.x) << ','
            << csv::format_number(r.y) << ',' << csv::format_number(r.ratio, "invalid") << '\n';
    }
}

inline void write_ksweep_csv(std::ostream& out, const std::vector<KSweepRow>& rows) {
    out << "k,critical_bias,capacity_at_base_bias\n";
    for (const auto& r : rows) {
        out << r.k << ',' << csv::format_number(r.critical_bias, "unreachable") << ','
            << csv::format_number(r.capacity_at_base_bias) << '\n';
    }
}

}  // namespace mechcert
