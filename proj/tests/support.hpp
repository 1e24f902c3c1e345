#pragma once

// Hand-rolled generators and brute-force oracles shared by the test suites.
// Oracles are written from the definitions and do not call the library.

#include <cmath>
#include <random>
#include <vector>

namespace testsupport {

using Rng = std::mt19937_64;

/// Strictly positive probability vector of length n.
inline std::vector<double> random_simplex(Rng& g, int n, double floor = 1e-3) {
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& x : v) {
        x = ex(g) + floor;
        total += x;
    }
    for (auto& x : v) {
        x /= total;
    }
    return v;
}

/// Row-major k x k joint with uniform row marginal and random positive rows.
inline std::vector<double> random_uniform_row_joint(Rng& g, int k) {
    std::vector<double> p;
    p.reserve(static_cast<std::size_t>(k * k));
    for (int i = 0; i < k; ++i) {
        for (double c : random_simplex(g, k)) {
            p.push_back(c / k);
        }
    }
    return p;
}

inline double oracle_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) {
            h -= x * std::log(x);
        }
    }
    return h;
}

/// I(X;Y) = H(X) + H(Y) - H(X,Y).
inline double oracle_mi(const std::vector<double>& joint, int k) {
    std::vector<double> rows(static_cast<std::size_t>(k), 0.0);
    std::vector<double> cols(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            rows[static_cast<std::size_t>(i)] += joint[static_cast<std::size_t>(i * k + j)];
            cols[static_cast<std::size_t>(j)] += joint[static_cast<std::size_t>(i * k + j)];
        }
    }
    return oracle_entropy(rows) + oracle_entropy(cols) - oracle_entropy(joint);
}

/// Sum over cells of p ln(p/q); assumes q > 0 wherever p > 0.
inline double oracle_kl(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            d += p[i] * std::log(p[i] / q[i]);
        }
    }
    return d;
}

/// Capacity expression evaluated term by term.
inline double oracle_capacity(double b, double sigma, double kappa, double d, double sigma_f2) {
    const double signal = kappa * kappa * sigma_f2;
    const double noise = kappa * kappa * b * b + sigma * sigma;
    return 0.5 * d * std::log(1.0 + signal / noise);
}

/// Root of `f` on [lo, hi] by plain bisection, f(lo) and f(hi) of opposite sign.
template <class F>
double oracle_bisect(F f, double lo, double hi, int iters = 200) {
    const bool lo_positive = f(lo) > 0.0;
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) > 0.0) == lo_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace testsupport
