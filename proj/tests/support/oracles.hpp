#pragma once

// Reference computations used by the tests. Everything here is written
// directly from the definitions and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace oracle {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline Line least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Line l;
    l.slope = sxy / sxx;
    l.intercept = my - l.slope * mx;
    l.r2 = sxy * sxy / (sxx * syy);
    return l;
}

/// Pairs (a_i, b_j) with a_i > b_j, ties counted 1/2.
inline double brute_force_u(std::span<const double> a, std::span<const double> b) {
    double u = 0;
    for (double x : a)
        for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    return u;
}

/// U of every way of labelling n1 of the pooled values as sample a.
inline std::vector<double> enumerate_u(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    std::vector<double> out;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) continue;
        std::vector<double> xa, xb;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? xa : xb).push_back(pooled[i]);
        out.push_back(brute_force_u(xa, xb));
    }
    return out;
}

inline std::pair<double, double> mean_variance(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    return {mean, var / n};
}

/// Inverse-CDF Pareto draws: x = x_min * u^(-1/tail_exponent), u in (0, 1].
inline std::vector<double> pareto(std::size_t n, double tail_exponent, double x_min, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) x = x_min * std::pow(1.0 - unif(gen), -1.0 / tail_exponent);
    return out;
}

/// c * r^-zeta for r = 1..n.
inline std::vector<double> zipf_series(double c, double zeta, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t r = 1; r <= n; ++r) out[r - 1] = c * std::pow(static_cast<double>(r), -zeta);
    return out;
}

/// r^-z1 up to `brk`, continued with slope z2 so the two laws meet at `brk`.
inline std::vector<double> two_regime(std::size_t n, std::size_t brk, double z1, double z2) {
    std::vector<double> out(n);
    const double b = static_cast<double>(brk);
    for (std::size_t r = 1; r <= n; ++r) {
        const double x = static_cast<double>(r);
        out[r - 1] = r <= brk ? std::pow(x, -z1) : std::pow(b, -z1) * std::pow(x / b, -z2);
    }
    return out;
}

}  // namespace oracle
