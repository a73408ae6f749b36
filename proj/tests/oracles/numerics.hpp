#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

// Standalone numerical reference tools for the test suite: adaptive
// quadrature, goodness-of-fit distances, finite differences and Monte Carlo
// summaries. None of this leans on the library under test.

namespace oracle {

namespace detail {

inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int depth = 48) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// One-sample Kolmogorov-Smirnov distance against a cdf.
inline double ks_statistic(std::vector<double> x,
                           const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = cdf(x[i]);
        d = std::max(d, F - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - F);
    }
    return d;
}

// Critical value of the Kolmogorov distribution at the 1% point; the KS
// distance of an n-sample from its true law exceeds this / sqrt(n) with
// probability about 0.01.
inline constexpr double ks_critical_1pct = 1.6276236115189502;

// Central difference with one Richardson extrapolation step.
inline double fd_derivative(const std::function<double(double)>& f, double x,
                            double h) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mc_mean(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += v;
    const double mean = s / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n * (n - 1.0)))};
}

} // namespace oracle
