#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "nptruth/errors.hpp"
#include "nptruth/quadrature.hpp"
#include "nptruth/rng.hpp"
#include "nptruth/roots.hpp"

// Distribution kernel: standard normal, central and noncentral t, the small
// discrete laws used by the tasting designs, and seeded sampling helpers.
// Everything is a pure function of its arguments; accuracy notes sit on each
// routine.

namespace nptruth::dist {

inline constexpr double inv_sqrt2 = 0.7071067811865475244;
inline constexpr double inv_sqrt_2pi = 0.3989422804014326779;

// ===== standard normal =====

inline double norm_pdf(double z) { return inv_sqrt_2pi * std::exp(-0.5 * z * z); }

// Φ via erfc; absolute error a few ulps (well below 1e-12) over the whole
// double range.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * inv_sqrt2); }

namespace detail {

// Acklam's rational approximation to Φ^{-1}; relative error < 1.2e-9 before
// polishing.
inline double norm_quantile_seed(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace detail

// Φ^{-1} on (0,1): Acklam seed plus one Halley step against the erfc cdf.
// Round-trip |Φ(Φ^{-1}(p)) - p| stays below 1e-15 wherever the density does
// not underflow.
inline double norm_quantile(double p) {
    require_domain(p > 0.0 && p < 1.0, "norm_quantile: p must lie in (0,1)");
    // Work in the lower tail, where the erfc-based cdf keeps full relative
    // precision; 1 - p is exact for p >= 1/2.
    if (p > 0.5) return -norm_quantile(1.0 - p);
    double x = detail::norm_quantile_seed(p);
    double pdf = norm_pdf(x);
    if (pdf > 1e-280) {
        double e = norm_cdf(x) - p;
        double u = e / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

// ===== central t =====

namespace detail {

// Regularized incomplete beta I_x(a,b), Lentz continued fraction.
inline double betacf(double a, double b, double x) {
    constexpr double fpmin = 1e-300;
    constexpr double eps = 3e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw solver_error("ibeta: continued fraction did not converge");
}

inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_front) * betacf(a, b, x) / a;
    return 1.0 - std::exp(ln_front) * betacf(b, a, 1.0 - x) / b;
}

} // namespace detail

inline double t_pdf(double x, double df) {
    require_domain(df > 0.0 && std::isfinite(df), "t_pdf: df must be positive");
    return std::exp(std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                    0.5 * std::log(df * M_PI) -
                    0.5 * (df + 1.0) * std::log1p(x * x / df));
}

inline double t_cdf(double x, double df) {
    require_domain(df > 0.0 && std::isfinite(df), "t_cdf: df must be positive");
    if (x == 0.0) return 0.5;
    const double w = df / (df + x * x);
    const double half_tail = 0.5 * detail::ibeta(0.5 * df, 0.5, w);
    return x < 0.0 ? half_tail : 1.0 - half_tail;
}

// Inverse central-t cdf: bisection-guarded secant on t_cdf. The bracket is
// driven to machine width, so the result is far inside the 1e-10
// probability tolerance it is documented to meet.
inline double t_quantile(double p, double df) {
    require_domain(p > 0.0 && p < 1.0, "t_quantile: p must lie in (0,1)");
    require_domain(df > 0.0 && std::isfinite(df), "t_quantile: df must be positive");
    if (p == 0.5) return 0.0;
    const bool upper = p > 0.5;
    const double pl = upper ? 1.0 - p : p; // target in (0, 0.5)
    double hi = 0.0;
    double lo = -1.0;
    int guard = 0;
    while (t_cdf(lo, df) > pl) {
        lo *= 4.0;
        if (++guard > 600) throw solver_error("t_quantile: bracket expansion failed");
    }
    auto f = [&](double x) { return t_cdf(x, df) - pl; };
    const double x = find_root_bracketed(f, lo, hi, 4e-16, 300, "t_quantile").x;
    return upper ? -x : x;
}

// ===== noncentral t =====
//
// cdf(x; k, ω) = E[Φ(x √(V/k) - ω)] with V ~ χ²_k. The expectation is taken
// on the chi scale u = √V, where the integrand is analytic, and integrated
// with fixed-order Gauss-Legendre panels sized to the narrower of the chi
// width and the Φ transition layer. Truncation at u_top only discards
// Φ mass below ~1e-320. Agreement with the central t at ω = 0 is a few
// 1e-14 across df in [1, 400] and |x| up to 60.

namespace detail {

// ∫_0^{u_top} g(x u/√k - ω) chi_k(u) du for x <= 0, where g is either Φ
// (cdf kernel) or φ·u/√k (pdf kernel).
template <bool Pdf>
inline double nct_core_neg(double x, double k, double om) {
    if (40.0 - om <= 0.0) return 0.0;
    const double sk = std::sqrt(k);
    const double ax = std::max(-x, 1e-100);
    const double u_top = std::min(sk * (40.0 - om) / ax, sk + 45.0);
    const double h = std::min(sk / ax, 1.0);
    const int npanels = std::max(1, static_cast<int>(std::ceil(u_top / (12.0 * h))));
    const double logc = (1.0 - 0.5 * k) * std::log(2.0) - std::lgamma(0.5 * k);

    static const QuadratureRule rule = gauss_legendre(48);
    double total = 0.0;
    const double step = u_top / npanels;
    for (int pnl = 0; pnl < npanels; ++pnl) {
        const double a = step * pnl, b = a + step;
        const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = mid + hw * rule.nodes[i];
            const double ldens = logc + (k - 1.0) * std::log(u) - 0.5 * u * u;
            const double z = x * u / sk - om;
            double kernel;
            if constexpr (Pdf)
                kernel = norm_pdf(z) * (u / sk);
            else
                kernel = norm_cdf(z);
            s += rule.weights[i] * kernel * std::exp(ldens);
        }
        total += s * hw;
    }
    return total;
}

} // namespace detail

inline double nct_cdf(double x, double df, double ncp) {
    require_domain(df > 0.0 && std::isfinite(df), "nct_cdf: df must be positive");
    require_domain(std::isfinite(ncp), "nct_cdf: ncp must be finite");
    if (std::isnan(x)) throw domain_error("nct_cdf: x is NaN");
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    if (x <= 0.0) return detail::nct_core_neg<false>(x, df, ncp);
    return 1.0 - detail::nct_core_neg<false>(-x, df, -ncp);
}

inline double nct_pdf(double x, double df, double ncp) {
    require_domain(df > 0.0 && std::isfinite(df), "nct_pdf: df must be positive");
    require_domain(std::isfinite(ncp), "nct_pdf: ncp must be finite");
    if (!std::isfinite(x)) return 0.0;
    if (x <= 0.0) return detail::nct_core_neg<true>(x, df, ncp);
    return detail::nct_core_neg<true>(-x, df, -ncp);
}

// ===== small discrete laws =====

namespace detail {

// x^k by repeated multiplication; exact for dyadic x and small k.
inline double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// Exact binomial coefficient as a double (n <= 50 keeps it inside the
// 53-bit integer range).
inline double choose_small(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double num = 1.0;
    // Multiply in an order that keeps every intermediate an exact integer.
    for (int i = 1; i <= k; ++i) num = num * (n - k + i) / i;
    return num;
}

} // namespace detail

// Binomial(n, theta) pmf. Exact-integer path for n <= 50 (so dyadic theta
// gives exact dyadic probabilities); lgamma path above that.
inline double binom_pmf(int k, int n, double theta) {
    require_domain(n >= 0, "binom_pmf: n must be nonnegative");
    require_domain(theta >= 0.0 && theta <= 1.0, "binom_pmf: theta must lie in [0,1]");
    if (k < 0 || k > n) return 0.0;
    if (theta == 0.0) return k == 0 ? 1.0 : 0.0;
    if (theta == 1.0) return k == n ? 1.0 : 0.0;
    if (n <= 50)
        return detail::choose_small(n, k) * detail::ipow(theta, k) *
               detail::ipow(1.0 - theta, n - k);
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                    k * std::log(theta) + (n - k) * std::log1p(-theta));
}

// Null law of the 4-of-8 tasting table: Pr{T = t} = C(4,t) C(4,4-t) / C(8,4).
inline double hypergeom4_pmf(int t) {
    require_domain(t >= 0 && t <= 4, "hypergeom4_pmf: t must lie in 0..4");
    static constexpr double num[5] = {1.0, 16.0, 36.0, 16.0, 1.0};
    return num[t] / 70.0;
}

// Theta-indexed tasting law: C(4,t)^2 θ^t (1-θ)^{8-t}, normalized over
// t = 0..4. Reduces to hypergeom4_pmf bit-for-bit at θ = 1/2, because every
// weight is then an exact dyadic and the shared factor 2^{-8} divides out in
// one correctly rounded division.
inline double theta_tea_pmf(int t, double theta) {
    require_domain(t >= 0 && t <= 4, "theta_tea_pmf: t must lie in 0..4");
    require_domain(theta >= 0.0 && theta <= 1.0, "theta_tea_pmf: theta must lie in [0,1]");
    static constexpr double c2[5] = {1.0, 16.0, 36.0, 16.0, 1.0};
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= 4; ++j) {
        const double w = c2[j] * detail::ipow(theta, j) * detail::ipow(1.0 - theta, 8 - j);
        den += w;
        if (j == t) num = w;
    }
    require_domain(den > 0.0, "theta_tea_pmf: degenerate theta");
    return num / den;
}

// ===== sampling =====

// Standard normal draw through the quantile transform; deterministic for a
// given stream state and identical across platforms that round erfc/log the
// same way.
inline double draw_normal(RngStream& rng) { return norm_quantile(rng.open01()); }

namespace detail {

inline std::uint64_t poisson_inversion(double lambda, RngStream& rng) {
    double p = std::exp(-lambda);
    double cum = p;
    const double u = rng.uniform01();
    std::uint64_t k = 0;
    const std::uint64_t cap = static_cast<std::uint64_t>(10.0 * lambda) + 100;
    while (u > cum && k < cap) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cum += p;
    }
    return k;
}

} // namespace detail

// Poisson(lambda) draw by cdf inversion; lambda is split into chunks of 30
// so exp(-lambda) never underflows (a sum of independent Poissons is
// Poisson).
inline std::uint64_t poisson_sample(double lambda, RngStream& rng) {
    require_domain(lambda > 0.0 && std::isfinite(lambda), "poisson_sample: lambda must be positive");
    std::uint64_t total = 0;
    while (lambda > 30.0) {
        total += detail::poisson_inversion(30.0, rng);
        lambda -= 30.0;
    }
    return total + detail::poisson_inversion(lambda, rng);
}

} // namespace nptruth::dist
