#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "nptruth/errors.hpp"

namespace nptruth {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

// Root of f on [lo, hi], where f(lo) and f(hi) bracket a sign change.
// Secant steps inside a shrinking bisection bracket: superlinear near the
// root, never leaves the bracket. Stops when |f| <= ftol or the bracket
// collapses to machine width.
template <class F>
RootResult find_root_bracketed(F&& f, double lo, double hi, double ftol = 1e-14,
                               int max_iter = 200, const char* label = "find_root_bracketed") {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if (!(std::isfinite(flo) && std::isfinite(fhi)) || (flo > 0) == (fhi > 0))
        throw solver_error(std::string(label) + ": endpoints do not bracket a root");

    double x = lo, fx = flo;
    for (int it = 1; it <= max_iter; ++it) {
        // Secant proposal from the bracket endpoints; fall back to bisection
        // whenever it degenerates or lands outside.
        double mid = 0.5 * (lo + hi);
        x = lo - flo * (hi - lo) / (fhi - flo);
        if (!std::isfinite(x) || x <= lo || x >= hi) x = mid;
        fx = f(x);
        if (!std::isfinite(fx)) throw solver_error(std::string(label) + ": nonfinite residual");
        if (std::fabs(fx) <= ftol) return {x, fx, it};
        if ((fx > 0) == (fhi > 0)) {
            hi = x; fhi = fx;
        } else {
            lo = x; flo = fx;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (std::fabs(lo) + std::fabs(hi)) ||
            hi - lo <= 1e-300)
            return {0.5 * (lo + hi), fx, it};
        // Force a true bisection every few steps so a stubborn secant cannot
        // stall against one endpoint.
        if (it % 4 == 0) {
            double m = 0.5 * (lo + hi);
            double fm = f(m);
            if (std::fabs(fm) <= ftol) return {m, fm, it};
            if ((fm > 0) == (fhi > 0)) { hi = m; fhi = fm; }
            else { lo = m; flo = fm; }
        }
    }
    return {x, fx, max_iter};
}

// Maximizer of a unimodal f on [lo, hi] by golden-section search.
template <class F>
RootResult golden_section_max(F&& f, double lo, double hi, double xtol = 1e-10,
                              int max_iter = 400) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int it = 0;
    while (b - a > xtol && it++ < max_iter) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a); f1 = f(x1);
        }
    }
    double xm = 0.5 * (a + b);
    return {xm, f(xm), it};
}

} // namespace nptruth
