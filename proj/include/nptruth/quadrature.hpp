#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "nptruth/errors.hpp"

namespace nptruth {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix together with the first
// component of each eigenvector (QL with implicit shifts, EISPACK imtql2
// lineage). d = diagonal, e = off-diagonal (e[0] unused on entry), z starts
// as e_1 and finishes as the first eigenvector row.
inline void symtridiag_eigen_first_row(std::vector<double>& d, std::vector<double>& e,
                                       std::vector<double>& z) {
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m == l) break;
            if (++iter > 60) throw solver_error("symtridiag_eigen: no convergence");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::fabs(r) : -std::fabs(r)));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                double f = s * e[i];
                double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // Sort ascending, carrying the eigenvector components along.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t k = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (d[j] < d[k]) k = j;
        if (k != i) {
            std::swap(d[i], d[k]);
            std::swap(z[i], z[k]);
        }
    }
}

} // namespace detail

// Generalized Gauss-Laguerre rule for the weight s^a e^{-s} on (0, inf),
// normalized so the weights sum to 1 (i.e. quadrature against the Gamma(a+1)
// density with unit scale). Requires a > -1.
inline QuadratureRule gauss_laguerre_normalized(double a, std::size_t order) {
    require_domain(a > -1.0, "gauss_laguerre: exponent must exceed -1");
    require_domain(order >= 2, "gauss_laguerre: order too small");
    std::vector<double> d(order), e(order), z(order, 0.0);
    for (std::size_t i = 0; i < order; ++i) {
        d[i] = 2.0 * static_cast<double>(i) + a + 1.0;
        e[i] = std::sqrt(static_cast<double>(i) * (static_cast<double>(i) + a));
    }
    z[0] = 1.0;
    detail::symtridiag_eigen_first_row(d, e, z);
    QuadratureRule rule;
    rule.nodes = std::move(d);
    rule.weights.resize(order);
    for (std::size_t i = 0; i < order; ++i) rule.weights[i] = z[i] * z[i];
    return rule;
}

// Gauss-Legendre rule on [-1, 1] by Newton iteration on the Legendre
// polynomial (weights sum to 2).
inline QuadratureRule gauss_legendre(std::size_t order) {
    require_domain(order >= 2, "gauss_legendre: order too small");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const std::size_t m = (order + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(order) + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double integrate_gl(F&& f, double a, double b, std::size_t order = 200) {
    static std::map<std::size_t, QuadratureRule> cache;
    static std::mutex mu;
    const QuadratureRule* rule;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(order);
        if (it == cache.end()) it = cache.emplace(order, gauss_legendre(order)).first;
        rule = &it->second;
    }
    const double h = 0.5 * (b - a), c = 0.5 * (b + a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule->nodes.size(); ++i)
        s += rule->weights[i] * f(c + h * rule->nodes[i]);
    return s * h;
}

} // namespace nptruth
