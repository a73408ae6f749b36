#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <vector>

#include "nptruth/errors.hpp"
#include "nptruth/rng.hpp"

// Most-powerful randomized decision rules for one-sided testing problems
// whose statistic has a monotone likelihood ratio. A rule is the triple
// (alpha, c, gamma): reject when S > c, randomize with probability gamma on
// the boundary S = c. Continuous problems take gamma = 0 and locate c by
// quantile; finite problems compute gamma so the size is exactly alpha.

namespace nptruth::np {

enum class Hypothesis { H0, H1 };

// Finite-support problem: ascending support points with point masses under
// each hypothesis.
template <class P>
concept finite_problem = requires(const P& p, double s, Hypothesis h, RngStream& rng) {
    { p.support() } -> std::convertible_to<std::vector<double>>;
    { p.null_point(s) } -> std::convertible_to<double>;
    { p.alt_point(s) } -> std::convertible_to<double>;
    { p.sample_statistic(h, rng) } -> std::convertible_to<double>;
};

// Continuous problem described through its statistic's tail functions,
// upper quantile and densities.
template <class P>
concept continuous_problem = requires(const P& p, double s, double a, Hypothesis h,
                                      RngStream& rng) {
    { p.null_tail(s) } -> std::convertible_to<double>;
    { p.alt_tail(s) } -> std::convertible_to<double>;
    { p.null_upper_quantile(a) } -> std::convertible_to<double>;
    { p.null_density(s) } -> std::convertible_to<double>;
    { p.alt_density(s) } -> std::convertible_to<double>;
    { p.sample_statistic(h, rng) } -> std::convertible_to<double>;
};

template <class P>
concept test_problem = finite_problem<P> || continuous_problem<P>;

// Problems that can hand the sequential x-channel a study-level
// log-likelihood ratio through their statistic.
template <class P>
concept has_log_lr = requires(const P& p, double s) {
    { p.log_lr(s) } -> std::convertible_to<double>;
};

struct DecisionRule {
    double alpha = 0.0;
    double c = 0.0;     // rejection threshold on the statistic scale
    double gamma = 0.0; // boundary randomization probability, in [0,1)
    double power = 0.0; // rejection probability under H1
};

// Pr0{S > s} / Pr1{S > s} for finite problems, by summation over support.
template <finite_problem P>
double null_tail(const P& p, double s) {
    double t = 0.0;
    for (double v : p.support())
        if (v > s) t += p.null_point(v);
    return t;
}

template <finite_problem P>
double alt_tail(const P& p, double s) {
    double t = 0.0;
    for (double v : p.support())
        if (v > s) t += p.alt_point(v);
    return t;
}

template <continuous_problem P>
double null_tail(const P& p, double s) {
    return p.null_tail(s);
}

template <continuous_problem P>
double alt_tail(const P& p, double s) {
    return p.alt_tail(s);
}

// Most-powerful rule of size alpha: c = inf{c : Pr0{S > c} <= alpha},
// gamma = (alpha - Pr0{S > c}) / Pr0{S = c}.
template <test_problem P>
DecisionRule build_rule(const P& p, double alpha) {
    require_domain(alpha > 0.0 && alpha < 1.0, "build_rule: alpha must lie in (0,1)");
    DecisionRule rule;
    rule.alpha = alpha;
    if constexpr (finite_problem<P>) {
        const std::vector<double> sup = p.support();
        require_domain(!sup.empty(), "build_rule: empty support");
        // Suffix tails; pick the smallest support point whose strict upper
        // tail fits inside alpha.
        std::vector<double> tails(sup.size());
        double acc = 0.0;
        for (std::size_t i = sup.size(); i-- > 0;) {
            tails[i] = acc; // Pr0{S > sup[i]}
            acc += p.null_point(sup[i]);
        }
        std::size_t ci = sup.size() - 1;
        for (std::size_t i = 0; i < sup.size(); ++i) {
            if (tails[i] <= alpha) {
                ci = i;
                break;
            }
        }
        rule.c = sup[ci];
        const double point = p.null_point(rule.c);
        rule.gamma = point > 0.0 ? (alpha - tails[ci]) / point : 0.0;
        rule.power = alt_tail(p, rule.c) + rule.gamma * p.alt_point(rule.c);
    } else {
        rule.c = p.null_upper_quantile(alpha);
        rule.gamma = 0.0;
        rule.power = p.alt_tail(rule.c);
    }
    return rule;
}

// Apply the rule to an observed statistic and auxiliary uniform draw.
inline int decide(const DecisionRule& rule, double s, double u) {
    require_domain(u >= 0.0 && u <= 1.0, "decide: u must lie in [0,1]");
    if (s > rule.c) return 1;
    if (s == rule.c && u <= rule.gamma) return 1;
    return 0;
}

// Realized level: the smallest alpha at which (s, u) would be rejected.
// Uniform on [0,1] under the null; equals Pr0{S* > s} + u Pr0{S* = s}.
template <test_problem P>
double p_functional(const P& p, double s, double u) {
    require_domain(u >= 0.0 && u <= 1.0, "p_functional: u must lie in [0,1]");
    if constexpr (finite_problem<P>)
        return null_tail(p, s) + u * p.null_point(s);
    else
        return p.null_tail(s);
}

// Power of the size-alpha most-powerful rule.
template <test_problem P>
double roc(const P& p, double alpha) {
    return build_rule(p, alpha).power;
}

// Slope of the power curve. For finite problems this is the likelihood
// ratio at the critical point; for continuous ones the density ratio at the
// null upper quantile. Also the density of the realized level under H1.
template <test_problem P>
double roc_deriv(const P& p, double alpha) {
    require_domain(alpha > 0.0 && alpha < 1.0, "roc_deriv: alpha must lie in (0,1)");
    if constexpr (finite_problem<P>) {
        const DecisionRule rule = build_rule(p, alpha);
        const double denom = p.null_point(rule.c);
        return denom > 0.0 ? p.alt_point(rule.c) / denom : 0.0;
    } else {
        const double c = p.null_upper_quantile(alpha);
        return p.alt_density(c) / p.null_density(c);
    }
}

struct RocCurve {
    std::vector<double> alpha;
    std::vector<double> rho;
    std::vector<double> rho_deriv;
};

template <test_problem P>
RocCurve roc_curve(const P& p, const std::vector<double>& grid) {
    RocCurve curve;
    curve.alpha.reserve(grid.size());
    curve.rho.reserve(grid.size());
    curve.rho_deriv.reserve(grid.size());
    for (double a : grid) {
        curve.alpha.push_back(a);
        curve.rho.push_back(roc(p, a));
        curve.rho_deriv.push_back(roc_deriv(p, a));
    }
    return curve;
}

struct McSizePower {
    double size_hat = 0.0;
    double power_hat = 0.0;
    std::uint64_t reps = 0;
};

// Monte Carlo estimate of the rule's realized size and power.
template <test_problem P>
McSizePower mc_size_power(const P& p, double alpha, std::uint64_t reps, RngStream& rng) {
    require_domain(reps > 0, "mc_size_power: reps must be positive");
    const DecisionRule rule = build_rule(p, alpha);
    std::uint64_t rejected0 = 0, rejected1 = 0;
    for (std::uint64_t i = 0; i < reps; ++i) {
        const double s0 = p.sample_statistic(Hypothesis::H0, rng);
        if (decide(rule, s0, rng.uniform01())) ++rejected0;
        const double s1 = p.sample_statistic(Hypothesis::H1, rng);
        if (decide(rule, s1, rng.uniform01())) ++rejected1;
    }
    return {static_cast<double>(rejected0) / static_cast<double>(reps),
            static_cast<double>(rejected1) / static_cast<double>(reps), reps};
}

} // namespace nptruth::np
