#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "nptruth/errors.hpp"

// Two-point Bayesian knowledge updating. A Belief is the probability that
// the null is true; evidence arrives through one of three reporting
// channels (raw likelihood ratio, published decision, realized level) and
// every channel reduces to multiplying the odds by a likelihood ratio.

namespace nptruth::belief {

// Log-odds storage: after thousands of sequential updates the posterior
// probability underflows double precision long before the log-odds do.
class Belief {
public:
    explicit Belief(double kappa0) {
        require_domain(kappa0 > 0.0 && kappa0 < 1.0,
                       "Belief: kappa0 must lie in (0,1)");
        log_odds_ = std::log(kappa0 / (1.0 - kappa0));
    }

    static Belief from_log_odds(double lo) {
        require_domain(!std::isnan(lo), "Belief: log-odds must not be NaN");
        Belief b;
        b.log_odds_ = lo;
        return b;
    }

    // log(kappa0 / kappa1)
    double log_odds() const { return log_odds_; }

    double kappa0() const { return 1.0 / (1.0 + std::exp(-log_odds_)); }
    double kappa1() const { return 1.0 / (1.0 + std::exp(log_odds_)); }

private:
    Belief() = default;
    double log_odds_ = 0.0;
};

// ===== evidence channels =====

struct RawLikelihoodRatio {
    double lambda = 1.0; // f1(x)/f0(x)
};

struct Decision {
    int d = 0;
    double alpha = 0.0;
    double rho_at_alpha = 0.0;
};

struct PValue {
    double p = 0.0;
    double rho_prime_at_p = 0.0;
};

using Evidence = std::variant<RawLikelihoodRatio, Decision, PValue>;

// Likelihood ratio of a published decision: (rho/alpha)^d ((1-rho)/(1-alpha))^(1-d).
// rho = alpha (powerless test) gives 1 for either d; rho = 1 with d = 0
// gives 0, which is informative, not an error.
inline double lambda_D(int d, double alpha, double rho) {
    require_domain(d == 0 || d == 1, "lambda_D: d must be 0 or 1");
    require_domain(alpha > 0.0 && alpha < 1.0, "lambda_D: alpha must lie in (0,1)");
    require_domain(rho >= alpha && rho <= 1.0,
                   "lambda_D: rho must lie in [alpha, 1]");
    return d == 1 ? rho / alpha : (1.0 - rho) / (1.0 - alpha);
}

namespace detail {

inline double likelihood_ratio_of(const Evidence& e) {
    if (const auto* raw = std::get_if<RawLikelihoodRatio>(&e)) return raw->lambda;
    if (const auto* dec = std::get_if<Decision>(&e))
        return lambda_D(dec->d, dec->alpha, dec->rho_at_alpha);
    const auto& pv = std::get<PValue>(e);
    require_domain(pv.p >= 0.0 && pv.p <= 1.0, "update: p must lie in [0,1]");
    return pv.rho_prime_at_p;
}

} // namespace detail

// Posterior kappa0 = 1/(1 + (kappa1/kappa0) LR), i.e. log-odds drop by
// log LR. LR = 0 is legal and drives kappa0 to 1 (the observation was
// impossible under the alternative).
inline Belief update(const Belief& b, const Evidence& e) {
    const double lr = detail::likelihood_ratio_of(e);
    require_domain(lr >= 0.0 && !std::isnan(lr) &&
                       lr != std::numeric_limits<double>::infinity(),
                   "update: likelihood ratio must be finite and nonnegative");
    return Belief::from_log_odds(b.log_odds() - std::log(lr));
}

// ===== effect-size profiles =====
//
// axis1 indexes effect size (xi for normal-family models, theta1 for the
// tasting designs); axis2 indexes the logit of alpha or p. values is
// row-major over axis1: values[i*axis2.size() + j] belongs to
// (axis1[i], axis2[j]). A 1-D profile has a single axis2 entry. Entries can
// be -inf where the power curve saturates; downstream writers must emit the
// sentinel literally rather than clamp it.
struct ProfileGrid {
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const {
        return values[i * axis2.size() + j];
    }
};

inline double logit(double q) {
    require_domain(q > 0.0 && q < 1.0, "logit: argument must lie in (0,1)");
    return std::log(q / (1.0 - q));
}

inline double inv_logit(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// log Lambda_D as a function of effect size at fixed (d, alpha).
// family.rho(alpha, effect) supplies the power curve.
template <typename Family>
ProfileGrid l_D_profile(const Family& family, int d, double alpha,
                        const std::vector<double>& effect_grid) {
    require_domain(d == 0 || d == 1, "l_D_profile: d must be 0 or 1");
    require_domain(alpha > 0.0 && alpha < 1.0,
                   "l_D_profile: alpha must lie in (0,1)");
    require_domain(!effect_grid.empty(), "l_D_profile: empty effect grid");
    ProfileGrid g;
    g.axis1 = effect_grid;
    g.axis2 = {logit(alpha)};
    g.values.reserve(effect_grid.size());
    for (double e : effect_grid) {
        const double rho = family.rho(alpha, e);
        g.values.push_back(d == 1 ? std::log(rho / alpha)
                                  : std::log((1.0 - rho) / (1.0 - alpha)));
    }
    return g;
}

// log rho'(p) as a function of effect size at fixed p.
template <typename Family>
ProfileGrid l_P_profile(const Family& family, double p,
                        const std::vector<double>& effect_grid) {
    require_domain(p > 0.0 && p < 1.0, "l_P_profile: p must lie in (0,1)");
    require_domain(!effect_grid.empty(), "l_P_profile: empty effect grid");
    ProfileGrid g;
    g.axis1 = effect_grid;
    g.axis2 = {logit(p)};
    g.values.reserve(effect_grid.size());
    for (double e : effect_grid) g.values.push_back(std::log(family.rho_deriv(p, e)));
    return g;
}

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    return v;
}

// The reporting convention centers on level .05; its logit is pinned into
// every contour axis that spans it so plots carry the exact reference
// column.
inline void insert_reference_logit(std::vector<double>& axis) {
    const double ref = std::log(0.05 / 0.95);
    if (axis.front() > ref || axis.back() < ref) return;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (std::fabs(axis[i] - ref) < 1e-12) return;
        if (axis[i] > ref) {
            axis.insert(axis.begin() + static_cast<std::ptrdiff_t>(i), ref);
            return;
        }
    }
}

} // namespace detail

// Dense (effect, logit level) grid of l_D at fixed d.
template <typename Family>
ProfileGrid contour_grid_d(const Family& family, int d, double effect_lo,
                           double effect_hi, double logit_lo, double logit_hi,
                           int resolution) {
    require_domain(d == 0 || d == 1, "contour_grid_d: d must be 0 or 1");
    require_domain(effect_lo < effect_hi && logit_lo < logit_hi,
                   "contour_grid_d: empty range");
    require_domain(resolution >= 2, "contour_grid_d: resolution must be >= 2");
    ProfileGrid g;
    g.axis1 = detail::linspace(effect_lo, effect_hi, resolution);
    g.axis2 = detail::linspace(logit_lo, logit_hi, resolution);
    detail::insert_reference_logit(g.axis2);
    g.values.reserve(g.axis1.size() * g.axis2.size());
    for (double e : g.axis1)
        for (double v : g.axis2) {
            const double alpha = inv_logit(v);
            const double rho = family.rho(alpha, e);
            g.values.push_back(d == 1 ? std::log(rho / alpha)
                                      : std::log((1.0 - rho) / (1.0 - alpha)));
        }
    return g;
}

// Dense (effect, logit p) grid of l_P.
template <typename Family>
ProfileGrid contour_grid_p(const Family& family, double effect_lo,
                           double effect_hi, double logit_lo, double logit_hi,
                           int resolution) {
    require_domain(effect_lo < effect_hi && logit_lo < logit_hi,
                   "contour_grid_p: empty range");
    require_domain(resolution >= 2, "contour_grid_p: resolution must be >= 2");
    ProfileGrid g;
    g.axis1 = detail::linspace(effect_lo, effect_hi, resolution);
    g.axis2 = detail::linspace(logit_lo, logit_hi, resolution);
    detail::insert_reference_logit(g.axis2);
    g.values.reserve(g.axis1.size() * g.axis2.size());
    for (double e : g.axis1)
        for (double v : g.axis2)
            g.values.push_back(std::log(family.rho_deriv(inv_logit(v), e)));
    return g;
}

} // namespace nptruth::belief
