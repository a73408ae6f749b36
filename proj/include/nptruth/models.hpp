#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nptruth/dist.hpp"
#include "nptruth/errors.hpp"
#include "nptruth/np.hpp"
#include "nptruth/rng.hpp"

// Concrete testing problems. Each exposes the statistic-level interface the
// rule engine consumes, plus closed-form rho / rho_deriv where the model has
// one, so the optimization and belief layers can work off the power curve
// directly.

namespace nptruth::models {

using np::Hypothesis;

// ===== one-sample normal location, sigma known =====
//
// X_1..X_n iid N(mu, sigma^2); H0: mu = mu0 vs H1: mu = mu1 > mu0. The
// statistic is the standardized mean z = sqrt(n)(xbar - mu0)/sigma, N(0,1)
// under H0 and N(effect, 1) under H1 with effect = xi sqrt(n),
// xi = (mu1 - mu0)/sigma.
class OneSampleNormal {
public:
    OneSampleNormal(double mu0, double mu1, double sigma, int n)
        : mu0_(mu0), mu1_(mu1), sigma_(sigma), n_(n) {
        require_domain(sigma > 0.0, "OneSampleNormal: sigma must be positive");
        require_domain(mu1 > mu0, "OneSampleNormal: mu1 must exceed mu0");
        require_domain(n >= 1, "OneSampleNormal: n must be at least 1");
    }

    double xi() const { return (mu1_ - mu0_) / sigma_; }
    double effect() const { return xi() * std::sqrt(static_cast<double>(n_)); }
    int n() const { return n_; }

    double null_tail(double s) const { return dist::norm_cdf(-s); }
    double alt_tail(double s) const { return dist::norm_cdf(effect() - s); }
    double null_upper_quantile(double a) const { return -dist::norm_quantile(a); }
    double null_density(double s) const { return dist::norm_pdf(s); }
    double alt_density(double s) const { return dist::norm_pdf(s - effect()); }

    double sample_statistic(Hypothesis h, RngStream& rng) const {
        const double mu = h == Hypothesis::H1 ? mu1_ : mu0_;
        double sum = 0.0;
        for (int i = 0; i < n_; ++i) sum += mu + sigma_ * dist::draw_normal(rng);
        const double xbar = sum / n_;
        return std::sqrt(static_cast<double>(n_)) * (xbar - mu0_) / sigma_;
    }

    // Total-data log likelihood ratio, a function of the sufficient
    // statistic.
    double log_lr(double s) const {
        const double e = effect();
        return e * s - 0.5 * e * e;
    }

    // rho(alpha) = 1 - Phi(Phi^{-1}(1-alpha) - effect)
    double rho(double alpha) const {
        require_domain(alpha > 0.0 && alpha < 1.0, "rho: alpha must lie in (0,1)");
        return dist::norm_cdf(effect() + dist::norm_quantile(alpha));
    }

    // rho'(alpha) = exp{effect (Phi^{-1}(1-alpha) - effect/2)}; also the
    // density of the realized level under H1.
    double rho_deriv(double p) const {
        require_domain(p > 0.0 && p < 1.0, "rho_deriv: p must lie in (0,1)");
        const double e = effect();
        return std::exp(e * (-dist::norm_quantile(p) - 0.5 * e));
    }

private:
    double mu0_, mu1_, sigma_;
    int n_;
};

// ===== two-sample pooled t, sigma unknown, equal arms =====
//
// X arm N(mu0, sigma^2), Y arm N(mu0 + kappa 1{H1}, sigma^2), n per arm.
// T = (ybar - xbar) / (s_m sqrt(2/n)) with s_m^2 the mean of the two sample
// variances; central t with 2(n-1) df under H0, noncentral with
// omega = kappa / (sigma sqrt(2/n)) under H1. The analyst never sees sigma,
// so no study-level likelihood ratio is available.
class TwoSampleT {
public:
    TwoSampleT(double mu0, double mu1, double sigma, int n)
        : mu0_(mu0), mu1_(mu1), sigma_(sigma), n_(n) {
        require_domain(sigma > 0.0, "TwoSampleT: sigma must be positive");
        require_domain(mu1 > mu0, "TwoSampleT: mu1 must exceed mu0");
        require_domain(n >= 2, "TwoSampleT: n must be at least 2 per arm");
    }

    double xi() const { return (mu1_ - mu0_) / sigma_; }
    double df() const { return 2.0 * (n_ - 1); }
    double omega() const { return xi() * std::sqrt(0.5 * n_); }
    int n() const { return n_; }

    double null_tail(double s) const { return 1.0 - dist::t_cdf(s, df()); }
    double alt_tail(double s) const { return 1.0 - dist::nct_cdf(s, df(), omega()); }
    double null_upper_quantile(double a) const { return -dist::t_quantile(a, df()); }
    double null_density(double s) const { return dist::t_pdf(s, df()); }
    double alt_density(double s) const { return dist::nct_pdf(s, df(), omega()); }

    double sample_statistic(Hypothesis h, RngStream& rng) const {
        const double shift = h == Hypothesis::H1 ? mu1_ - mu0_ : 0.0;
        double sx = 0.0, sxx = 0.0, sy = 0.0, syy = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double x = mu0_ + sigma_ * dist::draw_normal(rng);
            sx += x;
            sxx += x * x;
            const double y = mu0_ + shift + sigma_ * dist::draw_normal(rng);
            sy += y;
            syy += y * y;
        }
        const double nx = static_cast<double>(n_);
        const double xbar = sx / nx, ybar = sy / nx;
        const double vx = (sxx - nx * xbar * xbar) / (nx - 1.0);
        const double vy = (syy - nx * ybar * ybar) / (nx - 1.0);
        const double sm = std::sqrt(0.5 * (vx + vy));
        return (ybar - xbar) / (sm * std::sqrt(2.0 / nx));
    }

    double rho(double alpha) const {
        require_domain(alpha > 0.0 && alpha < 1.0, "rho: alpha must lie in (0,1)");
        const double q = -dist::t_quantile(alpha, df());
        return 1.0 - dist::nct_cdf(q, df(), omega());
    }

    double rho_deriv(double p) const {
        require_domain(p > 0.0 && p < 1.0, "rho_deriv: p must lie in (0,1)");
        const double q = -dist::t_quantile(p, df());
        return dist::nct_pdf(q, df(), omega()) / dist::t_pdf(q, df());
    }

private:
    double mu0_, mu1_, sigma_;
    int n_;
};

// ===== tasting design, binomial version =====
//
// Eight cups judged independently; S = number of correct calls,
// Binomial(8, theta). H0: theta = 1/2 vs H1: theta = theta1 > 1/2.
class TeaTastingBinomial {
public:
    explicit TeaTastingBinomial(double theta1) : theta1_(theta1) {
        require_domain(theta1 > 0.5 && theta1 < 1.0,
                       "TeaTastingBinomial: theta1 must lie in (1/2, 1)");
    }

    double theta1() const { return theta1_; }

    std::vector<double> support() const {
        return {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    }
    double null_point(double s) const { return pmf(s, 0.5); }
    double alt_point(double s) const { return pmf(s, theta1_); }

    double sample_statistic(Hypothesis h, RngStream& rng) const {
        const double theta = h == Hypothesis::H1 ? theta1_ : 0.5;
        int s = 0;
        for (int cup = 0; cup < 8; ++cup)
            if (rng.uniform01() < theta) ++s;
        return static_cast<double>(s);
    }

    double log_lr(double s) const {
        return std::log(alt_point(s)) - std::log(null_point(s));
    }

    double rho(double alpha) const { return np::roc(*this, alpha); }
    double rho_deriv(double p) const { return np::roc_deriv(*this, p); }

private:
    static double pmf(double s, double theta) {
        const int k = static_cast<int>(s);
        if (s != k || k < 0 || k > 8) return 0.0;
        return dist::binom_pmf(k, 8, theta);
    }

    double theta1_;
};

// ===== tasting design, fixed-margin version =====
//
// Four cups of each kind, the judge names four of each; T = number of
// correctly named cups of the first kind, on 0..4. Null law is the
// hypergeometric table; the alternative indexes the same table by theta.
class TeaTastingFisher {
public:
    explicit TeaTastingFisher(double theta1) : theta1_(theta1) {
        require_domain(theta1 > 0.5 && theta1 < 1.0,
                       "TeaTastingFisher: theta1 must lie in (1/2, 1)");
    }

    double theta1() const { return theta1_; }

    std::vector<double> support() const { return {0.0, 1.0, 2.0, 3.0, 4.0}; }
    double null_point(double t) const {
        const int k = static_cast<int>(t);
        if (t != k || k < 0 || k > 4) return 0.0;
        return dist::hypergeom4_pmf(k);
    }
    double alt_point(double t) const {
        const int k = static_cast<int>(t);
        if (t != k || k < 0 || k > 4) return 0.0;
        return dist::theta_tea_pmf(k, theta1_);
    }

    double sample_statistic(Hypothesis h, RngStream& rng) const {
        const double u = rng.uniform01();
        double cum = 0.0;
        for (int t = 0; t <= 4; ++t) {
            cum += h == Hypothesis::H1 ? dist::theta_tea_pmf(t, theta1_)
                                       : dist::hypergeom4_pmf(t);
            if (u < cum) return static_cast<double>(t);
        }
        return 4.0;
    }

    double log_lr(double t) const {
        return std::log(alt_point(t)) - std::log(null_point(t));
    }

    double rho(double alpha) const { return np::roc(*this, alpha); }
    double rho_deriv(double p) const { return np::roc_deriv(*this, p); }

private:
    double theta1_;
};

// ===== study simulation =====

struct StudyRecord {
    std::uint64_t m = 0; // study index
    int n = 0;           // per-arm sample size
    int d = 0;           // published decision at the study's level
    double p = 0.0;      // realized level
    double t = 0.0;      // observed statistic
};

// One two-sample study at level alpha: draws the data, applies the t rule,
// reports (d, p). A single auxiliary uniform feeds both the randomized
// decision and the realized level, so d = 1 exactly when p <= alpha.
inline StudyRecord simulate_twosample_study(const TwoSampleT& model, double alpha,
                                            Hypothesis truth, RngStream& rng) {
    StudyRecord rec;
    rec.n = model.n();
    rec.t = model.sample_statistic(truth, rng);
    const double u = rng.uniform01();
    const np::DecisionRule rule = np::build_rule(model, alpha);
    rec.d = np::decide(rule, rec.t, u);
    rec.p = np::p_functional(model, rec.t, u);
    return rec;
}

// ===== one-parameter families for profiling =====
//
// The belief layer profiles evidence against a family of alternatives. The
// normal family is indexed by xi = (mu1 - mu0)/sigma at fixed n; the tasting
// families by theta1.

struct OneSampleNormalFamily {
    int n = 1;

    double rho(double alpha, double xi) const {
        require_domain(alpha > 0.0 && alpha < 1.0, "rho: alpha must lie in (0,1)");
        const double e = xi * std::sqrt(static_cast<double>(n));
        return dist::norm_cdf(e + dist::norm_quantile(alpha));
    }
    double rho_deriv(double p, double xi) const {
        require_domain(p > 0.0 && p < 1.0, "rho_deriv: p must lie in (0,1)");
        const double e = xi * std::sqrt(static_cast<double>(n));
        return std::exp(e * (-dist::norm_quantile(p) - 0.5 * e));
    }
};

// Computes from the distribution kernels directly so the zero-effect
// column of a profile grid stays evaluable.
struct TwoSampleTFamily {
    int n = 2;

    double rho(double alpha, double xi) const {
        require_domain(alpha > 0.0 && alpha < 1.0, "rho: alpha must lie in (0,1)");
        require_domain(n >= 2, "TwoSampleTFamily: n must be at least 2");
        const double k = 2.0 * (n - 1);
        const double q = -dist::t_quantile(alpha, k);
        return 1.0 - dist::nct_cdf(q, k, xi * std::sqrt(0.5 * n));
    }
    double rho_deriv(double p, double xi) const {
        require_domain(p > 0.0 && p < 1.0, "rho_deriv: p must lie in (0,1)");
        require_domain(n >= 2, "TwoSampleTFamily: n must be at least 2");
        const double k = 2.0 * (n - 1);
        const double q = -dist::t_quantile(p, k);
        return dist::nct_pdf(q, k, xi * std::sqrt(0.5 * n)) / dist::t_pdf(q, k);
    }
};

struct TeaTastingBinomialFamily {
    double rho(double alpha, double theta1) const {
        return TeaTastingBinomial(theta1).rho(alpha);
    }
    double rho_deriv(double p, double theta1) const {
        return TeaTastingBinomial(theta1).rho_deriv(p);
    }
};

struct TeaTastingFisherFamily {
    double rho(double alpha, double theta1) const {
        return TeaTastingFisher(theta1).rho(alpha);
    }
    double rho_deriv(double p, double theta1) const {
        return TeaTastingFisher(theta1).rho_deriv(p);
    }
};

} // namespace nptruth::models
