#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nptruth/belief.hpp"
#include "nptruth/dist.hpp"
#include "nptruth/errors.hpp"
#include "nptruth/models.hpp"
#include "nptruth/np.hpp"
#include "nptruth/quadrature.hpp"
#include "nptruth/rng.hpp"

// Sequential knowledge accrual: a stream of independent studies, each
// reported through one channel (raw likelihood ratio, decision, or realized
// level), feeding log-odds updates until the posterior crosses a stopping
// threshold.

namespace nptruth::seq {

using np::Hypothesis;

enum class Channel { X, D, P };

// RoundRobin cycles through the channels the model supports (x is skipped
// when the model carries no study-level likelihood ratio). Random picks
// per study with fixed probabilities.
enum class ChannelPolicy { X, D, P, RoundRobin, Random };

enum class Verdict { H0Declared, H1Declared, Exhausted };

inline const char* channel_name(Channel c) {
    switch (c) {
    case Channel::X: return "x";
    case Channel::D: return "d";
    default: return "p";
    }
}

inline const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::H0Declared: return "H0-declared";
    case Verdict::H1Declared: return "H1-declared";
    default: return "exhausted";
    }
}

struct SequentialConfig {
    double epsilon = 1e-4;     // stop when kappa0 < eps or kappa0 > 1-eps
    double kappa0_init = 0.5;
    ChannelPolicy channel = ChannelPolicy::P;
    // Random-policy mixture weights; must sum to 1.
    double prob_x = 0.0;
    double prob_d = 0.5;
    double prob_p = 0.5;
    double alpha = 0.05;
    // When nonempty, study m uses alpha_schedule[(m-1) % size] instead of
    // the fixed level.
    std::vector<double> alpha_schedule;
    // lambda > 0 switches the per-study sample size to poisson(lambda)+5;
    // otherwise fixed_n is used as-is.
    int fixed_n = 10;
    double lambda = -1.0;
    std::uint64_t max_studies = 2000;

    void validate() const {
        require_domain(epsilon > 0.0 && epsilon < 0.5,
                       "SequentialConfig: epsilon must lie in (0, 0.5)");
        require_domain(kappa0_init > 0.0 && kappa0_init < 1.0,
                       "SequentialConfig: kappa0_init must lie in (0,1)");
        require_domain(alpha > 0.0 && alpha < 1.0,
                       "SequentialConfig: alpha must lie in (0,1)");
        for (double a : alpha_schedule)
            require_domain(a > 0.0 && a < 1.0,
                           "SequentialConfig: scheduled alpha must lie in (0,1)");
        if (channel == ChannelPolicy::Random) {
            require_domain(prob_x >= 0.0 && prob_d >= 0.0 && prob_p >= 0.0,
                           "SequentialConfig: channel probabilities must be nonnegative");
            require_domain(std::fabs(prob_x + prob_d + prob_p - 1.0) < 1e-9,
                           "SequentialConfig: channel probabilities must sum to 1");
        }
        if (lambda <= 0.0)
            require_domain(fixed_n >= 1, "SequentialConfig: fixed_n must be >= 1");
    }

    double alpha_for(std::uint64_t m) const {
        if (alpha_schedule.empty()) return alpha;
        return alpha_schedule[static_cast<std::size_t>((m - 1) % alpha_schedule.size())];
    }
};

struct StudyStep {
    std::uint64_t m = 0;   // 1-based study index
    int n = 0;             // per-study sample size
    double alpha = 0.0;    // level in force for this study
    Channel channel = Channel::P;
    double payload = 0.0;  // d, p, or the study log likelihood ratio
    double log_lr = 0.0;   // log Lambda applied to the belief
    double kappa0 = 0.0;   // posterior after this study
    int published = 1;     // 0 when a reporting gate suppressed the study
};

struct Trajectory {
    double kappa0_init = 0.5;
    std::vector<StudyStep> steps;
    Verdict verdict = Verdict::Exhausted;
    double final_log_odds = 0.0;
    double final_kappa0 = 0.5;
};

namespace detail {

// p = 0 and p = 1 are reachable on discrete supports (top and bottom of
// the support with an extreme auxiliary uniform). The H1 level density is
// a step function there, so nudging p into the open interval reads off the
// correct boundary step.
inline double clamp_p_for_density(double p) {
    if (p < 1e-300) return 1e-300;
    const double top = 1.0 - 1e-12;
    if (p > top) return top;
    return p;
}

template <typename Problem>
Channel pick_channel(const SequentialConfig& cfg, std::uint64_t m, RngStream& rng) {
    constexpr bool has_x = np::has_log_lr<Problem>;
    switch (cfg.channel) {
    case ChannelPolicy::X:
        require_domain(has_x, "channel x requested but the model reports no "
                              "study-level likelihood ratio");
        return Channel::X;
    case ChannelPolicy::D: return Channel::D;
    case ChannelPolicy::P: return Channel::P;
    case ChannelPolicy::RoundRobin: {
        if (has_x) {
            switch ((m - 1) % 3) {
            case 0: return Channel::X;
            case 1: return Channel::D;
            default: return Channel::P;
            }
        }
        return (m - 1) % 2 == 0 ? Channel::D : Channel::P;
    }
    default: { // Random
        if (!has_x)
            require_domain(cfg.prob_x == 0.0,
                           "channel x has positive probability but the model "
                           "reports no study-level likelihood ratio");
        const double u = rng.uniform01();
        if (u < cfg.prob_x) return Channel::X;
        if (u < cfg.prob_x + cfg.prob_d) return Channel::D;
        return Channel::P;
    }
    }
}

inline Verdict verdict_of(double log_odds, double epsilon) {
    // kappa0 < eps  <=>  log-odds < logit(eps); comparisons stay in
    // log-odds space so the thresholds are exact.
    const double lo_h1 = std::log(epsilon / (1.0 - epsilon));
    if (log_odds < lo_h1) return Verdict::H1Declared;
    if (log_odds > -lo_h1) return Verdict::H0Declared;
    return Verdict::Exhausted;
}

} // namespace detail

// One study's evidence: simulate the statistic, report through the chosen
// channel, return the log likelihood ratio the updater applies. The same
// auxiliary uniform drives the randomized decision and the realized level.
template <typename Problem>
StudyStep run_one_study(const Problem& problem, double alpha, Channel channel,
                        Hypothesis truth, RngStream& rng) {
    StudyStep step;
    step.alpha = alpha;
    step.channel = channel;
    const double s = problem.sample_statistic(truth, rng);
    const double u = rng.uniform01();
    switch (channel) {
    case Channel::X: {
        if constexpr (np::has_log_lr<Problem>) {
            step.log_lr = problem.log_lr(s);
            step.payload = step.log_lr;
        } else {
            throw domain_error("channel x unavailable for this model");
        }
        break;
    }
    case Channel::D: {
        const np::DecisionRule rule = np::build_rule(problem, alpha);
        const int d = np::decide(rule, s, u);
        const double rho = rule.power;
        step.log_lr = d == 1 ? std::log(rho / alpha)
                             : std::log((1.0 - rho) / (1.0 - alpha));
        step.payload = static_cast<double>(d);
        break;
    }
    default: { // Channel::P
        const double p = np::p_functional(problem, s, u);
        step.log_lr =
            std::log(np::roc_deriv(problem, detail::clamp_p_for_density(p)));
        step.payload = p;
        break;
    }
    }
    return step;
}

// The sequential loop: make a study, update, stop when the posterior
// leaves (eps, 1-eps). The factory maps a per-study sample size to a
// problem instance; designs with fixed size ignore the argument.
template <typename Factory>
Trajectory run_sequential(const SequentialConfig& cfg, Hypothesis truth,
                          Factory&& make_problem, RngStream& rng) {
    cfg.validate();
    using Problem = std::decay_t<decltype(make_problem(1))>;

    Trajectory traj;
    traj.kappa0_init = cfg.kappa0_init;
    double log_odds = std::log(cfg.kappa0_init / (1.0 - cfg.kappa0_init));

    // The threshold may already be crossed by the prior.
    Verdict v = detail::verdict_of(log_odds, cfg.epsilon);
    if (v != Verdict::Exhausted) {
        traj.verdict = v;
        traj.final_log_odds = log_odds;
        traj.final_kappa0 = belief::Belief::from_log_odds(log_odds).kappa0();
        return traj;
    }

    for (std::uint64_t m = 1; m <= cfg.max_studies; ++m) {
        const Channel channel = detail::pick_channel<Problem>(cfg, m, rng);
        const int n = cfg.lambda > 0.0
                          ? dist::poisson_sample(cfg.lambda, rng) + 5
                          : cfg.fixed_n;
        StudyStep step;
        try {
            const Problem problem = make_problem(n);
            step = run_one_study(problem, cfg.alpha_for(m), channel, truth, rng);
        } catch (const domain_error& e) {
            throw domain_error("study " + std::to_string(m) + ": " + e.what());
        } catch (const solver_error& e) {
            throw solver_error("study " + std::to_string(m) + ": " + e.what());
        }
        step.m = m;
        step.n = n;
        log_odds -= step.log_lr;
        step.kappa0 = belief::Belief::from_log_odds(log_odds).kappa0();
        traj.steps.push_back(step);

        v = detail::verdict_of(log_odds, cfg.epsilon);
        if (v != Verdict::Exhausted) break;
    }

    traj.verdict = v;
    traj.final_log_odds = log_odds;
    traj.final_kappa0 = belief::Belief::from_log_odds(log_odds).kappa0();
    return traj;
}

// ===== replication study =====
//
// M independent scientists test the same effect, each with their own
// Poisson-sized design at a common level. The result carries everything
// the four replication panels need: the size sequence, the published
// (d, p) pairs, a decile histogram of the realized levels, and posterior
// tracks for an observer updating on d alone and on p alone.
struct ReplicationResult {
    std::vector<models::StudyRecord> records;
    std::vector<double> kappa0_after_d;
    std::vector<double> kappa0_after_p;
    std::array<int, 10> p_histogram{};
    int rejection_count = 0;
};

struct TwoSampleSpec {
    double mu0 = 0.0;
    double mu1 = 1.0;
    double sigma = 1.0;

    models::TwoSampleT instantiate(int n) const {
        return models::TwoSampleT(mu0, mu1, sigma, n);
    }
};

inline ReplicationResult run_replication_study(int M, const TwoSampleSpec& spec,
                                               double lambda, double alpha,
                                               Hypothesis truth, RngStream& rng,
                                               double kappa0_init = 0.5) {
    require_domain(M >= 1, "run_replication_study: M must be >= 1");
    require_domain(lambda > 0.0, "run_replication_study: lambda must be positive");
    require_domain(alpha > 0.0 && alpha < 1.0,
                   "run_replication_study: alpha must lie in (0,1)");
    require_domain(kappa0_init > 0.0 && kappa0_init < 1.0,
                   "run_replication_study: kappa0_init must lie in (0,1)");

    ReplicationResult out;
    out.records.reserve(static_cast<std::size_t>(M));
    double lo_d = std::log(kappa0_init / (1.0 - kappa0_init));
    double lo_p = lo_d;

    for (int m = 1; m <= M; ++m) {
        const int n = dist::poisson_sample(lambda, rng) + 5;
        const models::TwoSampleT model = spec.instantiate(n);
        models::StudyRecord rec = models::simulate_twosample_study(model, alpha, truth, rng);
        rec.m = static_cast<std::uint64_t>(m);

        const double rho = model.rho(alpha);
        lo_d -= rec.d == 1 ? std::log(rho / alpha)
                           : std::log((1.0 - rho) / (1.0 - alpha));
        lo_p -= std::log(model.rho_deriv(detail::clamp_p_for_density(rec.p)));

        out.kappa0_after_d.push_back(belief::Belief::from_log_odds(lo_d).kappa0());
        out.kappa0_after_p.push_back(belief::Belief::from_log_odds(lo_p).kappa0());
        out.rejection_count += rec.d;
        std::size_t bin = static_cast<std::size_t>(rec.p * 10.0);
        if (bin > 9) bin = 9;
        ++out.p_histogram[bin];
        out.records.push_back(rec);
    }
    return out;
}

// ===== sufficient-condition diagnostics =====
//
// Convergence of the sequential loop is guaranteed when the weakest study
// in the stream still carries strictly negative expected evidence for the
// false hypothesis. This check evaluates both premises on the weakest
// configured design: the decision-channel drift sup over the level
// interval of E0[V(alpha)], and the level-channel drift
// E0[log rho'(P)] = integral of log rho' over (0,1). Purely diagnostic.
struct LemmaReport {
    double sup_d_drift = 0.0;  // sup_alpha E0[V(alpha)] on [alpha_lo, alpha_hi]
    double sup_d_arg = 0.0;
    double p_drift = 0.0;      // E0[log rho'(P)]
    bool d_condition_holds = false;
    bool p_condition_holds = false;
    double margin = 0.0;
};

template <typename Problem>
LemmaReport lemma_condition_check(const Problem& weakest, double alpha_lo,
                                  double alpha_hi, double margin = 1e-3) {
    require_domain(alpha_lo > 0.0 && alpha_hi < 1.0 && alpha_lo <= alpha_hi,
                   "lemma_condition_check: level interval must sit inside (0,1)");
    require_domain(margin > 0.0, "lemma_condition_check: margin must be positive");

    LemmaReport rep;
    rep.margin = margin;

    const int grid = 2001;
    rep.sup_d_drift = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double a =
            alpha_lo + (alpha_hi - alpha_lo) * static_cast<double>(i) / (grid - 1);
        const double rho = np::roc(weakest, a);
        const double drift = a * std::log(rho / a) +
                             (1.0 - a) * std::log((1.0 - rho) / (1.0 - a));
        if (drift > rep.sup_d_drift) {
            rep.sup_d_drift = drift;
            rep.sup_d_arg = a;
        }
    }
    rep.d_condition_holds = rep.sup_d_drift <= -margin;

    rep.p_drift = integrate_gl(
        [&](double u) {
            return std::log(np::roc_deriv(weakest, detail::clamp_p_for_density(u)));
        },
        0.0, 1.0, 400);
    rep.p_condition_holds = rep.p_drift <= -margin;
    return rep;
}

} // namespace nptruth::seq
