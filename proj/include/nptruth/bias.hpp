#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nptruth/belief.hpp"
#include "nptruth/errors.hpp"
#include "nptruth/np.hpp"
#include "nptruth/quadrature.hpp"
#include "nptruth/rng.hpp"
#include "nptruth/roots.hpp"
#include "nptruth/sequential.hpp"

// Publication and reporting bias: a study is run honestly but reaches the
// literature only through a gate. Decision gates publish with probability
// eta_d depending on the verdict; level gates publish with probability
// g(p) nonincreasing in the realized level. The reader updates from
// published studies only, unaware of the gate.

namespace nptruth::bias {

using np::Hypothesis;

// eta0 = Pr{publish | d=0}, eta1 = Pr{publish | d=1}. Equal rates are a
// legal no-op gate; the strictly biased regime additionally has
// eta0 < eta1. Both zero would publish nothing, which the size and
// expectation formulas reject.
struct DecisionGate {
    double eta0 = 1.0;
    double eta1 = 1.0;

    void validate() const {
        require_domain(eta0 >= 0.0 && eta1 <= 1.0 && eta0 <= eta1,
                       "DecisionGate: need 0 <= eta0 <= eta1 <= 1");
    }
    bool is_strict() const { return eta0 < eta1; }
};

// g(p) = 1{p <= c}
struct StepGate {
    double c = 0.05;
};

// g(p) = exp(-beta p)
struct ExpGate {
    double beta = 1.0;
};

// Piecewise-constant g: value[i] on [breaks[i], breaks[i+1]) with implicit
// breaks[0] = 0 and breaks.back() = 1; breaks holds the interior cut
// points, so values.size() == breaks.size() + 1.
struct TableGate {
    std::vector<double> breaks;
    std::vector<double> values;
};

using PValueGate = std::variant<StepGate, ExpGate, TableGate>;

inline void validate_gate(const PValueGate& gate) {
    if (const auto* st = std::get_if<StepGate>(&gate)) {
        require_domain(st->c > 0.0 && st->c < 1.0,
                       "StepGate: cutoff must lie in (0,1)");
        return;
    }
    if (const auto* ex = std::get_if<ExpGate>(&gate)) {
        require_domain(ex->beta > 0.0, "ExpGate: beta must be positive");
        return;
    }
    const auto& tb = std::get<TableGate>(gate);
    require_domain(tb.values.size() == tb.breaks.size() + 1,
                   "TableGate: values must have one more entry than breaks");
    double prev_break = 0.0;
    for (double b : tb.breaks) {
        require_domain(b > prev_break && b < 1.0,
                       "TableGate: breaks must increase strictly inside (0,1)");
        prev_break = b;
    }
    double prev = 2.0;
    double mass = 0.0;
    bool all_one = true;
    for (std::size_t i = 0; i < tb.values.size(); ++i) {
        const double v = tb.values[i];
        require_domain(v >= 0.0 && v <= 1.0, "TableGate: values must lie in [0,1]");
        require_domain(v <= prev + 1e-15, "TableGate: g must be nonincreasing");
        prev = v;
        if (v != 1.0) all_one = false;
        const double lo = i == 0 ? 0.0 : tb.breaks[i - 1];
        const double hi = i == tb.breaks.size() ? 1.0 : tb.breaks[i];
        mass += v * (hi - lo);
    }
    require_domain(!all_one, "TableGate: g must not be identically 1");
    require_domain(mass > 0.0, "TableGate: g must have positive mass");
}

inline double gate_g(const PValueGate& gate, double p) {
    require_domain(p >= 0.0 && p <= 1.0, "gate_g: p must lie in [0,1]");
    if (const auto* st = std::get_if<StepGate>(&gate)) return p <= st->c ? 1.0 : 0.0;
    if (const auto* ex = std::get_if<ExpGate>(&gate)) return std::exp(-ex->beta * p);
    const auto& tb = std::get<TableGate>(gate);
    std::size_t i = 0;
    while (i < tb.breaks.size() && p >= tb.breaks[i]) ++i;
    return tb.values[i];
}

// integral of g over [0,1], in closed form per gate shape
inline double gate_integral(const PValueGate& gate) {
    if (const auto* st = std::get_if<StepGate>(&gate)) return st->c;
    if (const auto* ex = std::get_if<ExpGate>(&gate))
        return (1.0 - std::exp(-ex->beta)) / ex->beta;
    const auto& tb = std::get<TableGate>(gate);
    double mass = 0.0;
    for (std::size_t i = 0; i < tb.values.size(); ++i) {
        const double lo = i == 0 ? 0.0 : tb.breaks[i - 1];
        const double hi = i == tb.breaks.size() ? 1.0 : tb.breaks[i];
        mass += tb.values[i] * (hi - lo);
    }
    return mass;
}

// integral of g over [0,p]
inline double gate_partial_integral(const PValueGate& gate, double p) {
    require_domain(p >= 0.0 && p <= 1.0, "gate_partial_integral: p in [0,1]");
    if (const auto* st = std::get_if<StepGate>(&gate)) return std::min(p, st->c);
    if (const auto* ex = std::get_if<ExpGate>(&gate))
        return (1.0 - std::exp(-ex->beta * p)) / ex->beta;
    const auto& tb = std::get<TableGate>(gate);
    double mass = 0.0;
    for (std::size_t i = 0; i < tb.values.size(); ++i) {
        const double lo = i == 0 ? 0.0 : tb.breaks[i - 1];
        const double hi = i == tb.breaks.size() ? 1.0 : tb.breaks[i];
        if (p <= lo) break;
        mass += tb.values[i] * (std::min(p, hi) - lo);
    }
    return mass;
}

// ===== published-literature distortions, decision channel =====

// Size of the test as seen through the gate:
// alpha* = alpha eta1 / (alpha eta1 + (1-alpha) eta0).
inline double biased_size(const DecisionGate& gate, double alpha) {
    gate.validate();
    require_domain(alpha > 0.0 && alpha < 1.0, "biased_size: alpha in (0,1)");
    require_domain(gate.eta1 > 0.0,
                   "biased_size: eta0 = eta1 = 0 publishes nothing");
    const double num = alpha * gate.eta1;
    return num / (num + (1.0 - alpha) * gate.eta0);
}

// Expected published-decision evidence under the null:
// E0*(V*) = alpha* log[rho(1-alpha)/(alpha(1-rho))] + log[(1-rho)/(1-alpha)].
// With eta1=1, eta0=0 this is log(rho/alpha) > 0: every published study
// pushes the reader toward the alternative even though the null is true.
inline double biased_expected_V(const DecisionGate& gate, double alpha, double rho) {
    require_domain(rho > alpha && rho < 1.0,
                   "biased_expected_V: rho must lie in (alpha, 1)");
    const double astar = biased_size(gate, alpha);
    return astar * std::log(rho * (1.0 - alpha) / (alpha * (1.0 - rho))) +
           std::log((1.0 - rho) / (1.0 - alpha));
}

// ===== published-literature distortions, level channel =====

// Density of a published level under the null: gbar(p) = g(p)/integral(g).
struct BiasedPDensity {
    PValueGate gate;
    double norm = 1.0;

    double operator()(double p) const { return gate_g(gate, p) / norm; }
    double cdf(double p) const { return gate_partial_integral(gate, p) / norm; }
};

inline BiasedPDensity biased_p_density(const PValueGate& gate) {
    validate_gate(gate);
    const double mass = gate_integral(gate);
    require_domain(mass > 0.0, "biased_p_density: gate never publishes");
    return BiasedPDensity{gate, mass};
}

namespace detail {

// Integrate f over [lo, hi] inside the unit interval when f may blow up
// (integrably, at log-power rate) at 0 and 1, as log rho' does for the
// continuous designs. Panels packed geometrically toward a singular
// endpoint keep fixed-order GL at full accuracy; the innermost panel's
// mass is below double precision for any log-power integrand.
template <typename F>
double integrate_unit_panels(F&& f, double lo, double hi, int order = 32) {
    std::vector<double> edges;
    edges.push_back(lo);
    const double mid = 0.5 * (lo + hi);
    if (lo == 0.0) {
        std::vector<double> asc;
        for (double x = 0.1 * mid; x > 1e-45; x *= 0.1) asc.push_back(x);
        edges.insert(edges.end(), asc.rbegin(), asc.rend());
    }
    edges.push_back(mid);
    if (hi == 1.0) {
        for (double d = 0.1 * (hi - mid); d > 1e-45; d *= 0.1)
            edges.push_back(hi - d);
    }
    edges.push_back(hi);
    double acc = 0.0;
    for (std::size_t i = 1; i < edges.size(); ++i)
        acc += integrate_gl(f, edges[i - 1], edges[i], order);
    return acc;
}

} // namespace detail

// E0*[log rho'(P*)] = integral of log rho'(p) gbar(p) dp, integrated piece
// by piece so gate discontinuities never cross a quadrature panel.
template <typename Problem>
double biased_expected_logrho(const PValueGate& gate, const Problem& problem) {
    validate_gate(gate);
    const double mass = gate_integral(gate);
    require_domain(mass > 0.0, "biased_expected_logrho: gate never publishes");

    const auto log_rho_prime = [&](double p) {
        return std::log(np::roc_deriv(problem, seq::detail::clamp_p_for_density(p)));
    };

    if (const auto* st = std::get_if<StepGate>(&gate))
        return detail::integrate_unit_panels(log_rho_prime, 0.0, st->c) / mass;
    if (const auto* ex = std::get_if<ExpGate>(&gate)) {
        const double beta = ex->beta;
        return detail::integrate_unit_panels(
                   [&](double p) { return log_rho_prime(p) * std::exp(-beta * p); },
                   0.0, 1.0) /
               mass;
    }
    const auto& tb = std::get<TableGate>(gate);
    double acc = 0.0;
    for (std::size_t i = 0; i < tb.values.size(); ++i) {
        if (tb.values[i] == 0.0) continue;
        const double lo = i == 0 ? 0.0 : tb.breaks[i - 1];
        const double hi = i == tb.breaks.size() ? 1.0 : tb.breaks[i];
        acc += tb.values[i] * detail::integrate_unit_panels(log_rho_prime, lo, hi);
    }
    return acc / mass;
}

// Level at which the alternative's level density crosses 1; published
// levels below it carry positive evidence for the alternative. Root of
// log rho'(p) = 0 (for the standardized normal design this is
// Phi(-effect/2)).
template <typename Problem>
double rho_prime_unit_crossing(const Problem& problem) {
    const auto f = [&](double p) { return std::log(np::roc_deriv(problem, p)); };
    return find_root_bracketed(f, 1e-12, 1.0 - 1e-12, 1e-13, 200,
                                      "rho_prime_unit_crossing")
        .x;
}

// ===== biased sequential updating =====

using BiasGate = std::variant<DecisionGate, PValueGate>;

// Trajectory through a gated literature. steps carries every simulated
// study with its published flag; the posterior track only moves on
// published ones. kappa0_counterfactual is the posterior an ungated reader
// would have held after the same studies.
struct BiasedTrajectory {
    seq::Trajectory trajectory;
    std::vector<double> kappa0_counterfactual;
    int published_count = 0;
};

namespace detail {

// Publication coins are drawn only when the publish probability is
// interior; certain outcomes consume no randomness, so a no-op gate
// reproduces the ungated run draw for draw.
inline bool publish_with_prob(double prob, RngStream& rng) {
    if (prob >= 1.0) return true;
    if (prob <= 0.0) return false;
    return rng.uniform01() < prob;
}

} // namespace detail

// Runs the sequential loop against a gated literature. The gate fixes the
// reporting channel (decision gates publish d, level gates publish p), and
// cfg.channel must agree. Stopping tests apply to the gated reader's
// posterior; max_studies caps total simulated studies, published or not.
template <typename Factory>
BiasedTrajectory run_biased_sequential(const seq::SequentialConfig& cfg,
                                       const BiasGate& gate, Hypothesis truth,
                                       Factory&& make_problem, RngStream& rng) {
    cfg.validate();
    const bool decision_gate = std::holds_alternative<DecisionGate>(gate);
    if (decision_gate) {
        std::get<DecisionGate>(gate).validate();
        require_domain(std::get<DecisionGate>(gate).eta1 > 0.0,
                       "run_biased_sequential: gate publishes nothing");
        require_domain(cfg.channel == seq::ChannelPolicy::D,
                       "run_biased_sequential: decision gate requires channel d");
    } else {
        validate_gate(std::get<PValueGate>(gate));
        require_domain(cfg.channel == seq::ChannelPolicy::P,
                       "run_biased_sequential: level gate requires channel p");
    }

    BiasedTrajectory out;
    out.trajectory.kappa0_init = cfg.kappa0_init;
    double log_odds = std::log(cfg.kappa0_init / (1.0 - cfg.kappa0_init));
    double log_odds_cf = log_odds;

    seq::Verdict v = seq::detail::verdict_of(log_odds, cfg.epsilon);
    if (v != seq::Verdict::Exhausted) {
        out.trajectory.verdict = v;
        out.trajectory.final_log_odds = log_odds;
        out.trajectory.final_kappa0 =
            belief::Belief::from_log_odds(log_odds).kappa0();
        return out;
    }

    for (std::uint64_t m = 1; m <= cfg.max_studies; ++m) {
        const int n = cfg.lambda > 0.0
                          ? dist::poisson_sample(cfg.lambda, rng) + 5
                          : cfg.fixed_n;
        seq::StudyStep step;
        try {
            const auto problem = make_problem(n);
            step = seq::run_one_study(problem, cfg.alpha_for(m),
                                      decision_gate ? seq::Channel::D
                                                    : seq::Channel::P,
                                      truth, rng);
        } catch (const domain_error& e) {
            throw domain_error("study " + std::to_string(m) + ": " + e.what());
        } catch (const solver_error& e) {
            throw solver_error("study " + std::to_string(m) + ": " + e.what());
        }
        step.m = m;
        step.n = n;

        double publish_prob;
        if (decision_gate) {
            const auto& dg = std::get<DecisionGate>(gate);
            publish_prob = step.payload == 1.0 ? dg.eta1 : dg.eta0;
        } else {
            publish_prob = gate_g(std::get<PValueGate>(gate), step.payload);
        }
        step.published = detail::publish_with_prob(publish_prob, rng) ? 1 : 0;

        log_odds_cf -= step.log_lr;
        if (step.published) {
            log_odds -= step.log_lr;
            ++out.published_count;
        }
        step.kappa0 = belief::Belief::from_log_odds(log_odds).kappa0();
        out.trajectory.steps.push_back(step);
        out.kappa0_counterfactual.push_back(
            belief::Belief::from_log_odds(log_odds_cf).kappa0());

        v = seq::detail::verdict_of(log_odds, cfg.epsilon);
        if (v != seq::Verdict::Exhausted) break;
    }

    out.trajectory.verdict = v;
    out.trajectory.final_log_odds = log_odds;
    out.trajectory.final_kappa0 = belief::Belief::from_log_odds(log_odds).kappa0();
    return out;
}

} // namespace nptruth::bias
