// Acceptance gate. Eleven end-to-end criteria, one PASS/FAIL line each,
// exit status = number of failures. Tolerances are pinned next to each
// check; reference numbers are frozen in place so a regression anywhere
// in the stack trips exactly the criterion that owns the claim.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nptruth/bias.hpp"
#include "nptruth/cli.hpp"
#include "nptruth/dist.hpp"
#include "nptruth/los.hpp"
#include "nptruth/models.hpp"
#include "nptruth/np.hpp"
#include "nptruth/sequential.hpp"

#include "oracles/exact_tasting.hpp"
#include "oracles/numerics.hpp"

using namespace nptruth;
using np::Hypothesis;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

double secs_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ----- C1: the 24-setting level table ------------------------------------

Outcome c1_level_table() {
    // Frozen six-decimal triples (minimax, bayes, discrimination) for the
    // 24 cost/prior/design settings. Setting 13's bayes level sits below
    // the six-decimal print, so it is compared against the closed form
    // Phi(-e/2 - log(R3)/e) with e = 1/2, R3 = 10 instead.
    static const double kRef[24][3] = {
        {0.401294, 0.401294, 0.401294}, {0.308538, 0.308538, 0.308538},
        {0.158655, 0.158655, 0.158655}, {0.288075, 0.288075, 0.288075},
        {0.131776, 0.131776, 0.131776}, {0.012674, 0.012674, 0.012674},
        {0.401294, 0.974246, 0.401294}, {0.308538, 0.725284, 0.308538},
        {0.158655, 0.326105, 0.158655}, {0.288075, 0.664075, 0.288075},
        {0.131776, 0.265422, 0.131776}, {0.012674, 0.023273, 0.012674},
        {0.081468, -1.0, 0.401294},     {0.068649, 0.002535, 0.308538},
        {0.040108, 0.015727, 0.158655}, {0.065308, 0.004416, 0.288075},
        {0.034035, 0.015866, 0.131776}, {0.003666, 0.002971, 0.012674},
        {0.081468, 0.003931, 0.401294}, {0.068649, 0.044193, 0.308538},
        {0.040108, 0.054579, 0.158655}, {0.065308, 0.050932, 0.288075},
        {0.034035, 0.048814, 0.131776}, {0.003666, 0.006118, 0.012674},
    };
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = los::table1_rows();
    const double elapsed = secs_since(t0);
    if (rows.size() != 24) return {false, "expected 24 settings"};
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 24; ++i) {
        const double got[3] = {rows[static_cast<std::size_t>(i)].alpha_m,
                               rows[static_cast<std::size_t>(i)].alpha_b,
                               rows[static_cast<std::size_t>(i)].alpha_d};
        for (int j = 0; j < 3; ++j) {
            double want = kRef[i][j];
            double tol = 5e-6;
            if (i == 12 && j == 1) {
                want = dist::norm_cdf(-(0.25 + 2.0 * std::log(10.0)));
                tol = 5e-7;
            } else {
                worst = std::max(worst, std::fabs(got[j] - want));
            }
            if (std::fabs(got[j] - want) > tol) ok = false;
        }
    }
    ok = ok && elapsed < 5.0;
    return {ok, strf("24 settings, max dev %.2e vs 5e-6, %.2fs", worst, elapsed)};
}

// ----- C2: worked tasting examples ----------------------------------------

Outcome c2_worked_examples() {
    // Binomial version: s = 6 of 8, auxiliary u = 0.973.
    const models::TeaTastingBinomial v1(0.75);
    const auto r1 = np::build_rule(v1, 0.05);
    const int d1 = np::decide(r1, 6.0, 0.973);
    const double p1 = np::p_functional(v1, 6.0, 0.973);
    const double p1r = std::round(p1 * 1e4) / 1e4;

    // Fixed-margins version: t = 3 of 4, auxiliary u = 0.815.
    const models::TeaTastingFisher v2(0.75);
    const auto r2 = np::build_rule(v2, 0.05);
    const int d2 = np::decide(r2, 3.0, 0.815);
    const double p2 = np::p_functional(v2, 3.0, 0.815);
    const double p2r = std::round(p2 * 1e4) / 1e4;

    const bool ok1 = d1 == 0 && std::fabs(p1r - 0.1416) < 1e-12;
    const bool ok2 = d2 == 0 && std::fabs(p2r - 0.2007) < 1e-12;
    return {ok1 && ok2,
            strf("binomial p4=%.4f want 0.1416 d=%d; fixed-margins p4=%.4f want 0.2007 d=%d",
                 p1r, d1, p2r, d2)};
}

// ----- C3: evidence-target sample sizes -----------------------------------

Outcome c3_sample_size() {
    const auto r6 = los::sample_size_normal(6.0, 5.0, 5.0); // sigma = mu_diff
    bool ok = std::fabs(r6.alpha_star - 0.0474) <= 5e-4;
    ok = ok && std::fabs(r6.rho_star - 0.9526) <= 5e-4;
    ok = ok && std::fabs(r6.w_b - 1.6703) <= 5e-5;
    // The continuous size both ways: against the four-decimal constant and
    // as an exact identity in the solver's own quantile.
    ok = ok && std::fabs(r6.n_bar - 4.0 * 1.6703 * 1.6703) <= 2e-3;
    ok = ok && std::fabs(r6.n_bar - 4.0 * r6.w_b * r6.w_b) <= 1e-9;
    ok = ok && r6.n_star == 12;
    const auto rs = los::sample_size_normal(6.0, 1.0, 2.0); // sigma/mu_diff = 2
    ok = ok && std::fabs(rs.n_bar - 16.0 * rs.w_b * rs.w_b) <= 1e-9;
    // b = 2 log 19 puts the discrimination level exactly at 1/20.
    const auto r19 = los::sample_size_normal(2.0 * std::log(19.0), 1.0, 1.0);
    ok = ok && std::fabs(r19.alpha_star - 0.05) <= 1e-6;
    return {ok, strf("b=6: alpha %.6f rho %.6f w %.6f n*=%d; b=2log19: alpha %.9f",
                     r6.alpha_star, r6.rho_star, r6.w_b, r6.n_star, r19.alpha_star)};
}

// ----- C4: exact size in rational arithmetic ------------------------------

Outcome c4_exact_size() {
    struct Level {
        oracle::Rat exact;
        double value;
    };
    const Level levels[] = {{{1, 100}, 0.01}, {{1, 20}, 0.05}, {{1, 10}, 0.10}};
    const models::TeaTastingBinomial mb(0.75);
    const models::TeaTastingFisher mf(0.75);
    bool ok = true;
    double worst_gamma = 0.0;
    for (const auto& lv : levels) {
        for (int which = 0; which < 2; ++which) {
            const auto pmf = which == 0 ? oracle::binom8_null() : oracle::fisher_null();
            const auto er = oracle::exact_rule(pmf, lv.exact);
            // The rational construction lands on alpha exactly, not within
            // a tolerance.
            ok = ok && er.size == lv.exact;
            const auto rule = which == 0 ? np::build_rule(mb, lv.value)
                                         : np::build_rule(mf, lv.value);
            ok = ok && rule.c == static_cast<double>(er.c);
            const double gd = std::fabs(rule.gamma - er.gamma.value());
            worst_gamma = std::max(worst_gamma, gd);
            ok = ok && gd <= 1e-15;
        }
    }
    return {ok, strf("6 rules exactly at size, float gamma within %.1e of the rational",
                     worst_gamma)};
}

// ----- C5: no admissible rule beats the built rule ------------------------

Outcome c5_optimality() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Level {
        oracle::Rat exact;
        double value;
    };
    const Level levels[] = {{{1, 100}, 0.01}, {{1, 20}, 0.05}, {{1, 5}, 0.2}};
    const double thetas[] = {0.6, 0.7, 0.8, 0.9};
    bool ok = true;
    double worst = 0.0;
    for (const auto& lv : levels) {
        for (double th : thetas) {
            const auto best_b = oracle::exhaustive_best_power(
                oracle::binom8_null(), oracle::binom8_alt(static_cast<long double>(th)),
                lv.exact);
            const double got_b = np::roc(models::TeaTastingBinomial(th), lv.value);
            const double gap_b = std::fabs(static_cast<double>(
                best_b.power - static_cast<long double>(got_b)));
            const auto best_f = oracle::exhaustive_best_power(
                oracle::fisher_null(), oracle::fisher_alt(static_cast<long double>(th)),
                lv.exact);
            const double got_f = np::roc(models::TeaTastingFisher(th), lv.value);
            const double gap_f = std::fabs(static_cast<double>(
                best_f.power - static_cast<long double>(got_f)));
            worst = std::max({worst, gap_b, gap_f});
            ok = ok && gap_b <= 1e-12 && gap_f <= 1e-12;
        }
    }
    const double elapsed = secs_since(t0);
    ok = ok && elapsed < 30.0;
    return {ok, strf("24 combinations, max power gap %.1e vs exhaustive search, %.2fs",
                     worst, elapsed)};
}

// ----- C6: distribution of the realized level ------------------------------

template <typename M>
void c6_one_model(const M& m, std::uint64_t run, double& ks0, double& gap1) {
    constexpr int kN = 100000;
    std::vector<double> p0(kN), p1(kN);
    RngStream r0(61, run);
    for (int i = 0; i < kN; ++i) {
        const double s = m.sample_statistic(Hypothesis::H0, r0);
        p0[static_cast<std::size_t>(i)] = np::p_functional(m, s, r0.uniform01());
    }
    RngStream r1(62, run);
    for (int i = 0; i < kN; ++i) {
        const double s = m.sample_statistic(Hypothesis::H1, r1);
        p1[static_cast<std::size_t>(i)] = np::p_functional(m, s, r1.uniform01());
    }
    ks0 = oracle::ks_statistic(p0, [](double t) {
        return std::min(1.0, std::max(0.0, t));
    });
    // Under the alternative the realized level has cdf rho.
    gap1 = oracle::ks_statistic(p1, [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return m.rho(t);
    });
}

Outcome c6_level_distribution() {
    const double crit = oracle::ks_critical_1pct / std::sqrt(100000.0);
    double worst_ks = 0.0, worst_gap = 0.0;
    bool ok = true;
    const auto fold = [&](double ks0, double gap1) {
        worst_ks = std::max(worst_ks, ks0);
        worst_gap = std::max(worst_gap, gap1);
        ok = ok && ks0 < crit && gap1 < 0.01;
    };
    double a, b;
    c6_one_model(models::TeaTastingBinomial(0.75), 0, a, b);
    fold(a, b);
    c6_one_model(models::TeaTastingFisher(0.75), 1, a, b);
    fold(a, b);
    c6_one_model(models::OneSampleNormal(0.0, 0.4, 1.0, 10), 2, a, b);
    fold(a, b);
    c6_one_model(models::TwoSampleT(0.0, 2.0, 5.0, 10), 3, a, b);
    fold(a, b);
    return {ok, strf("4 models x 1e5 draws: null KS max %.4f vs %.4f, "
                     "alternative ecdf gap max %.4f vs 0.01",
                     worst_ks, crit, worst_gap)};
}

// ----- C7: shape of the power curve ----------------------------------------

template <typename M>
void c7_one_model(const M& m, bool continuous, bool& ok, double& fd_worst,
                  std::string& why) {
    constexpr int kG = 999;
    std::vector<double> al(kG), rho(kG), dr(kG);
    for (int i = 0; i < kG; ++i) {
        al[static_cast<std::size_t>(i)] = (i + 1) / 1000.0;
        rho[static_cast<std::size_t>(i)] = m.rho(al[static_cast<std::size_t>(i)]);
        dr[static_cast<std::size_t>(i)] = m.rho_deriv(al[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < kG; ++i) {
        if (!(rho[static_cast<std::size_t>(i)] > al[static_cast<std::size_t>(i)])) {
            ok = false;
            if (why.empty()) why = strf("rho<=alpha at %.3f", al[static_cast<std::size_t>(i)]);
            return;
        }
    }
    for (int i = 0; i + 2 < kG; ++i) {
        if (rho[static_cast<std::size_t>(i) + 1] <
            0.5 * (rho[static_cast<std::size_t>(i)] + rho[static_cast<std::size_t>(i) + 2]) -
                1e-10) {
            ok = false;
            if (why.empty()) why = strf("midpoint dip at %.3f", al[static_cast<std::size_t>(i) + 1]);
            return;
        }
    }
    for (int i = 0; i + 1 < kG; ++i) {
        if (dr[static_cast<std::size_t>(i) + 1] > dr[static_cast<std::size_t>(i)] + 1e-10) {
            ok = false;
            if (why.empty()) why = strf("slope rises at %.3f", al[static_cast<std::size_t>(i) + 1]);
            return;
        }
    }
    if (!continuous) return;
    // Central differences go blind next to the endpoints where the slope
    // blows up, so the derivative cross-check runs on [0.01, 0.99].
    for (int i = 0; i < kG; ++i) {
        const double a = al[static_cast<std::size_t>(i)];
        if (a < 0.01 || a > 0.99) continue;
        const double fd =
            oracle::fd_derivative([&](double x) { return m.rho(x); }, a, 5e-5);
        const double rel = std::fabs(fd - dr[static_cast<std::size_t>(i)]) /
                           std::max(1.0, dr[static_cast<std::size_t>(i)]);
        fd_worst = std::max(fd_worst, rel);
        if (rel > 1e-5) {
            ok = false;
            if (why.empty()) why = strf("fd gap %.1e at %.3f", rel, a);
            return;
        }
    }
}

Outcome c7_curve_shape() {
    bool ok = true;
    double fd_worst = 0.0;
    std::string why;
    c7_one_model(models::TeaTastingBinomial(0.75), false, ok, fd_worst, why);
    c7_one_model(models::TeaTastingFisher(0.75), false, ok, fd_worst, why);
    c7_one_model(models::OneSampleNormal(0.0, 0.4, 1.0, 10), true, ok, fd_worst, why);
    c7_one_model(models::TwoSampleT(0.0, 2.0, 5.0, 10), true, ok, fd_worst, why);
    if (!ok) return {false, why};
    return {true, strf("999-point grids: above diagonal, concave, slope "
                       "nonincreasing; fd slope gap max %.1e vs 1e-5",
                       fd_worst)};
}

// ----- C8: replication rejection counts ------------------------------------

Outcome c8_replication() {
    // Exact Binomial(100, 1/20) cdf for the acceptance bands.
    std::vector<double> cdf(101);
    double pmf = std::pow(0.95, 100);
    double acc = pmf;
    cdf[0] = acc;
    for (int k = 0; k < 100; ++k) {
        pmf *= (100.0 - k) / (k + 1.0) * (0.05 / 0.95);
        acc += pmf;
        cdf[static_cast<std::size_t>(k) + 1] = acc;
    }
    const auto quant = [&](double q) {
        for (int k = 0; k <= 100; ++k)
            if (cdf[static_cast<std::size_t>(k)] >= q) return k;
        return 100;
    };
    const int lo = quant(0.005), hi = quant(0.995), upper = quant(0.99);

    const seq::TwoSampleSpec spec{0.0, 2.0, 5.0};
    int inside = 0, above = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        RngStream g0(81, s);
        const auto a = seq::run_replication_study(100, spec, 15.0, 0.05,
                                                  Hypothesis::H0, g0);
        if (a.rejection_count >= lo && a.rejection_count <= hi) ++inside;
        RngStream g1(82, s);
        const auto b = seq::run_replication_study(100, spec, 15.0, 0.05,
                                                  Hypothesis::H1, g1);
        if (b.rejection_count > upper) ++above;
    }
    const bool ok = inside >= 98 && above >= 95;
    return {ok, strf("null counts in [%d,%d]: %d/100 (need 98); "
                     "alternative counts > %d: %d/100 (need 95)",
                     lo, hi, inside, upper, above)};
}

// ----- C9: sequential updating reaches the truth ----------------------------

Outcome c9_sequential() {
    const auto t0 = std::chrono::steady_clock::now();
    seq::SequentialConfig cfg;
    cfg.channel = seq::ChannelPolicy::P;
    cfg.alpha = 0.05;
    cfg.epsilon = 1e-4;
    cfg.fixed_n = 10;
    cfg.lambda = -1.0;
    cfg.max_studies = 2000;
    const auto factory = [](int n) { return models::OneSampleNormal(0.0, 0.4, 1.0, n); };
    int right0 = 0, right1 = 0;
    for (std::uint64_t r = 0; r < 200; ++r) {
        RngStream g0(91, r);
        if (seq::run_sequential(cfg, Hypothesis::H0, factory, g0).verdict ==
            seq::Verdict::H0Declared)
            ++right0;
        RngStream g1(92, r);
        if (seq::run_sequential(cfg, Hypothesis::H1, factory, g1).verdict ==
            seq::Verdict::H1Declared)
            ++right1;
    }
    const double elapsed = secs_since(t0);
    const bool ok = right0 >= 190 && right1 >= 190 && elapsed < 60.0;
    return {ok, strf("correct verdicts: %d/200 under null, %d/200 under "
                     "alternative (need 190), %.2fs",
                     right0, right1, elapsed)};
}

// ----- C10: publication bias ------------------------------------------------

Outcome c10_publication_bias() {
    // Per-study design tuned so the rejection probability at level .05 is
    // exactly 1/2: effect equal to the upper 5% normal quantile.
    const double e95 = dist::norm_quantile(0.95);
    const models::OneSampleNormal m(0.0, e95, 1.0, 1);
    const double rho = m.rho(0.05);
    bool ok = std::fabs(rho - 0.5) <= 1e-12;

    // Extreme gate: only rejections survive, and the published per-study
    // evidence equals log(rho/alpha) exactly.
    const double v = bias::biased_expected_V(bias::DecisionGate{0.0, 1.0}, 0.05, rho);
    const double vgap = std::fabs(v - std::log(rho / 0.05));
    ok = ok && vgap <= 1e-12;

    seq::SequentialConfig cfg;
    cfg.channel = seq::ChannelPolicy::D;
    cfg.alpha = 0.05;
    cfg.epsilon = 1e-4;
    cfg.fixed_n = 1;
    cfg.max_studies = 2000;
    const bias::BiasGate gate = bias::DecisionGate{0.0, 1.0};
    int flipped = 0;
    for (std::uint64_t r = 0; r < 200; ++r) {
        RngStream g(93, r);
        const auto bt = bias::run_biased_sequential(
            cfg, gate, Hypothesis::H0,
            [&](int n) { return models::OneSampleNormal(0.0, e95, 1.0, n); }, g);
        if (bt.trajectory.verdict == seq::Verdict::H1Declared) ++flipped;
    }
    ok = ok && flipped >= 190;

    // Step gate cut at the point where the level density crosses one:
    // everything published carries positive evidence, and the quadrature
    // must sit inside the Monte Carlo band.
    const double c = bias::rho_prime_unit_crossing(m);
    const double quad =
        bias::biased_expected_logrho(bias::PValueGate{bias::StepGate{c}}, m);
    ok = ok && quad > 0.0;
    RngStream g(94, 0);
    std::vector<double> kept;
    kept.reserve(40000);
    while (kept.size() < 40000) {
        const double p = g.uniform01();
        if (p <= c) kept.push_back(std::log(m.rho_deriv(p)));
    }
    const auto ms = oracle::mc_mean(kept);
    ok = ok && std::fabs(ms.mean - quad) <= 4.0 * ms.se;
    return {ok, strf("extreme-gate drift gap %.1e; null runs flipped %d/200 "
                     "(need 190); step-gate quad %.6f vs mc %.6f +- %.6f",
                     vgap, flipped, quad, ms.mean, 4.0 * ms.se)};
}

// ----- C11: byte-identical reruns -------------------------------------------

Outcome c11_determinism() {
    namespace fs = std::filesystem;
    using io::Json;
    struct Sc {
        const char* cmd;
        Json config;
    };
    std::vector<Sc> scs;
    scs.push_back({"roc", Json::parse(R"({
        "model": {"family": "tea_binomial", "theta1": 0.75}, "grid_points": 25})")});
    scs.push_back({"tea", Json::parse(R"({
        "version": 1, "s": 6, "u": 0.973, "alpha": 0.05,
        "theta_grid": {"lo": 0.55, "hi": 0.95, "step": 0.05}})")});
    scs.push_back({"replicate", Json::parse(R"({
        "model": {"family": "two_sample_t", "mu0": 0, "mu1": 2, "sigma": 5},
        "truth": "H0", "M": 30, "lambda": 15.0, "alpha": 0.05})")});
    scs.push_back({"sequential", Json::parse(R"({
        "model": {"family": "one_sample_normal", "mu0": 0.0, "mu1": 0.4, "sigma": 1.0},
        "truth": "H1", "runs": 8,
        "sequential": {"channel": "p", "alpha": 0.05, "lambda": 12.0,
                       "epsilon": 0.001, "max_studies": 400}})")});
    scs.push_back({"bias", Json::parse(R"({
        "model": {"family": "one_sample_normal", "mu0": 0, "mu1": 0.4, "sigma": 1},
        "truth": "H0",
        "sequential": {"channel": "p", "alpha": 0.05, "fixed_n": 10,
                       "max_studies": 500, "epsilon": 0.001},
        "gate": {"type": "step", "c": 0.05}, "runs": 4})")});
    scs.push_back({"optimize-los", Json::parse(R"({
        "model": {"family": "one_sample_normal", "mu0": 0, "mu1": 0.5, "sigma": 1, "n": 1},
        "costs": {"c00": 0, "c01": 10, "c10": 1, "c11": 0},
        "kappa0": 0.5, "risk_grid_points": 9})")});
    scs.push_back({"sample-size",
                   Json::parse(R"({"b": 6.0, "mu_diff": 5.0, "sigma": 5.0})")});
    scs.push_back({"profile", Json::parse(R"({
        "model": {"family": "one_sample_normal", "n": 10},
        "mode": "contour_d", "d": 0,
        "effect_grid": {"lo": 2.0, "hi": 3.0, "step": 0.5},
        "logit_lo": -7.0, "logit_hi": 0.0, "resolution": 20})")});
    scs.push_back({"table1", Json::object()});

    const fs::path base = fs::temp_directory_path() / "nptruth_accept_rerun";
    fs::remove_all(base);
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const auto listing = [](const fs::path& dir) {
        std::vector<fs::path> v;
        for (const auto& e : fs::recursive_directory_iterator(dir))
            if (e.is_regular_file()) v.push_back(fs::relative(e.path(), dir));
        std::sort(v.begin(), v.end());
        return v;
    };

    bool ok = true;
    int files = 0;
    std::string why;
    for (const auto& sc : scs) {
        const fs::path da = base / sc.cmd / "a";
        const fs::path db = base / sc.cmd / "b";
        cli::run_command(sc.cmd, sc.config, {2024, da, 1});
        cli::run_command(sc.cmd, sc.config, {2024, db, 1});
        const auto la = listing(da);
        const auto lb = listing(db);
        if (la.empty() || la != lb) {
            ok = false;
            if (why.empty()) why = strf("%s wrote different file sets", sc.cmd);
            continue;
        }
        for (const auto& rel : la) {
            ++files;
            if (slurp(da / rel) != slurp(db / rel)) {
                ok = false;
                if (why.empty())
                    why = strf("%s: %s differs between reruns", sc.cmd,
                               rel.string().c_str());
            }
        }
    }
    fs::remove_all(base);
    if (!ok) return {false, why};
    return {true, strf("9 subcommands rerun, %d files byte-identical", files)};
}

} // namespace

int main() {
    struct Row {
        const char* label;
        Outcome (*fn)();
    };
    const Row rows[] = {
        {"C1: level table reproduces the frozen reference triples", c1_level_table},
        {"C2: worked tasting examples match the printed levels", c2_worked_examples},
        {"C3: evidence-target sample sizes hit the pinned values", c3_sample_size},
        {"C4: boundary rules are exactly size alpha in rationals", c4_exact_size},
        {"C5: built rules tie the exhaustive-search optimum", c5_optimality},
        {"C6: realized level uniform under null, rho-distributed under alternative",
         c6_level_distribution},
        {"C7: power curves above diagonal, concave, slope consistent", c7_curve_shape},
        {"C8: replication rejection counts sit in the exact-size bands", c8_replication},
        {"C9: sequential updating reaches the true hypothesis", c9_sequential},
        {"C10: reporting gates distort evidence exactly as computed", c10_publication_bias},
        {"C11: reruns with the same scenario and seed are byte-identical",
         c11_determinism},
    };
    int failures = 0;
    for (const auto& row : rows) {
        Outcome o;
        try {
            o = row.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %s (%s)\n", o.pass ? "PASS" : "FAIL", row.label,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    if (failures == 0)
        std::printf("all 11 criteria passed\n");
    else
        std::printf("%d of 11 criteria failed\n", failures);
    return failures;
}
