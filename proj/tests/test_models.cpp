#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nptruth/dist.hpp"
#include "nptruth/models.hpp"
#include "nptruth/np.hpp"
#include "nptruth/rng.hpp"

#include "oracles/numerics.hpp"

using namespace nptruth;
using np::Hypothesis;

TEST_CASE("one-sample normal design basics") {
    const models::OneSampleNormal m(1.0, 2.5, 3.0, 9);
    CHECK(m.xi() == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(m.effect() == Catch::Approx(1.5).epsilon(1e-15));
    CHECK_THROWS_AS(models::OneSampleNormal(0.0, 1.0, 0.0, 5), domain_error);
    CHECK_THROWS_AS(models::OneSampleNormal(1.0, 1.0, 1.0, 5), domain_error);
    CHECK_THROWS_AS(models::OneSampleNormal(0.0, 1.0, 1.0, 0), domain_error);
}

TEST_CASE("one-sample normal log likelihood ratio matches its densities") {
    const models::OneSampleNormal m(0.0, 0.8, 1.0, 4);
    for (double s : {-2.0, -0.3, 0.0, 1.1, 3.4}) {
        const double direct = std::log(m.alt_density(s) / m.null_density(s));
        CHECK(m.log_lr(s) == Catch::Approx(direct).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("one-sample normal closed forms agree with the generic rule path") {
    const models::OneSampleNormal m(0.0, 0.6, 1.2, 7);
    for (double a : {0.003, 0.05, 0.4, 0.97})
        CHECK(m.rho(a) == Catch::Approx(np::roc(m, a)).epsilon(1e-14));
    for (double p : {0.001, 0.05, 0.5, 0.99})
        CHECK(m.rho_deriv(p) ==
              Catch::Approx(np::roc_deriv(m, p)).epsilon(1e-12));
}

TEST_CASE("one-sample normal statistic is standard normal shifted by the effect") {
    const models::OneSampleNormal m(0.0, 0.5, 2.0, 6);
    RngStream rng(31, 0);
    std::vector<double> x(20000);
    for (double& v : x) v = m.sample_statistic(Hypothesis::H1, rng);
    const double e = m.effect();
    const double d = oracle::ks_statistic(
        x, [e](double t) { return dist::norm_cdf(t - e); });
    CHECK(d < oracle::ks_critical_1pct / std::sqrt(20000.0));
}

TEST_CASE("two-sample design basics") {
    const models::TwoSampleT m(0.0, 2.0, 5.0, 20);
    CHECK(m.xi() == Catch::Approx(0.4).epsilon(1e-15));
    CHECK(m.df() == 38.0);
    CHECK(m.omega() == Catch::Approx(0.4 * std::sqrt(10.0)).epsilon(1e-15));
    CHECK_THROWS_AS(models::TwoSampleT(0.0, 1.0, 1.0, 1), domain_error);
}

TEST_CASE("pooled statistic follows the central t law under the null") {
    const models::TwoSampleT m(0.0, 2.0, 5.0, 8);
    RngStream rng(17, 2);
    std::vector<double> x(10000);
    for (double& v : x) v = m.sample_statistic(Hypothesis::H0, rng);
    const double df = m.df();
    const double d = oracle::ks_statistic(
        x, [df](double t) { return dist::t_cdf(t, df); });
    CHECK(d < oracle::ks_critical_1pct / std::sqrt(10000.0));
}

TEST_CASE("pooled statistic follows the noncentral t law under the alternative") {
    const models::TwoSampleT m(0.0, 2.0, 5.0, 8);
    RngStream rng(18, 2);
    std::vector<double> x(10000);
    for (double& v : x) v = m.sample_statistic(Hypothesis::H1, rng);
    const double df = m.df(), om = m.omega();
    const double d = oracle::ks_statistic(
        x, [df, om](double t) { return dist::nct_cdf(t, df, om); });
    CHECK(d < oracle::ks_critical_1pct / std::sqrt(10000.0));
}

TEST_CASE("two-sample monte carlo size and power match the analytic curve") {
    const models::TwoSampleT m(0.0, 2.0, 5.0, 20);
    RngStream rng(23, 1);
    const auto est = np::mc_size_power(m, 0.05, 20000, rng);
    CHECK(est.size_hat ==
          Catch::Approx(0.05).margin(4.0 * std::sqrt(0.05 * 0.95 / 20000.0)));
    const double rho = m.rho(0.05);
    // Frozen reference for this design's power at the 5% level.
    CHECK(rho == Catch::Approx(0.3436694982689811).epsilon(1e-10));
    CHECK(est.power_hat ==
          Catch::Approx(rho).margin(4.0 * std::sqrt(rho * (1.0 - rho) / 20000.0)));
}

TEST_CASE("tasting pmfs and samplers agree") {
    SECTION("binomial version") {
        const models::TeaTastingBinomial m(0.8);
        CHECK(m.support().size() == 9);
        CHECK(m.null_point(6.0) == 28.0 / 256.0);
        CHECK(m.alt_point(8.0) ==
              Catch::Approx(std::pow(0.8, 8.0)).epsilon(1e-15));
        for (double s : {0.0, 3.0, 6.0, 8.0})
            CHECK(m.log_lr(s) ==
                  Catch::Approx(std::log(m.alt_point(s) / m.null_point(s)))
                      .epsilon(1e-12));
        RngStream rng(3, 0);
        std::vector<int> counts(9, 0);
        const int reps = 50000;
        for (int i = 0; i < reps; ++i)
            counts[static_cast<int>(m.sample_statistic(Hypothesis::H1, rng))]++;
        for (int s = 0; s <= 8; ++s) {
            const double f = m.alt_point(static_cast<double>(s));
            const double se = std::sqrt(f * (1.0 - f) / reps);
            CHECK(static_cast<double>(counts[s]) / reps ==
                  Catch::Approx(f).margin(4.5 * se + 1e-9));
        }
        CHECK_THROWS_AS(models::TeaTastingBinomial(0.5), domain_error);
        CHECK_THROWS_AS(models::TeaTastingBinomial(1.0), domain_error);
    }
    SECTION("table version") {
        const models::TeaTastingFisher m(0.8);
        CHECK(m.support().size() == 5);
        CHECK(m.null_point(2.0) == 36.0 / 70.0);
        double sum = 0.0;
        for (double t : m.support()) sum += m.alt_point(t);
        CHECK(sum == Catch::Approx(1.0).epsilon(1e-14));
        RngStream rng(4, 0);
        std::vector<int> counts(5, 0);
        const int reps = 50000;
        for (int i = 0; i < reps; ++i)
            counts[static_cast<int>(m.sample_statistic(Hypothesis::H0, rng))]++;
        for (int t = 0; t <= 4; ++t) {
            const double f = m.null_point(static_cast<double>(t));
            const double se = std::sqrt(f * (1.0 - f) / reps);
            CHECK(static_cast<double>(counts[t]) / reps ==
                  Catch::Approx(f).margin(4.5 * se));
        }
    }
}

TEST_CASE("simulated studies couple the decision to the realized level") {
    const models::TwoSampleT m(0.0, 2.0, 5.0, 12);
    RngStream rng(41, 0);
    for (int i = 0; i < 2000; ++i) {
        const models::StudyRecord rec =
            models::simulate_twosample_study(m, 0.05, Hypothesis::H1, rng);
        CHECK(rec.d == (rec.p <= 0.05 ? 1 : 0));
        CHECK(rec.n == 12);
    }
}

TEST_CASE("profile families track their models") {
    SECTION("one-sample normal family") {
        const models::OneSampleNormalFamily fam{9};
        const models::OneSampleNormal m(0.0, 0.7, 1.0, 9);
        for (double a : {0.01, 0.2, 0.8})
            CHECK(fam.rho(a, 0.7) == Catch::Approx(m.rho(a)).epsilon(1e-14));
        for (double p : {0.03, 0.5})
            CHECK(fam.rho_deriv(p, 0.7) ==
                  Catch::Approx(m.rho_deriv(p)).epsilon(1e-13));
        // Zero effect collapses the curve onto the diagonal.
        CHECK(fam.rho(0.3, 0.0) == Catch::Approx(0.3).epsilon(1e-13));
        CHECK(fam.rho_deriv(0.4, 0.0) == 1.0);
    }
    SECTION("two-sample family") {
        const models::TwoSampleTFamily fam{20};
        const models::TwoSampleT m(0.0, 2.0, 5.0, 20);
        for (double a : {0.01, 0.05, 0.5})
            CHECK(fam.rho(a, 0.4) == Catch::Approx(m.rho(a)).epsilon(1e-12));
        CHECK(fam.rho_deriv(0.05, 0.4) ==
              Catch::Approx(m.rho_deriv(0.05)).epsilon(1e-12));
        CHECK(fam.rho(0.25, 0.0) == Catch::Approx(0.25).epsilon(1e-10));
        CHECK(fam.rho_deriv(0.25, 0.0) == Catch::Approx(1.0).epsilon(1e-10));
    }
    SECTION("tasting families") {
        const models::TeaTastingBinomialFamily fb;
        const models::TeaTastingBinomial mb(0.85);
        CHECK(fb.rho(0.05, 0.85) == Catch::Approx(mb.rho(0.05)).epsilon(1e-15));
        const models::TeaTastingFisherFamily ff;
        const models::TeaTastingFisher mf(0.66);
        CHECK(ff.rho_deriv(0.2, 0.66) ==
              Catch::Approx(mf.rho_deriv(0.2)).epsilon(1e-15));
    }
}
