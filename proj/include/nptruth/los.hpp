#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <vector>

#include "nptruth/dist.hpp"
#include "nptruth/errors.hpp"
#include "nptruth/models.hpp"
#include "nptruth/np.hpp"
#include "nptruth/roots.hpp"

// Optimal level-of-significance selection. Three viewpoints produce three
// levels: minimax (equalize the two risk curves), Bayes (match the level
// density slope to the prior-weighted cost ratio), and knowledge accrual
// (maximize the expected discrimination information per study). Plus the
// odds-bound sample-size rule built on the third.

namespace nptruth::los {

// Any object exposing a power curve rho(alpha) and its derivative in
// level; the shipped models all qualify directly.
template <typename R>
concept roc_like = requires(const R& r, double a) {
    { r.rho(a) } -> std::convertible_to<double>;
    { r.rho_deriv(a) } -> std::convertible_to<double>;
};

// Wraps a statistic-level test problem into the power-curve interface.
template <np::test_problem P>
struct RocAdapter {
    const P* problem;
    double rho(double a) const { return np::roc(*problem, a); }
    double rho_deriv(double p) const { return np::roc_deriv(*problem, p); }
};

template <np::test_problem P>
RocAdapter<P> roc_of(const P& problem) {
    return RocAdapter<P>{&problem};
}

// C_ij = cost of deciding H_j when H_i is true. The off-diagonal costs
// must exceed their same-row diagonals so both risk ratios are positive.
struct CostMatrix {
    double c00 = 0.0;
    double c01 = 1.0;
    double c10 = 1.0;
    double c11 = 0.0;

    void validate() const {
        require_domain(c00 >= 0.0 && c01 >= 0.0 && c10 >= 0.0 && c11 >= 0.0,
                       "CostMatrix: costs must be nonnegative");
        require_domain(c01 > c00, "CostMatrix: need C01 > C00");
        require_domain(c10 > c11, "CostMatrix: need C10 > C11");
    }

    double r1() const { return (c01 - c00) / (c10 - c11); }
    double r2() const { return (c01 - c11) / (c10 - c11); }
    double r0() const { return (c10 - c00) / (c10 - c11); }
    double r3(double kappa0) const {
        require_domain(kappa0 > 0.0 && kappa0 < 1.0,
                       "CostMatrix: kappa0 must lie in (0,1)");
        return kappa0 / (1.0 - kappa0) * r1();
    }
};

enum class LosMethod { Minimax, Bayes, Discrimination };

inline const char* method_name(LosMethod m) {
    switch (m) {
    case LosMethod::Minimax: return "minimax";
    case LosMethod::Bayes: return "bayes";
    default: return "discrimination";
    }
}

struct LosSolution {
    double alpha_star = 0.0;
    double power_at_alpha = 0.0;
    LosMethod method = LosMethod::Minimax;
    int iterations = 0;
    double residual = 0.0;
    bool clamped = false;         // Bayes target outside the slope range
    double cross_check_gap = 0.0; // |closed form - generic| when both ran
};

namespace detail {

constexpr double alpha_floor = 1e-12;

// The minimax equation has a unique root only on concave power curves;
// refuse quietly non-concave input instead of returning one of several
// crossings.
template <roc_like R>
void assert_concave(const R& roc) {
    const int grid = 200;
    double prev_rho = 0.0;
    double prev_slope = std::numeric_limits<double>::infinity();
    for (int i = 1; i < grid; ++i) {
        const double a = static_cast<double>(i) / grid;
        const double r = roc.rho(a);
        const double slope = (r - prev_rho) * grid;
        if (slope > prev_slope + 1e-7)
            throw solver_error("minimax: power curve is not concave");
        prev_slope = slope;
        prev_rho = r;
    }
}

// Expected discrimination information per study at level alpha. The power
// is pulled a hair inside 1 so the log stays finite where the curve
// saturates in double precision; the interior maximum always dominates
// the distortion this introduces at the far right edge.
template <roc_like R>
double discrimination_value(const R& roc, double alpha) {
    const double rho = std::min(roc.rho(alpha), 1.0 - 1e-16);
    if (rho <= 0.0) return 0.0;
    return (rho - alpha) *
           (std::log(rho / alpha) + std::log((1.0 - alpha) / (1.0 - rho)));
}

} // namespace detail

// Level equalizing the two risk curves: the root of
// rho(alpha) + R1 alpha - R0 = 0. Dominated-risk cost configurations pin
// the level to a boundary before any equation is solved.
template <roc_like R>
LosSolution solve_minimax(const R& roc, const CostMatrix& costs) {
    costs.validate();
    LosSolution sol;
    sol.method = LosMethod::Minimax;
    if (costs.c11 >= costs.c01) {
        sol.alpha_star = 1.0;
        sol.power_at_alpha = 1.0;
        return sol;
    }
    if (costs.c00 >= costs.c10) {
        sol.alpha_star = 0.0;
        sol.power_at_alpha = 0.0;
        return sol;
    }
    detail::assert_concave(roc);
    const double ratio1 = costs.r1();
    const double ratio0 = costs.r0();
    const auto h = [&](double a) { return roc.rho(a) + ratio1 * a - ratio0; };
    const RootResult root = find_root_bracketed(
        h, detail::alpha_floor, 1.0 - detail::alpha_floor, 1e-12, 200, "minimax");
    sol.alpha_star = root.x;
    sol.power_at_alpha = roc.rho(root.x);
    sol.iterations = root.iterations;
    sol.residual = root.fx;
    return sol;
}

// Level at which the slope of the power curve equals the prior-weighted
// cost ratio R3. When R3 falls outside the attainable slope range the
// solution sits on the boundary and is flagged. The standardized normal
// design has the closed form Phi(-e/2 - log(R3)/e); when the model
// exposes its effect the closed form is returned and the generic root is
// kept as a cross-check.
template <roc_like R>
LosSolution solve_bayes(const R& roc, const CostMatrix& costs, double kappa0) {
    costs.validate();
    const double target = costs.r3(kappa0);
    LosSolution sol;
    sol.method = LosMethod::Bayes;

    const double lo = detail::alpha_floor;
    const double hi = 1.0 - detail::alpha_floor;
    const auto g = [&](double a) { return roc.rho_deriv(a) - target; };

    double generic = std::numeric_limits<double>::quiet_NaN();
    if (g(lo) <= 0.0) {
        sol.alpha_star = 0.0;
        sol.power_at_alpha = 0.0;
        sol.clamped = true;
    } else if (g(hi) >= 0.0) {
        sol.alpha_star = 1.0;
        sol.power_at_alpha = 1.0;
        sol.clamped = true;
    } else {
        const RootResult root = find_root_bracketed(g, lo, hi, 1e-12, 200, "bayes");
        generic = root.x;
        sol.alpha_star = generic;
        sol.power_at_alpha = roc.rho(generic);
        sol.iterations = root.iterations;
        sol.residual = root.fx;
    }

    if constexpr (requires { roc.effect(); }) {
        const double e = roc.effect();
        const double closed = dist::norm_cdf(-0.5 * e - std::log(target) / e);
        if (!std::isnan(generic)) sol.cross_check_gap = std::fabs(closed - generic);
        sol.alpha_star = closed;
        sol.power_at_alpha = roc.rho(closed);
        sol.clamped = false;
    }
    return sol;
}

// Level maximizing the expected discrimination information: coarse grid
// scan to localize, golden-section inside the best bracket, then one
// parabolic vertex step to undo the flat-top plateau of the golden phase.
// Models exposing their effect get the closed form Phi(-effect/2) with
// the generic maximizer kept as a cross-check.
template <roc_like R>
LosSolution solve_discrimination(const R& roc, int grid_points = 999) {
    require_domain(grid_points >= 3, "solve_discrimination: grid too small");
    LosSolution sol;
    sol.method = LosMethod::Discrimination;

    const auto d_of = [&](double a) { return detail::discrimination_value(roc, a); };

    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            static_cast<double>(i + 1) / (grid_points + 1);
        const double v = d_of(grid[static_cast<std::size_t>(i)]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    if (!(best_val > 1e-12))
        throw solver_error("solve_discrimination: no discrimination");

    const double lo = best == 0 ? detail::alpha_floor
                                : grid[static_cast<std::size_t>(best - 1)];
    const double hi = best == grid_points - 1
                          ? 1.0 - detail::alpha_floor
                          : grid[static_cast<std::size_t>(best + 1)];
    const RootResult g = golden_section_max(d_of, lo, hi, 1e-10, 400);
    double x = g.x;

    const double h = 1e-6;
    if (x - h > detail::alpha_floor && x + h < 1.0 - detail::alpha_floor) {
        const double dm = d_of(x - h), d0 = d_of(x), dp = d_of(x + h);
        const double den = dp - 2.0 * d0 + dm;
        if (den < 0.0) {
            const double step = 0.5 * h * (dm - dp) / den;
            if (std::fabs(step) <= h) x -= step;
        }
    }

    sol.iterations = g.iterations;
    sol.alpha_star = x;
    sol.power_at_alpha = roc.rho(x);
    sol.residual = std::fabs(x - g.x);

    if constexpr (requires { roc.effect(); }) {
        const double closed = dist::norm_cdf(-0.5 * roc.effect());
        sol.cross_check_gap = std::fabs(closed - x);
        sol.alpha_star = closed;
        sol.power_at_alpha = roc.rho(closed);
    }
    return sol;
}

// ===== sample size from an evidence bound =====
//
// b bounds from below the log odds-ratio between the two possible
// decision updates at the discrimination-optimal level. At that level the
// standardized normal design is symmetric (power = 1 - level), which
// collapses the bound to a closed form.

struct SampleSizeResult {
    int n_star = 0;
    double n_bar = 0.0;     // fractional bound; NaN on the generic path
    double alpha_star = 0.0;
    double rho_star = 0.0;
    double w_b = 0.0;       // normal quantile of rho_star; NaN generic
};

inline SampleSizeResult sample_size_normal(double b, double mu_diff, double sigma) {
    require_domain(b > 0.0, "sample_size_normal: b must be positive");
    require_domain(mu_diff != 0.0, "sample_size_normal: effect must be nonzero");
    require_domain(sigma > 0.0, "sample_size_normal: sigma must be positive");
    SampleSizeResult r;
    r.rho_star = 1.0 / (1.0 + std::exp(-0.5 * b));
    r.alpha_star = 1.0 / (1.0 + std::exp(0.5 * b));
    r.w_b = dist::norm_quantile(r.rho_star);
    const double ratio = sigma / mu_diff;
    r.n_bar = 4.0 * r.w_b * r.w_b * ratio * ratio;
    r.n_star = static_cast<int>(std::ceil(r.n_bar - 1e-12));
    if (r.n_star < 1) r.n_star = 1;
    return r;
}

// Generic path: smallest n whose discrimination-point power odds satisfy
// 2 log(rho/(1-rho)) >= b. The factory maps n to a power-curve object.
template <typename Factory>
SampleSizeResult sample_size_scan(double b, Factory&& make_roc, int n_min,
                                  int n_max, int grid_points = 999) {
    require_domain(b > 0.0, "sample_size_scan: b must be positive");
    require_domain(n_min >= 1 && n_min <= n_max, "sample_size_scan: bad n range");
    for (int n = n_min; n <= n_max; ++n) {
        const auto roc = make_roc(n);
        const LosSolution sol = solve_discrimination(roc, grid_points);
        const double rho = sol.power_at_alpha;
        if (rho <= 0.0 || rho >= 1.0) continue;
        if (2.0 * std::log(rho / (1.0 - rho)) >= b) {
            SampleSizeResult r;
            r.n_star = n;
            r.n_bar = std::numeric_limits<double>::quiet_NaN();
            r.alpha_star = sol.alpha_star;
            r.rho_star = rho;
            r.w_b = std::numeric_limits<double>::quiet_NaN();
            return r;
        }
    }
    throw solver_error("sample_size_scan: bound not met by n_max");
}

// ===== risk curves =====

struct RiskRow {
    double alpha = 0.0;
    double risk_h0 = 0.0;  // C00 (1-alpha) + C01 alpha
    double risk_h1 = 0.0;  // C10 (1-rho) + C11 rho
    double bayes_risk = 0.0;
};

template <roc_like R>
std::vector<RiskRow> risk_curves(const R& roc, const CostMatrix& costs,
                                 double kappa0,
                                 const std::vector<double>& alpha_grid) {
    costs.validate();
    require_domain(kappa0 > 0.0 && kappa0 < 1.0,
                   "risk_curves: kappa0 must lie in (0,1)");
    std::vector<RiskRow> rows;
    rows.reserve(alpha_grid.size());
    for (double a : alpha_grid) {
        require_domain(a > 0.0 && a < 1.0, "risk_curves: grid must sit in (0,1)");
        RiskRow row;
        row.alpha = a;
        const double rho = roc.rho(a);
        row.risk_h0 = costs.c00 * (1.0 - a) + costs.c01 * a;
        row.risk_h1 = costs.c10 * (1.0 - rho) + costs.c11 * rho;
        row.bayes_risk = kappa0 * row.risk_h0 + (1.0 - kappa0) * row.risk_h1;
        rows.push_back(row);
    }
    return rows;
}

// ===== the 24-setting comparison table =====

struct Table1Setting {
    int id = 0;
    double c01 = 1.0;
    double c10 = 1.0;
    double kappa0 = 0.5;
    int n = 1;
    double xi = 0.5;
};

struct Table1Row {
    Table1Setting setting;
    double alpha_m = 0.0;
    double alpha_b = 0.0;
    double alpha_d = 0.0;
};

inline std::vector<Table1Setting> table1_settings() {
    std::vector<Table1Setting> s;
    int id = 1;
    for (double c01 : {1.0, 10.0})
        for (double k0 : {0.5, 0.25})
            for (int n : {1, 5})
                for (double xi : {0.5, 1.0, 2.0})
                    s.push_back(Table1Setting{id++, c01, 1.0, k0, n, xi});
    return s;
}

inline std::vector<Table1Row> table1_rows() {
    std::vector<Table1Row> rows;
    for (const Table1Setting& s : table1_settings()) {
        const models::OneSampleNormal model(0.0, s.xi, 1.0, s.n);
        const CostMatrix costs{0.0, s.c01, s.c10, 0.0};
        Table1Row row;
        row.setting = s;
        row.alpha_m = solve_minimax(model, costs).alpha_star;
        row.alpha_b = solve_bayes(model, costs, s.kappa0).alpha_star;
        row.alpha_d = solve_discrimination(model).alpha_star;
        rows.push_back(row);
    }
    return rows;
}

} // namespace nptruth::los
