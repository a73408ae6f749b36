#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "nptruth/belief.hpp"
#include "nptruth/bias.hpp"
#include "nptruth/errors.hpp"
#include "nptruth/io.hpp"
#include "nptruth/los.hpp"
#include "nptruth/models.hpp"
#include "nptruth/np.hpp"
#include "nptruth/rng.hpp"
#include "nptruth/sequential.hpp"

// Subcommand runners behind the command-line frontend. Each takes a
// scenario document plus a resolved run context, writes CSV files with
// JSON sidecars into the output directory, and returns a summary the
// frontend prints. Everything is callable in-process, which is how the
// byte-determinism tests drive it.

namespace nptruth::cli {

using io::Json;
using np::Hypothesis;

struct RunContext {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
    int jobs = 1;
};

// ===== strict scenario access =====

namespace detail {

inline void require_keys(const Json& obj, const std::string& ctx,
                         std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw domain_error(ctx + " must be a JSON object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw domain_error("unknown key '" + item.key() + "' in " + ctx);
    }
}

inline double jnum(const Json& obj, const std::string& ctx, const char* key,
                   std::optional<double> def = std::nullopt) {
    if (!obj.contains(key)) {
        if (def) return *def;
        throw domain_error(ctx + ": missing required key '" + key + "'");
    }
    const Json& v = obj.at(key);
    if (!v.is_number()) throw domain_error(ctx + ": key '" + key + "' must be a number");
    return v.get<double>();
}

inline std::int64_t jint(const Json& obj, const std::string& ctx, const char* key,
                         std::optional<std::int64_t> def = std::nullopt) {
    if (!obj.contains(key)) {
        if (def) return *def;
        throw domain_error(ctx + ": missing required key '" + key + "'");
    }
    const Json& v = obj.at(key);
    if (!v.is_number_integer())
        throw domain_error(ctx + ": key '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

inline std::string jstr(const Json& obj, const std::string& ctx, const char* key,
                        std::optional<std::string> def = std::nullopt) {
    if (!obj.contains(key)) {
        if (def) return *def;
        throw domain_error(ctx + ": missing required key '" + key + "'");
    }
    const Json& v = obj.at(key);
    if (!v.is_string()) throw domain_error(ctx + ": key '" + key + "' must be a string");
    return v.get<std::string>();
}

inline const Json& jobj(const Json& obj, const std::string& ctx, const char* key) {
    if (!obj.contains(key))
        throw domain_error(ctx + ": missing required key '" + key + "'");
    return obj.at(key);
}

inline Hypothesis parse_truth(const std::string& s, const std::string& ctx) {
    if (s == "H0") return Hypothesis::H0;
    if (s == "H1") return Hypothesis::H1;
    throw domain_error(ctx + ": truth must be \"H0\" or \"H1\"");
}

inline std::vector<double> arange(double lo, double hi, double step,
                                  const std::string& ctx) {
    require_domain(step > 0.0, ctx + ": step must be positive");
    require_domain(hi >= lo, ctx + ": empty range");
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo + i * step;
    return v;
}

inline std::vector<double> interior_grid(int points, const std::string& ctx) {
    require_domain(points >= 1, ctx + ": grid_points must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        v[static_cast<std::size_t>(i)] =
            static_cast<double>(i + 1) / (points + 1);
    return v;
}

// Index-addressed parallel map: results land in caller-owned slots, so
// output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
    int workers = jobs < 1 ? 1 : jobs;
    if (static_cast<std::size_t>(workers) > count)
        workers = static_cast<int>(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

// ===== model specs =====

using AnyModel = std::variant<models::OneSampleNormal, models::TwoSampleT,
                              models::TeaTastingBinomial, models::TeaTastingFisher>;

// Full model spec including the design size, for single-design commands.
inline AnyModel parse_model(const Json& spec) {
    const std::string ctx = "model";
    const std::string family = detail::jstr(spec, ctx, "family");
    if (family == "one_sample_normal" || family == "two_sample_t") {
        detail::require_keys(spec, ctx, {"family", "mu0", "mu1", "sigma", "n"});
        const double mu0 = detail::jnum(spec, ctx, "mu0");
        const double mu1 = detail::jnum(spec, ctx, "mu1");
        const double sigma = detail::jnum(spec, ctx, "sigma");
        const int n = static_cast<int>(detail::jint(spec, ctx, "n"));
        if (family == "one_sample_normal")
            return models::OneSampleNormal(mu0, mu1, sigma, n);
        return models::TwoSampleT(mu0, mu1, sigma, n);
    }
    if (family == "tea_binomial" || family == "tea_fisher") {
        detail::require_keys(spec, ctx, {"family", "theta1"});
        const double theta1 = detail::jnum(spec, ctx, "theta1");
        if (family == "tea_binomial") return models::TeaTastingBinomial(theta1);
        return models::TeaTastingFisher(theta1);
    }
    throw domain_error("model: unknown family '" + family + "'");
}

// Family spec without a size, for commands whose per-study size comes
// from policy. The callback receives a factory mapping n to a model.
struct FamilySpec {
    std::string family;
    double mu0 = 0.0, mu1 = 0.0, sigma = 1.0, theta1 = 0.0;
};

inline FamilySpec parse_family(const Json& spec) {
    const std::string ctx = "model";
    FamilySpec fs;
    fs.family = detail::jstr(spec, ctx, "family");
    if (fs.family == "one_sample_normal" || fs.family == "two_sample_t") {
        detail::require_keys(spec, ctx, {"family", "mu0", "mu1", "sigma"});
        fs.mu0 = detail::jnum(spec, ctx, "mu0");
        fs.mu1 = detail::jnum(spec, ctx, "mu1");
        fs.sigma = detail::jnum(spec, ctx, "sigma");
        return fs;
    }
    if (fs.family == "tea_binomial" || fs.family == "tea_fisher") {
        detail::require_keys(spec, ctx, {"family", "theta1"});
        fs.theta1 = detail::jnum(spec, ctx, "theta1");
        return fs;
    }
    throw domain_error("model: unknown family '" + fs.family + "'");
}

template <typename F>
auto with_family_factory(const FamilySpec& fs, F&& f) {
    if (fs.family == "one_sample_normal")
        return f([fs](int n) {
            return models::OneSampleNormal(fs.mu0, fs.mu1, fs.sigma, n);
        });
    if (fs.family == "two_sample_t")
        return f([fs](int n) { return models::TwoSampleT(fs.mu0, fs.mu1, fs.sigma, n); });
    if (fs.family == "tea_binomial")
        return f([fs](int) { return models::TeaTastingBinomial(fs.theta1); });
    return f([fs](int) { return models::TeaTastingFisher(fs.theta1); });
}

// ===== sequential config block =====

inline seq::SequentialConfig parse_sequential_block(const Json& block) {
    const std::string ctx = "sequential";
    detail::require_keys(block, ctx,
                         {"epsilon", "kappa0_init", "channel", "prob_x", "prob_d",
                          "prob_p", "alpha", "alpha_schedule", "fixed_n", "lambda",
                          "max_studies"});
    seq::SequentialConfig cfg;
    cfg.epsilon = detail::jnum(block, ctx, "epsilon", cfg.epsilon);
    cfg.kappa0_init = detail::jnum(block, ctx, "kappa0_init", cfg.kappa0_init);
    const std::string channel = detail::jstr(block, ctx, "channel", "p");
    if (channel == "x") cfg.channel = seq::ChannelPolicy::X;
    else if (channel == "d") cfg.channel = seq::ChannelPolicy::D;
    else if (channel == "p") cfg.channel = seq::ChannelPolicy::P;
    else if (channel == "round_robin") cfg.channel = seq::ChannelPolicy::RoundRobin;
    else if (channel == "random") cfg.channel = seq::ChannelPolicy::Random;
    else throw domain_error(ctx + ": unknown channel '" + channel + "'");
    cfg.prob_x = detail::jnum(block, ctx, "prob_x", cfg.prob_x);
    cfg.prob_d = detail::jnum(block, ctx, "prob_d", cfg.prob_d);
    cfg.prob_p = detail::jnum(block, ctx, "prob_p", cfg.prob_p);
    cfg.alpha = detail::jnum(block, ctx, "alpha", cfg.alpha);
    if (block.contains("alpha_schedule")) {
        const Json& sched = block.at("alpha_schedule");
        if (!sched.is_array())
            throw domain_error(ctx + ": alpha_schedule must be an array");
        for (const Json& a : sched) {
            if (!a.is_number())
                throw domain_error(ctx + ": alpha_schedule entries must be numbers");
            cfg.alpha_schedule.push_back(a.get<double>());
        }
    }
    cfg.fixed_n = static_cast<int>(detail::jint(block, ctx, "fixed_n", cfg.fixed_n));
    cfg.lambda = detail::jnum(block, ctx, "lambda", cfg.lambda);
    const std::int64_t max_studies =
        detail::jint(block, ctx, "max_studies",
                     static_cast<std::int64_t>(cfg.max_studies));
    require_domain(max_studies >= 0, ctx + ": max_studies must be >= 0");
    cfg.max_studies = static_cast<std::uint64_t>(max_studies);
    cfg.validate();
    return cfg;
}

// ===== subcommands =====

inline Json cmd_roc(const Json& config, const RunContext& ctx) {
    detail::require_keys(config, "scenario", {"seed", "out", "model", "grid_points"});
    const AnyModel model = parse_model(detail::jobj(config, "scenario", "model"));
    const int points =
        static_cast<int>(detail::jint(config, "scenario", "grid_points", 999));
    const std::vector<double> grid = detail::interior_grid(points, "roc");

    const np::RocCurve curve = std::visit(
        [&](const auto& m) { return np::roc_curve(m, grid); }, model);

    std::vector<io::Row> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        rows.push_back({io::format_double(curve.alpha[i]),
                        io::format_double(curve.rho[i]),
                        io::format_double(curve.rho_deriv[i])});
    const auto csv = ctx.out_dir / "roc.csv";
    io::write_csv(csv, {"alpha", "rho", "rho_deriv"}, rows);

    Json echo = config;
    echo["seed"] = ctx.seed;
    Json results;
    results["points"] = points;
    io::write_sidecar(csv, echo, results);
    return results;
}

inline Json cmd_tea(const Json& config, const RunContext& ctx) {
    const std::string sctx = "scenario";
    const std::int64_t version = detail::jint(config, sctx, "version");
    require_domain(version == 1 || version == 2, "tea: version must be 1 or 2");
    if (version == 1)
        detail::require_keys(config, sctx,
                             {"seed", "out", "version", "s", "u", "alpha", "theta_grid"});
    else
        detail::require_keys(config, sctx,
                             {"seed", "out", "version", "t", "u", "alpha", "theta_grid"});

    const std::int64_t count =
        detail::jint(config, sctx, version == 1 ? "s" : "t");
    const double u = detail::jnum(config, sctx, "u");
    require_domain(u >= 0.0 && u <= 1.0, "tea: u must lie in [0,1]");
    const double alpha = detail::jnum(config, sctx, "alpha", 0.05);

    double lo = 0.51, hi = 0.99, step = 0.005;
    if (config.contains("theta_grid")) {
        const Json& tg = config.at("theta_grid");
        detail::require_keys(tg, "theta_grid", {"lo", "hi", "step"});
        lo = detail::jnum(tg, "theta_grid", "lo", lo);
        hi = detail::jnum(tg, "theta_grid", "hi", hi);
        step = detail::jnum(tg, "theta_grid", "step", step);
    }
    const std::vector<double> theta_grid = detail::arange(lo, hi, step, "theta_grid");
    for (double t : theta_grid)
        require_domain(t > 0.5 && t < 1.0, "tea: theta grid must sit in (0.5, 1)");

    // The decision and realized level depend only on the null law, so any
    // alternative instantiates the design for this part.
    int d;
    double p;
    if (version == 1) {
        require_domain(count >= 0 && count <= 8, "tea: s must lie in 0..8");
        const models::TeaTastingBinomial m(0.75);
        const double s = static_cast<double>(count);
        d = np::decide(np::build_rule(m, alpha), s, u);
        p = np::p_functional(m, s, u);
    } else {
        require_domain(count >= 0 && count <= 4, "tea: t must lie in 0..4");
        const models::TeaTastingFisher m(0.75);
        const double s = static_cast<double>(count);
        d = np::decide(np::build_rule(m, alpha), s, u);
        p = np::p_functional(m, s, u);
    }

    // Levels at the edge of [0,1] are reachable on a finite support; the
    // level density is a step function there, so a nudged p reads off the
    // correct boundary value for the profile.
    double p_prof = p;
    if (p_prof < 1e-12) p_prof = 1e-12;
    if (p_prof > 1.0 - 1e-12) p_prof = 1.0 - 1e-12;

    belief::ProfileGrid ld, lp;
    if (version == 1) {
        const models::TeaTastingBinomialFamily fam;
        ld = belief::l_D_profile(fam, d, alpha, theta_grid);
        lp = belief::l_P_profile(fam, p_prof, theta_grid);
    } else {
        const models::TeaTastingFisherFamily fam;
        ld = belief::l_D_profile(fam, d, alpha, theta_grid);
        lp = belief::l_P_profile(fam, p_prof, theta_grid);
    }

    std::vector<io::Row> rows;
    rows.reserve(theta_grid.size());
    for (std::size_t i = 0; i < theta_grid.size(); ++i)
        rows.push_back({io::format_double(theta_grid[i]),
                        io::format_double(ld.values[i]),
                        io::format_double(lp.values[i])});
    const auto csv = ctx.out_dir / "tea_profiles.csv";
    io::write_csv(csv, {"theta1", "l_d", "l_p"}, rows);

    Json echo = config;
    echo["seed"] = ctx.seed;
    Json results;
    results["d"] = d;
    results["p"] = p;
    io::write_sidecar(csv, echo, results);
    return results;
}

inline Json cmd_replicate(const Json& config, const RunContext& ctx) {
    const std::string sctx = "scenario";
    detail::require_keys(config, sctx,
                         {"seed", "out", "model", "truth", "M", "lambda", "alpha",
                          "kappa0_init"});
    const FamilySpec fs = parse_family(detail::jobj(config, sctx, "model"));
    require_domain(fs.family == "two_sample_t",
                   "replicate: model family must be two_sample_t");
    const Hypothesis truth =
        detail::parse_truth(detail::jstr(config, sctx, "truth"), sctx);
    const int M = static_cast<int>(detail::jint(config, sctx, "M", 100));
    const double lambda = detail::jnum(config, sctx, "lambda", 15.0);
    const double alpha = detail::jnum(config, sctx, "alpha", 0.05);
    const double kappa0_init = detail::jnum(config, sctx, "kappa0_init", 0.5);

    RngStream rng(ctx.seed, 0);
    const seq::TwoSampleSpec spec{fs.mu0, fs.mu1, fs.sigma};
    const seq::ReplicationResult rep = seq::run_replication_study(
        M, spec, lambda, alpha, truth, rng, kappa0_init);

    std::vector<io::Row> rows;
    rows.reserve(rep.records.size());
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const models::StudyRecord& r = rep.records[i];
        rows.push_back({std::to_string(r.m), std::to_string(r.n),
                        io::format_double(r.t), std::to_string(r.d),
                        io::format_double(r.p),
                        io::format_double(rep.kappa0_after_d[i]),
                        io::format_double(rep.kappa0_after_p[i])});
    }
    const auto csv = ctx.out_dir / "replicate.csv";
    io::write_csv(csv, {"m", "n", "t", "d", "p", "kappa0_d", "kappa0_p"}, rows);

    Json echo = config;
    echo["seed"] = ctx.seed;
    Json results;
    results["rejection_count"] = rep.rejection_count;
    results["p_histogram"] = rep.p_histogram;
    results["final_kappa0_d"] = rep.kappa0_after_d.back();
    results["final_kappa0_p"] = rep.kappa0_after_p.back();
    io::write_sidecar(csv, echo, results);
    return results;
}

namespace detail {

inline void write_trajectory_csv(const std::filesystem::path& csv,
                                 const seq::Trajectory& traj) {
    std::vector<io::Row> rows;
    rows.reserve(traj.steps.size());
    for (const seq::StudyStep& s : traj.steps)
        rows.push_back({std::to_string(s.m), std::to_string(s.n),
                        io::format_double(s.alpha),
                        std::string(seq::channel_name(s.channel)),
                        io::format_double(s.payload), io::format_double(s.log_lr),
                        io::format_double(s.kappa0)});
    io::write_csv(csv, {"m", "n", "alpha", "channel", "payload", "log_lr", "kappa0"},
                  rows);
}

} // namespace detail

inline Json cmd_sequential(const Json& config, const RunContext& ctx) {
    const std::string sctx = "scenario";
    detail::require_keys(config, sctx,
                         {"seed", "out", "model", "truth", "sequential", "runs"});
    const FamilySpec fs = parse_family(detail::jobj(config, sctx, "model"));
    const Hypothesis truth =
        detail::parse_truth(detail::jstr(config, sctx, "truth"), sctx);
    const seq::SequentialConfig cfg =
        parse_sequential_block(detail::jobj(config, sctx, "sequential"));
    const std::int64_t runs = detail::jint(config, sctx, "runs", 1);
    require_domain(runs >= 1, "scenario: runs must be >= 1");

    Json echo = config;
    echo["seed"] = ctx.seed;
    Json results;

    if (runs == 1) {
        const seq::Trajectory traj = with_family_factory(fs, [&](auto factory) {
            RngStream rng(ctx.seed, 0);
            return seq::run_sequential(cfg, truth, factory, rng);
        });
        const auto csv = ctx.out_dir / "trajectory.csv";
        detail::write_trajectory_csv(csv, traj);
        results["verdict"] = seq::verdict_name(traj.verdict);
        results["studies"] = traj.steps.size();
        results["final_kappa0"] = traj.final_kappa0;
        results["final_log_odds"] = traj.final_log_odds;
        io::write_sidecar(csv, echo, results);
        return results;
    }

    std::vector<seq::Trajectory> trajs(static_cast<std::size_t>(runs));
    detail::parallel_for(static_cast<std::size_t>(runs), ctx.jobs, [&](std::size_t r) {
        trajs[r] = with_family_factory(fs, [&](auto factory) {
            RngStream rng(ctx.seed, static_cast<std::uint64_t>(r));
            return seq::run_sequential(cfg, truth, factory, rng);
        });
    });

    std::vector<io::Row> rows;
    rows.reserve(trajs.size());
    int declared_h0 = 0, declared_h1 = 0, exhausted = 0;
    for (std::size_t r = 0; r < trajs.size(); ++r) {
        const seq::Trajectory& t = trajs[r];
        switch (t.verdict) {
        case seq::Verdict::H0Declared: ++declared_h0; break;
        case seq::Verdict::H1Declared: ++declared_h1; break;
        default: ++exhausted; break;
        }
        rows.push_back({std::to_string(r), seq::verdict_name(t.verdict),
                        std::to_string(t.steps.size()),
                        io::format_double(t.final_kappa0),
                        io::format_double(t.final_log_odds)});
    }
    const auto csv = ctx.out_dir / "runs.csv";
    io::write_csv(csv, {"run", "verdict", "studies", "final_kappa0", "final_log_odds"},
                  rows);
    results["runs"] = runs;
    results["h0_declared"] = declared_h0;
    results["h1_declared"] = declared_h1;
    results["exhausted"] = exhausted;
    io::write_sidecar(csv, echo, results);
    return results;
}

// ===== bias =====

inline bias::BiasGate parse_gate(const Json& block) {
    const std::string ctx = "gate";
    const std::string type = detail::jstr(block, ctx, "type");
    if (type == "decision") {
        detail::require_keys(block, ctx, {"type", "eta0", "eta1"});
        bias::DecisionGate g;
        g.eta0 = detail::jnum(block, ctx, "eta0");
        g.eta1 = detail::jnum(block, ctx, "eta1");
        g.validate();
        return g;
    }
    if (type == "step") {
        detail::require_keys(block, ctx, {"type", "c"});
        bias::StepGate g{detail::jnum(block, ctx, "c")};
        bias::validate_gate(bias::PValueGate{g});
        return bias::PValueGate{g};
    }
    if (type == "exp") {
        detail::require_keys(block, ctx, {"type", "beta"});
        bias::ExpGate g{detail::jnum(block, ctx, "beta")};
        bias::validate_gate(bias::PValueGate{g});
        return bias::PValueGate{g};
    }
    if (type == "table") {
        detail::require_keys(block, ctx, {"type", "breaks", "values"});
        bias::TableGate g;
        if (!block.contains("breaks") || !block.at("breaks").is_array() ||
            !block.contains("values") || !block.at("values").is_array())
            throw domain_error("gate: table gate needs array keys breaks, values");
        for (const Json& b : block.at("breaks")) g.breaks.push_back(b.get<double>());
        for (const Json& v : block.at("values")) g.values.push_back(v.get<double>());
        bias::validate_gate(bias::PValueGate{g});
        return bias::PValueGate{g};
    }
    throw domain_error("gate: unknown type '" + type + "'");
}

inline Json cmd_bias(const Json& config, const RunContext& ctx) {
    const std::string sctx = "scenario";
    detail::require_keys(config, sctx,
                         {"seed", "out", "model", "truth", "sequential", "gate",
                          "runs"});
    const FamilySpec fs = parse_family(detail::jobj(config, sctx, "model"));
    const Hypothesis truth =
        detail::parse_truth(detail::jstr(config, sctx, "truth", "H0"), sctx);
    seq::SequentialConfig cfg =
        parse_sequential_block(detail::jobj(config, sctx, "sequential"));
    const bias::BiasGate gate = parse_gate(detail::jobj(config, sctx, "gate"));
    const std::int64_t runs = detail::jint(config, sctx, "runs", 1);
    require_domain(runs >= 1, "scenario: runs must be >= 1");

    Json echo = config;
    echo["seed"] = ctx.seed;
    Json results;

    // Closed-form distortion summaries are well-defined for a fixed design.
    if (cfg.lambda <= 0.0) {
        const double alpha = cfg.alpha;
        if (const auto* dg = std::get_if<bias::DecisionGate>(&gate)) {
            if (dg->eta1 > 0.0) {
                results["biased_size"] = bias::biased_size(*dg, alpha);
                const double rho = with_family_factory(fs, [&](auto factory) {
                    return np::roc(factory(cfg.fixed_n), alpha);
                });
                if (rho > alpha && rho < 1.0)
                    results["biased_expected_v"] =
                        bias::biased_expected_V(*dg, alpha, rho);
            }
        } else {
            const auto& pg = std::get<bias::PValueGate>(gate);
            results["gate_mass"] = bias::gate_integral(pg);
            results["biased_expected_logrho"] =
                with_family_factory(fs, [&](auto factory) {
                    return bias::biased_expected_logrho(pg, factory(cfg.fixed_n));
                });
        }
    }

    if (runs == 1) {
        const bias::BiasedTrajectory bt = with_family_factory(fs, [&](auto factory) {
            RngStream rng(ctx.seed, 0);
            return bias::run_biased_sequential(cfg, gate, truth, factory, rng);
        });
        std::vector<io::Row> rows;
        rows.reserve(bt.trajectory.steps.size());
        for (std::size_t i = 0; i < bt.trajectory.steps.size(); ++i) {
            const seq::StudyStep& s = bt.trajectory.steps[i];
            rows.push_back({std::to_string(s.m), std::to_string(s.n),
                            io::format_double(s.alpha),
                            std::string(seq::channel_name(s.channel)),
                            io::format_double(s.payload),
                            io::format_double(s.log_lr), std::to_string(s.published),
                            io::format_double(s.kappa0),
                            io::format_double(bt.kappa0_counterfactual[i])});
        }
        const auto csv = ctx.out_dir / "bias_trajectory.csv";
        io::write_csv(csv,
                      {"m", "n", "alpha", "channel", "payload", "log_lr", "published",
                       "kappa0", "kappa0_counterfactual"},
                      rows);
        results["verdict"] = seq::verdict_name(bt.trajectory.verdict);
        results["studies"] = bt.trajectory.steps.size();
        results["published"] = bt.published_count;
        results["final_kappa0"] = bt.trajectory.final_kappa0;
        results["final_kappa0_counterfactual"] =
            bt.kappa0_counterfactual.empty() ? cfg.kappa0_init
                                             : bt.kappa0_counterfactual.back();
        io::write_sidecar(csv, echo, results);
        return results;
    }

    std::vector<bias::BiasedTrajectory> bts(static_cast<std::size_t>(runs));
    detail::parallel_for(static_cast<std::size_t>(runs), ctx.jobs, [&](std::size_t r) {
        bts[r] = with_family_factory(fs, [&](auto factory) {
            RngStream rng(ctx.seed, static_cast<std::uint64_t>(r));
            return bias::run_biased_sequential(cfg, gate, truth, factory, rng);
        });
    });

    std::vector<io::Row> rows;
    rows.reserve(bts.size());
    int declared_h0 = 0, declared_h1 = 0, exhausted = 0;
    for (std::size_t r = 0; r < bts.size(); ++r) {
        const bias::BiasedTrajectory& bt = bts[r];
        switch (bt.trajectory.verdict) {
        case seq::Verdict::H0Declared: ++declared_h0; break;
        case seq::Verdict::H1Declared: ++declared_h1; break;
        default: ++exhausted; break;
        }
        rows.push_back(
            {std::to_string(r), seq::verdict_name(bt.trajectory.verdict),
             std::to_string(bt.trajectory.steps.size()),
             std::to_string(bt.published_count),
             io::format_double(bt.trajectory.final_kappa0),
             io::format_double(bt.kappa0_counterfactual.empty()
                                   ? cfg.kappa0_init
                                   : bt.kappa0_counterfactual.back())});
    }
    const auto csv = ctx.out_dir / "bias_runs.csv";
    io::write_csv(csv,
                  {"run", "verdict", "studies", "published", "final_kappa0",
                   "final_kappa0_counterfactual"},
                  rows);
    results["runs"] = runs;
    results["h0_declared"] = declared_h0;
    results["h1_declared"] = declared_h1;
    results["exhausted"] = exhausted;
    io::write_sidecar(csv, echo, results);
    return results;
}

// ===== level optimization =====

inline Json cmd_optimize_los(const Json& config, const RunContext& ctx) {
    const std::string sctx = "scenario";
    detail::require_keys(config, sctx,
                         {"seed", "out", "model", "costs", "kappa0", "methods",
                          "risk_grid_points"});
    const AnyModel model = parse_model(detail::jobj(config, sctx, "model"));
    los::CostMatrix costs;
    if (config.contains("costs")) {
        const Json& cb = config.at("costs");
        detail::require_keys(cb, "costs", {"c00", "c01", "c10", "c11"});
        costs.c00 = detail::jnum(cb, "costs", "c00", 0.0);
        costs.c01 = detail::jnum(cb, "costs", "c01", 1.0);
        costs.c10 = detail::jnum(cb, "costs", "c10", 1.0);
        costs.c11 = detail::jnum(cb, "costs", "c11", 0.0);
    }
    costs.validate();
    const double kappa0 = detail::jnum(config, sctx, "kappa0", 0.5);

    std::vector<std::string> methods = {"minimax", "bayes", "discrimination"};
    if (config.contains("methods")) {
        const Json& ms = config.at("methods");
        if (!ms.is_array()) throw domain_error("scenario: methods must be an array");
        methods.clear();
        for (const Json& m : ms) methods.push_back(m.get<std::string>());
    }

    std::vector<io::Row> rows;
    Json results;
    std::visit(
        [&](const auto& m) {
            for (const std::string& name : methods) {
                los::LosSolution sol;
                if (name == "minimax") sol = los::solve_minimax(m, costs);
                else if (name == "bayes") sol = los::solve_bayes(m, costs, kappa0);
                else if (name == "discrimination") sol = los::solve_discrimination(m);
                else throw domain_error("scenario: unknown method '" + name + "'");
                rows.push_back({name, io::format_double(sol.alpha_star),
                                io::format_double(sol.power_at_alpha),
                                std::to_string(sol.iterations),
                                io::format_double(sol.residual),
                                std::to_string(sol.clamped ? 1 : 0),
                                io::format_double(sol.cross_check_gap)});
                results[name] = sol.alpha_star;
            }
            const std::int64_t risk_points =
                detail::jint(config, sctx, "risk_grid_points", 0);
            if (risk_points > 0) {
                const std::vector<double> grid = detail::interior_grid(
                    static_cast<int>(risk_points), "risk_grid");
                const std::vector<los::RiskRow> rr =
                    los::risk_curves(m, costs, kappa0, grid);
                std::vector<io::Row> riskRows;
                riskRows.reserve(rr.size());
                for (const los::RiskRow& r : rr)
                    riskRows.push_back({io::format_double(r.alpha),
                                        io::format_double(r.risk_h0),
                                        io::format_double(r.risk_h1),
                                        io::format_double(r.bayes_risk)});
                io::write_csv(ctx.out_dir / "risk_curves.csv",
                              {"alpha", "risk_h0", "risk_h1", "bayes_risk"},
                              riskRows);
            }
        },
        model);

    const auto csv = ctx.out_dir / "los.csv";
    io::write_csv(csv,
                  {"method", "alpha_star", "power", "iterations", "residual",
                   "clamped", "cross_check_gap"},
                  rows);
    Json echo = config;
    echo["seed"] = ctx.seed;
    io::write_sidecar(csv, echo, results);
    return results;
}

inline Json cmd_sample_size(const Json& config, const RunContext& ctx) {
    const std::string sctx = "scenario";
    detail::require_keys(config, sctx,
                         {"seed", "out", "b", "mu_diff", "sigma", "model", "n_min",
                          "n_max", "grid_points"});
    const double b = detail::jnum(config, sctx, "b");

    los::SampleSizeResult r;
    if (config.contains("model")) {
        const FamilySpec fs = parse_family(config.at("model"));
        const int n_min = static_cast<int>(detail::jint(config, sctx, "n_min", 2));
        const int n_max = static_cast<int>(detail::jint(config, sctx, "n_max", 400));
        const int grid_points =
            static_cast<int>(detail::jint(config, sctx, "grid_points", 199));
        r = with_family_factory(fs, [&](auto factory) {
            return los::sample_size_scan(b, factory, n_min, n_max, grid_points);
        });
    } else {
        const double mu_diff = detail::jnum(config, sctx, "mu_diff", 1.0);
        const double sigma = detail::jnum(config, sctx, "sigma", 1.0);
        r = los::sample_size_normal(b, mu_diff, sigma);
    }

    std::vector<io::Row> rows;
    rows.push_back({io::format_double(b), io::format_double(r.n_bar),
                    std::to_string(r.n_star), io::format_double(r.alpha_star),
                    io::format_double(r.rho_star), io::format_double(r.w_b)});
    const auto csv = ctx.out_dir / "sample_size.csv";
    io::write_csv(csv, {"b", "n_bar", "n_star", "alpha", "rho", "w_b"}, rows);

    Json echo = config;
    echo["seed"] = ctx.seed;
    Json results;
    results["n_star"] = r.n_star;
    results["alpha"] = r.alpha_star;
    results["rho"] = r.rho_star;
    io::write_sidecar(csv, echo, results);
    return results;
}

// ===== profiles and contours =====

inline Json cmd_profile(const Json& config, const RunContext& ctx) {
    const std::string sctx = "scenario";
    detail::require_keys(config, sctx,
                         {"seed", "out", "model", "mode", "d", "alpha", "p",
                          "effect_grid", "logit_lo", "logit_hi", "resolution"});
    const Json& mspec = detail::jobj(config, sctx, "model");
    const std::string family = detail::jstr(mspec, "model", "family");
    const bool tasting = family == "tea_binomial" || family == "tea_fisher";
    int n = 0;
    if (!tasting) {
        detail::require_keys(mspec, "model", {"family", "n"});
        n = static_cast<int>(detail::jint(mspec, "model", "n"));
    } else {
        detail::require_keys(mspec, "model", {"family"});
    }

    const std::string mode = detail::jstr(config, sctx, "mode");

    double lo = tasting ? 0.51 : 0.1;
    double hi = tasting ? 0.99 : 3.0;
    double step = tasting ? 0.005 : 0.05;
    if (config.contains("effect_grid")) {
        const Json& eg = config.at("effect_grid");
        detail::require_keys(eg, "effect_grid", {"lo", "hi", "step"});
        lo = detail::jnum(eg, "effect_grid", "lo", lo);
        hi = detail::jnum(eg, "effect_grid", "hi", hi);
        step = detail::jnum(eg, "effect_grid", "step", step);
    }

    const auto run_family = [&](const auto& fam) -> belief::ProfileGrid {
        if (mode == "l_d") {
            const int d = static_cast<int>(detail::jint(config, sctx, "d"));
            const double alpha = detail::jnum(config, sctx, "alpha", 0.05);
            return belief::l_D_profile(fam, d, alpha,
                                       detail::arange(lo, hi, step, "effect_grid"));
        }
        if (mode == "l_p") {
            const double p = detail::jnum(config, sctx, "p");
            return belief::l_P_profile(fam, p,
                                       detail::arange(lo, hi, step, "effect_grid"));
        }
        const double logit_lo = detail::jnum(config, sctx, "logit_lo", -7.0);
        const double logit_hi = detail::jnum(config, sctx, "logit_hi", 0.0);
        const int resolution =
            static_cast<int>(detail::jint(config, sctx, "resolution", 101));
        if (mode == "contour_d") {
            const int d = static_cast<int>(detail::jint(config, sctx, "d"));
            return belief::contour_grid_d(fam, d, lo, hi, logit_lo, logit_hi,
                                          resolution);
        }
        if (mode == "contour_p")
            return belief::contour_grid_p(fam, lo, hi, logit_lo, logit_hi,
                                          resolution);
        throw domain_error("scenario: unknown mode '" + mode + "'");
    };

    belief::ProfileGrid grid;
    if (family == "one_sample_normal")
        grid = run_family(models::OneSampleNormalFamily{n});
    else if (family == "two_sample_t")
        grid = run_family(models::TwoSampleTFamily{n});
    else if (family == "tea_binomial")
        grid = run_family(models::TeaTastingBinomialFamily{});
    else if (family == "tea_fisher")
        grid = run_family(models::TeaTastingFisherFamily{});
    else
        throw domain_error("model: unknown family '" + family + "'");

    std::vector<io::Row> rows;
    rows.reserve(grid.axis1.size() * grid.axis2.size());
    const bool contour = grid.axis2.size() > 1;
    for (std::size_t i = 0; i < grid.axis1.size(); ++i)
        for (std::size_t j = 0; j < grid.axis2.size(); ++j) {
            if (contour)
                rows.push_back({io::format_double(grid.axis1[i]),
                                io::format_double(grid.axis2[j]),
                                io::format_double(belief::inv_logit(grid.axis2[j])),
                                io::format_double(grid.at(i, j))});
            else
                rows.push_back({io::format_double(grid.axis1[i]),
                                io::format_double(grid.at(i, j))});
        }
    const auto csv = ctx.out_dir / "profile.csv";
    if (contour)
        io::write_csv(csv, {"effect", "logit_level", "level", "value"}, rows);
    else
        io::write_csv(csv, {"effect", "value"}, rows);

    Json echo = config;
    echo["seed"] = ctx.seed;
    Json results;
    results["rows"] = rows.size();
    io::write_sidecar(csv, echo, results);
    return results;
}

inline Json cmd_table1(const Json& config, const RunContext& ctx) {
    detail::require_keys(config, "scenario", {"seed", "out"});
    const std::vector<los::Table1Row> table = los::table1_rows();
    std::vector<io::Row> rows;
    rows.reserve(table.size());
    for (const los::Table1Row& r : table)
        rows.push_back({std::to_string(r.setting.id),
                        io::format_double(r.setting.c01),
                        io::format_double(r.setting.c10),
                        io::format_double(r.setting.kappa0),
                        std::to_string(r.setting.n),
                        io::format_double(r.setting.xi),
                        io::format_double(r.alpha_m), io::format_double(r.alpha_b),
                        io::format_double(r.alpha_d)});
    const auto csv = ctx.out_dir / "table1.csv";
    io::write_csv(
        csv, {"setting", "C01", "C10", "kappa0", "n", "xi", "alpha_M", "alpha_B",
              "alpha_D"},
        rows);
    Json echo = config;
    echo["seed"] = ctx.seed;
    Json results;
    results["rows"] = rows.size();
    io::write_sidecar(csv, echo, results);
    return results;
}

// ===== dispatch =====

inline Json run_command(const std::string& name, const Json& config,
                        const RunContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec)
        throw domain_error("cannot create output directory: " +
                           ctx.out_dir.string());
    if (name == "roc") return cmd_roc(config, ctx);
    if (name == "tea") return cmd_tea(config, ctx);
    if (name == "replicate") return cmd_replicate(config, ctx);
    if (name == "sequential") return cmd_sequential(config, ctx);
    if (name == "bias") return cmd_bias(config, ctx);
    if (name == "optimize-los") return cmd_optimize_los(config, ctx);
    if (name == "sample-size") return cmd_sample_size(config, ctx);
    if (name == "profile") return cmd_profile(config, ctx);
    if (name == "table1") return cmd_table1(config, ctx);
    throw domain_error("unknown subcommand '" + name + "'");
}

} // namespace nptruth::cli
