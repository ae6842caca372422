#include "ckdv/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ckdv/errors.hpp"
#include "ckdv/io.hpp"

namespace ckdv {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

Json reals(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(real_to_json(x));
    return a;
}

Json classification_json(const RegimeClass& rc) {
    Json constraints = Json::array();
    for (const auto& c : rc.required_constraints)
        constraints.push_back({{"description", c.description}, {"satisfied", c.satisfied}});
    Json estimates = Json::array();
    for (auto e : rc.available_estimates) estimates.push_back(std::string(to_string(e)));
    return {{"ratio", real_to_json(rc.ratio)},
            {"regime", std::string(to_string(rc.regime))},
            {"admissible", rc.admissible},
            {"constraints", constraints},
            {"estimates", estimates}};
}

std::string classification_text(const SystemCoefficients& c, const RegimeClass& rc) {
    std::ostringstream s;
    s << "system: a1=" << fmt(c.a1()) << " a2=" << fmt(c.a2()) << " c11=" << fmt(c.c11())
      << " c12=" << fmt(c.c12()) << " c21=" << fmt(c.c21()) << " c22=" << fmt(c.c22()) << "\n";
    s << "ratio a2/a1: " << fmt(rc.ratio) << " (" << to_string(rc.regime) << ")\n";
    s << "constraints:";
    if (rc.required_constraints.empty()) s << " none";
    for (const auto& k : rc.required_constraints)
        s << " [" << k.description << (k.satisfied ? ": holds]" : ": violated]");
    s << "\nbilinear estimates:";
    for (auto e : rc.available_estimates) s << " " << to_string(e);
    s << "\nadmissible: " << (rc.admissible ? "yes" : "no") << "\n";
    return s.str();
}

/// Experiment bodies append to the summary and the JSONL stream.
struct Context {
    const RunConfig& cfg;
    SystemCoefficients coeffs;
    GridPtr grid;
    SpectralState initial;
    JsonlWriter& out;
    std::filesystem::path dir;
    std::ostringstream summary;

    void curve(const std::string& name, Curve c) { write_tsv(dir / (name + ".tsv"), c); }
};

void run_simulate(Context& ctx) {
    const auto& sp = ctx.cfg.simulate;
    EvolveOptions opts;
    opts.stride = sp.stride;
    opts.gevrey_sigmas = sp.gevrey_sigmas;
    opts.eta = invariant_weight(ctx.coeffs);
    opts.estimate_radius = sp.estimate_radius;
    ctx.out.write({{"type", "simulate"},
                   {"gevrey_sigmas", reals(sp.gevrey_sigmas)},
                   {"eta", opts.eta ? real_to_json(*opts.eta) : Json(nullptr)},
                   {"dt", real_to_json(ctx.cfg.stepper.dt)},
                   {"t_final", real_to_json(sp.t_final)}});

    RunRecord rec;
    std::optional<BlowUp> failure;
    try {
        rec = evolve(ctx.initial, ctx.coeffs, ctx.cfg.stepper, sp.t_final, opts);
    } catch (const RunAborted& e) {
        rec = e.record();
        failure.emplace(e.what(), e.time());
    }
    for (const auto& r : rec.rows) ctx.out.write(to_json(r));

    Curve l2{"t", "pair_l2"};
    Curve radius{"t", "radius"};
    Curve inv{"t", "invariant"};
    std::vector<Curve> gev;
    for (double s : sp.gevrey_sigmas) gev.push_back({"t", "pair_gevrey_sigma_" + format_real(s)});
    for (const auto& r : rec.rows) {
        l2.x.push_back(r.t);
        l2.y.push_back(r.pair_l2);
        double sig = std::numeric_limits<double>::infinity();
        if (r.radius_u) sig = std::min(sig, r.radius_u->sigma_hat);
        if (r.radius_v) sig = std::min(sig, r.radius_v->sigma_hat);
        if (std::isfinite(sig)) {
            radius.x.push_back(r.t);
            radius.y.push_back(sig);
        }
        if (r.invariant) {
            inv.x.push_back(r.t);
            inv.y.push_back(*r.invariant);
        }
        for (std::size_t j = 0; j < gev.size(); ++j) {
            gev[j].x.push_back(r.t);
            gev[j].y.push_back(std::max(r.gevrey_u[j], r.gevrey_v[j]));
        }
    }
    ctx.curve("pair_l2", l2);
    if (sp.estimate_radius) ctx.curve("radius", radius);
    if (opts.eta) ctx.curve("invariant", inv);
    for (std::size_t j = 0; j < gev.size(); ++j) ctx.curve("gevrey_" + std::to_string(j), gev[j]);

    auto& s = ctx.summary;
    s << "simulate: t_final=" << fmt(sp.t_final) << " dt=" << fmt(rec.dt) << " rows=" << rec.rows.size() << "\n";
    if (!rec.rows.empty()) {
        const auto& a = rec.rows.front();
        const auto& b = rec.rows.back();
        s << "pair L2 norm: " << fmt(a.pair_l2) << " -> " << fmt(b.pair_l2) << "\n";
        for (std::size_t j = 0; j < sp.gevrey_sigmas.size(); ++j)
            s << "pair Gevrey norm sigma=" << fmt(sp.gevrey_sigmas[j]) << ": "
              << fmt(std::max(a.gevrey_u[j], a.gevrey_v[j])) << " -> "
              << fmt(std::max(b.gevrey_u[j], b.gevrey_v[j])) << "\n";
        if (opts.eta && rec.rows.size() > 1) {
            const auto d = check_quadratic_invariant(rec, *opts.eta);
            s << "invariant eta=" << fmt(*opts.eta) << ": max drift " << fmt(d.max_drift)
              << (d.relative ? " (relative)" : " (absolute)") << "\n";
        }
    }
    if (failure) throw *failure;
}

void run_classify(Context& ctx) {
    const auto rc = classify(ctx.coeffs);
    ctx.out.write({{"type", "classify"},
                   {"divergence_form", is_divergence_form(ctx.coeffs)},
                   {"eta", real_to_json(invariant_weight(ctx.coeffs).value_or(NAN))},
                   {"classification", classification_json(rc)}});
    ctx.summary << "verdict: " << (rc.admissible ? "admissible" : "not admissible") << "\n";
}

AclScanResult fitted_acl(Context& ctx) {
    return acl_defect_scan(ctx.initial, ctx.coeffs, ctx.cfg.acl.sigmas, ctx.cfg.analysis.rho,
                           ctx.cfg.stepper, ctx.cfg.life);
}

Json acl_json(const AclScanResult& r) {
    return {{"delta", real_to_json(r.delta)},
            {"rho", real_to_json(r.rho)},
            {"eta", r.eta ? real_to_json(*r.eta) : Json(nullptr)},
            {"sigmas", reals(r.sigmas)},
            {"defects", reals(r.defects)},
            {"pair_defects", reals(r.pair_defects)},
            {"exponent", real_to_json(r.exponent)},
            {"exponent_stderr", real_to_json(r.exponent_stderr)},
            {"fit_ok", r.fit_ok},
            {"clipped", r.clipped},
            {"C_b", real_to_json(r.C_b)},
            {"flagged", r.flagged},
            {"message", r.message}};
}

void run_acl(Context& ctx) {
    const auto r = fitted_acl(ctx);
    ctx.out.write({{"type", "acl"}, {"result", acl_json(r)}});
    Curve d{"sigma", "defect"}, p{"sigma", "pair_defect"};
    d.x = r.sigmas;
    d.y = r.defects;
    p.x = r.sigmas;
    p.y = r.pair_defects;
    ctx.curve("defect", d);
    ctx.curve("pair_defect", p);
    auto& s = ctx.summary;
    s << "acl-scan: delta=" << fmt(r.delta) << " eta=" << (r.eta ? fmt(*r.eta) : "none") << "\n";
    if (r.fit_ok)
        s << "fitted exponent of D(sigma): " << fmt(r.exponent) << " +- " << fmt(r.exponent_stderr) << "\n";
    else
        s << "fitted exponent: not available (" << r.message << ")\n";
    s << "fitted C_b: " << fmt(r.C_b) << " (rho=" << fmt(r.rho) << ")\n";
    s << "clipped points: " << r.clipped << (r.flagged ? "; defect below -1e-8 flagged" : "") << "\n";
}

void run_commutator(Context& ctx) {
    const auto fits = commutator_scaling_fit(ctx.initial, ctx.coeffs, ctx.cfg.commutator.sigmas, ctx.cfg.threads);
    for (const auto& f : fits) {
        ctx.out.write({{"type", "commutator"},
                       {"term", f.term},
                       {"skipped", f.skipped},
                       {"notice", f.notice},
                       {"exponent", real_to_json(f.exponent)},
                       {"exponent_stderr", real_to_json(f.exponent_stderr)},
                       {"sigmas", reals(f.sigmas)},
                       {"norms", reals(f.norms)}});
        ctx.curve("f" + std::to_string(f.term), Curve{"sigma", "norm", f.sigmas, f.norms});
        ctx.summary << "f" << f.term << ": ";
        if (f.skipped)
            ctx.summary << f.notice << "\n";
        else
            ctx.summary << "exponent " << fmt(f.exponent) << " +- " << fmt(f.exponent_stderr) << "\n";
    }
}

void run_picard(Context& ctx) {
    const auto study = picard_contraction_study(ctx.initial, ctx.coeffs, ctx.cfg.picard.deltas,
                                                ctx.cfg.picard.options, ctx.cfg.threads);
    Curve maxr{"delta", "max_ratio"};
    for (std::size_t i = 0; i < study.cells.size(); ++i) {
        const auto& c = study.cells[i];
        Json ratios = Json::array();
        for (const auto& r : c.ratios) ratios.push_back(r ? real_to_json(*r) : Json(nullptr));
        ctx.out.write({{"type", "picard_cell"},
                       {"delta", real_to_json(c.delta)},
                       {"differences", reals(c.differences)},
                       {"ratios", ratios},
                       {"max_ratio", real_to_json(c.max_ratio)},
                       {"failed", c.failed},
                       {"message", c.message}});
        maxr.x.push_back(c.delta);
        maxr.y.push_back(c.max_ratio);
        Curve d{"n", "difference"};
        for (std::size_t k = 0; k < c.differences.size(); ++k) {
            d.x.push_back(static_cast<double>(k + 1));
            d.y.push_back(c.differences[k]);
        }
        ctx.curve("picard_differences_" + std::to_string(i), d);
        ctx.summary << "delta=" << fmt(c.delta) << ": max ratio " << fmt(c.max_ratio)
                    << (c.failed ? " (contraction failed: " + c.message + ")" : "") << "\n";
    }
    ctx.curve("picard_max_ratio", maxr);
    ctx.out.write({{"type", "picard"},
                   {"delta_star", study.delta_star ? real_to_json(*study.delta_star) : Json(nullptr)},
                   {"monotone", study.monotone}});
    ctx.summary << "empirical threshold delta*: "
                << (study.delta_star ? fmt(*study.delta_star) : std::string("not reached")) << "\n"
                << "max ratio nondecreasing in delta: " << (study.monotone ? "yes" : "no") << "\n";
}

void run_inequality(Context& ctx) {
    const auto& in = ctx.cfg.inequality;
    std::vector<double> xi;
    const auto steps = static_cast<long>(std::floor((in.xi_max - in.xi_min) / in.xi_step + 1e-9));
    for (long i = 0; i <= steps; ++i) xi.push_back(in.xi_min + static_cast<double>(i) * in.xi_step);
    Curve by_rho{"rho", "worst_ratio"};
    InequalityScanReport worst;
    for (double rho : in.rhos) {
        const double one[] = {rho};
        const auto r = commutator_inequality_scan(xi, in.sigmas, one, ctx.cfg.threads);
        by_rho.x.push_back(rho);
        by_rho.y.push_back(r.worst_ratio);
        const std::size_t total = worst.tuples + r.tuples;
        if (r.worst_ratio > worst.worst_ratio || worst.tuples == 0) worst = r;
        worst.tuples = total;
    }
    worst.passed = worst.worst_ratio <= 1.0 + 1e-12;
    ctx.curve("worst_ratio_by_rho", by_rho);
    ctx.out.write({{"type", "inequality"},
                   {"tuples", worst.tuples},
                   {"worst_ratio", real_to_json(worst.worst_ratio)},
                   {"xi1", real_to_json(worst.worst_xi1)},
                   {"xi2", real_to_json(worst.worst_xi2)},
                   {"sigma", real_to_json(worst.worst_sigma)},
                   {"rho", real_to_json(worst.worst_rho)},
                   {"passed", worst.passed}});
    ctx.summary << "inequality-scan: " << worst.tuples << " tuples, worst ratio " << fmt(worst.worst_ratio)
                << " at xi=(" << fmt(worst.worst_xi1) << ", " << fmt(worst.worst_xi2) << "), sigma="
                << fmt(worst.worst_sigma) << ", rho=" << fmt(worst.worst_rho) << "\n"
                << "bound holds: " << (worst.passed ? "yes" : "no") << "\n";
}

void run_radius(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto r = radius_decay_experiment(ctx.initial, ctx.coeffs, cfg.stepper, cfg.radius.t_final,
                                           cfg.radius.options);
    Curve measured{"t", "radius"}, proxy{"t", "norm_proxy"};
    std::vector<double> times;
    for (const auto& tr : r.per_time_radii) {
        ctx.out.write({{"type", "radius_sample"},
                       {"t", real_to_json(tr.t)},
                       {"sigma", real_to_json(tr.sigma)},
                       {"u", tr.u ? to_json(*tr.u) : Json(nullptr)},
                       {"v", tr.v ? to_json(*tr.v) : Json(nullptr)},
                       {"norm_proxy", real_to_json(tr.sigma_norm_proxy)},
                       {"estimators_disagree", tr.estimators_disagree},
                       {"ok", tr.ok},
                       {"error", tr.error}});
        if (!tr.ok) continue;
        measured.x.push_back(tr.t);
        measured.y.push_back(tr.sigma);
        proxy.x.push_back(tr.t);
        proxy.y.push_back(tr.sigma_norm_proxy);
        times.push_back(tr.t);
    }
    ctx.curve("radius", measured);
    ctx.curve("norm_proxy", proxy);

    // Lower-bound schedule with a fitted (or configured) C_b.
    Json lower = nullptr;
    std::string lower_note;
    std::optional<bool> below;
    const double rho = cfg.analysis.rho;
    if (!(rho > 0.0 && rho < 0.75)) {
        lower_note = "rho outside (0, 3/4); no lower-bound curve";
    } else if (r.per_time_radii.empty() || !r.per_time_radii.front().ok) {
        lower_note = "initial radius unavailable";
    } else {
        double C_b = cfg.analysis.C_b.value_or(0.0);
        std::string source = "configured";
        if (!cfg.analysis.C_b) {
            C_b = fitted_acl(ctx).C_b;
            source = "fitted";
        }
        const double sigma0 = r.per_time_radii.front().sigma;
        const double norm0 = pair_norm(ctx.initial, {sigma0, 0.0});
        if (!(C_b > 0.0) || !(norm0 > 0.0)) {
            lower_note = "C_b or norm0 not positive; no lower-bound curve";
        } else {
            const auto pred = predicted_lower_bound_curve(norm0, sigma0, rho, cfg.life.c0, cfg.life.a, C_b, times);
            below = true;
            for (std::size_t i = 0; i < pred.size(); ++i)
                if (pred[i] > measured.y[i]) below = false;
            ctx.curve("predicted_lower_bound", Curve{"t", "sigma", times, pred});
            lower = {{"C_b", real_to_json(C_b)}, {"C_b_source", source}, {"sigma0", real_to_json(sigma0)},
                     {"norm0", real_to_json(norm0)}, {"rho", real_to_json(rho)},
                     {"values", reals(pred)}, {"below_measured", *below}};
        }
    }

    ctx.out.write({{"type", "radius"},
                   {"c_hat", real_to_json(r.c_hat)},
                   {"exponent_hat", real_to_json(r.exponent_hat)},
                   {"exponent_stderr", real_to_json(r.exponent_stderr)},
                   {"window", {real_to_json(r.window.first), real_to_json(r.window.second)}},
                   {"epsilon_tolerance", real_to_json(r.epsilon_tolerance)},
                   {"consistent", r.consistent},
                   {"admissible", r.admissible},
                   {"fit_ok", r.fit_ok},
                   {"notice", r.notice},
                   {"lower_bound", lower},
                   {"lower_bound_note", lower_note}});

    auto& s = ctx.summary;
    s << "radius: t_final=" << fmt(cfg.radius.t_final) << " samples=" << r.per_time_radii.size() << "\n";
    if (r.fit_ok) {
        s << "fitted decay sigma(t) ~ " << fmt(r.c_hat) << " t^" << fmt(r.exponent_hat) << " (+- "
          << fmt(r.exponent_stderr) << ") over t in [" << fmt(r.window.first) << ", " << fmt(r.window.second) << "]\n";
        s << "decay-law verdict: " << (r.consistent ? "consistent" : "INCONSISTENT")
          << " (exponent >= " << fmt(-4.0 / 3.0 - r.epsilon_tolerance) << " required)"
          << (r.admissible ? "" : " [system not admissible]") << "\n";
    } else {
        s << "decay-law verdict: not available (" << r.notice << ")\n";
    }
    if (below)
        s << "predicted lower bound at or below measured radii: " << (*below ? "yes" : "no") << "\n";
    else
        s << "predicted lower bound: " << lower_note << "\n";
    if (r.status == RunStatus::BlowUp) throw BlowUp(r.notice, 0.0);
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    RunOutcome outcome;
    outcome.run_dir = cfg.output_dir / config_hash(cfg);
    std::filesystem::create_directories(outcome.run_dir);
    {
        std::ofstream rc(outcome.run_dir / "config.resolved", std::ios::trunc);
        rc << resolved_config_text(cfg);
    }

    const auto coeffs = build_coefficients(cfg.system);
    const auto cls = classify(coeffs);
    const auto grid = build_grid(cfg);
    JsonlWriter out(outcome.run_dir / "record.jsonl");
    out.write({{"type", "header"},
               {"version", kVersion},
               {"experiment", std::string(to_string(cfg.experiment))},
               {"config_hash", config_hash(cfg)},
               {"seed", cfg.seed},
               {"config", resolved_config_text(cfg, true)},
               {"classification", classification_json(cls)}});

    Context ctx{cfg, coeffs, grid, build_initial_state(cfg, grid), out, outcome.run_dir, {}};
    ctx.summary << "experiment: " << to_string(cfg.experiment) << "\n"
                << "config hash: " << config_hash(cfg) << "\n"
                << classification_text(coeffs, cls);

    std::string message;
    try {
        const bool dynamic = cfg.experiment != Experiment::Classify && cfg.experiment != Experiment::InequalityScan;
        if (dynamic && cfg.enforce_admissibility && !cls.admissible && !coeffs.is_linear())
            throw Error("system is not admissible and enforce_admissibility is set");
        switch (cfg.experiment) {
            case Experiment::Simulate: run_simulate(ctx); break;
            case Experiment::Classify: run_classify(ctx); break;
            case Experiment::Radius: run_radius(ctx); break;
            case Experiment::AclScan: run_acl(ctx); break;
            case Experiment::CommutatorScan: run_commutator(ctx); break;
            case Experiment::Picard: run_picard(ctx); break;
            case Experiment::InequalityScan: run_inequality(ctx); break;
        }
    } catch (const BlowUp& e) {
        outcome.status = RunStatus::BlowUp;
        message = e.what();
    } catch (const std::exception& e) {
        outcome.status = RunStatus::Failed;
        message = e.what();
    }
    outcome.exit_code = outcome.status == RunStatus::Completed ? 0 : 1;

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.write({{"type", "status"},
               {"status", to_string(outcome.status)},
               {"message", message},
               {"timestamp", {{"started", started}, {"wall_time_s", wall}}}});
    ctx.summary << "status: " << to_string(outcome.status) << (message.empty() ? "" : " (" + message + ")") << "\n";
    outcome.summary = ctx.summary.str();
    std::ofstream(outcome.run_dir / "summary.txt", std::ios::trunc) << outcome.summary;
    return outcome;
}

}  // namespace ckdv
