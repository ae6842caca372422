#include "ckdv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "ckdv/fit.hpp"
#include "ckdv/parallel.hpp"

namespace ckdv {

void validate(const AnalysisParams& p) {
    if (!(p.rho >= 0.0 && p.rho <= 1.0)) throw InvalidParameter("rho must lie in [0, 1]");
    if (!(p.b > 0.5 && p.b < 1.0)) throw InvalidParameter("b must lie in (1/2, 1)");
    if (!(p.b_prime >= p.b && p.b_prime < 1.0)) throw InvalidParameter("b' must lie in [b, 1)");
    if (!(p.epsilon > 0.0)) throw InvalidParameter("epsilon must be positive");
    if (p.C_b && !(*p.C_b > 0.0)) throw InvalidParameter("C_b must be positive");
}

// --- weight inequality ------------------------------------------------------

double inequality_ratio(double xi1, double xi2, double sigma, double rho) {
    const double gap = std::abs(xi1) + std::abs(xi2) - std::abs(xi1 + xi2);
    if (gap <= 0.0) return 0.0;
    const double lhs = -std::expm1(-sigma * gap);
    if (rho == 0.0) return lhs;
    const double japanese = (1.0 + std::abs(xi1)) * (1.0 + std::abs(xi2)) / (1.0 + std::abs(xi1 + xi2));
    return lhs / std::pow(4.0 * sigma * japanese, rho);
}

std::vector<double> default_xi_grid() {
    std::vector<double> xi;
    for (int i = -100; i <= 100; ++i) xi.push_back(0.5 * i);
    return xi;
}

std::vector<double> default_scan_sigmas() {
    std::vector<double> s;
    for (int i = 0; i < 10; ++i) s.push_back(std::pow(10.0, -2.0 + 2.0 * i / 9.0));
    return s;
}

std::vector<double> default_scan_rhos() { return {0.0, 0.25, 0.5, 0.75, 1.0}; }

InequalityScanReport commutator_inequality_scan(std::span<const double> xi,
                                                std::span<const double> sigmas,
                                                std::span<const double> rhos, int threads) {
    for (double s : sigmas)
        if (!(s > 0.0) || !std::isfinite(s)) throw InvalidParameter("scan sigmas must be positive");
    for (double r : rhos)
        if (!(r >= 0.0 && r <= 1.0)) throw InvalidParameter("scan rhos must lie in [0, 1]");
    for (double x : xi)
        if (!std::isfinite(x)) throw InvalidParameter("xi grid must be finite");

    // One cell per (sigma, rho).
    const std::size_t cells = sigmas.size() * rhos.size();
    std::vector<InequalityScanReport> partial(cells);
    parallel_for(cells, threads, [&](std::size_t idx) {
        const double sigma = sigmas[idx / rhos.size()];
        const double rho = rhos[idx % rhos.size()];
        InequalityScanReport& r = partial[idx];
        r.worst_sigma = sigma;
        r.worst_rho = rho;
        for (double x1 : xi) {
            for (double x2 : xi) {
                const double q = inequality_ratio(x1, x2, sigma, rho);
                if (q > r.worst_ratio) {
                    r.worst_ratio = q;
                    r.worst_xi1 = x1;
                    r.worst_xi2 = x2;
                }
            }
        }
        r.tuples = xi.size() * xi.size();
    });

    InequalityScanReport out;
    bool first = true;
    for (const auto& r : partial) {
        out.tuples += r.tuples;
        if (first || r.worst_ratio > out.worst_ratio) {
            const std::size_t t = out.tuples;
            out = r;
            out.tuples = t;
            first = false;
        }
    }
    out.passed = out.worst_ratio <= 1.0 + 1e-12;
    return out;
}

// --- commutator σ-scaling ---------------------------------------------------

std::array<ScalingFit, 2> commutator_scaling_fit(const SpectralState& state,
                                                 const SystemCoefficients& c,
                                                 std::span<const double> sigmas, int threads) {
    if (sigmas.size() < 2) throw InvalidParameter("scaling fit needs at least two sigmas");
    for (double s : sigmas)
        if (!(s > 0.0)) throw InvalidParameter("scaling fit sigmas must be positive");

    std::vector<std::array<double, 2>> norms(sigmas.size());
    std::vector<std::string> errors(sigmas.size());
    parallel_for(sigmas.size(), threads, [&](std::size_t i) {
        try {
            const auto f = commutator_terms(state, c, sigmas[i]);
            norms[i] = {l2_norm(f.f1), l2_norm(f.f2)};
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw TailDominance("commutator_scaling_fit: " + e);

    std::array<ScalingFit, 2> out;
    for (int term = 0; term < 2; ++term) {
        ScalingFit& f = out[term];
        f.term = term + 1;
        f.sigmas.assign(sigmas.begin(), sigmas.end());
        std::vector<double> x, y;
        for (std::size_t i = 0; i < sigmas.size(); ++i) {
            f.norms.push_back(norms[i][term]);
            if (norms[i][term] > 0.0) {
                x.push_back(std::log(sigmas[i]));
                y.push_back(std::log(norms[i][term]));
            }
        }
        const double biggest = *std::max_element(f.norms.begin(), f.norms.end());
        const double scale = std::max(l2_norm(state.u_hat), l2_norm(state.v_hat));
        // Round-off level output of a term whose coefficients vanish counts as zero.
        if (biggest == 0.0 || biggest <= 1e-14 * scale * scale || x.size() < 2) {
            f.skipped = true;
            f.notice = "f" + std::to_string(f.term) + " vanishes identically; skipped";
            continue;
        }
        const LinearFit lf = fit_line(x, y);
        f.exponent = lf.slope;
        f.exponent_stderr = lf.slope_stderr;
    }
    return out;
}

// --- almost-conservation defect --------------------------------------------

AclScanResult acl_defect_scan(const SpectralState& initial, const SystemCoefficients& c,
                              std::span<const double> sigmas, double rho, StepperConfig cfg,
                              LifespanParams life) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidParameter("rho must lie in [0, 1]");
    for (double s : sigmas)
        if (!(s >= 0.0)) throw InvalidParameter("acl sigmas must be nonnegative");

    AclScanResult out;
    out.rho = rho;
    out.sigmas.assign(sigmas.begin(), sigmas.end());
    out.eta = invariant_weight(c);
    out.delta = lifespan(l2_norm(initial.u_hat), l2_norm(initial.v_hat), life.c0, life.a);
    cfg.dt = std::min(cfg.dt, out.delta / 10.0);

    EvolveOptions opts;
    opts.gevrey_sigmas = out.sigmas;
    opts.estimate_radius = false;
    RunRecord rec;
    try {
        rec = evolve(initial, c, cfg, initial.time + out.delta, opts);
    } catch (const RunAborted& e) {
        out.status = RunStatus::BlowUp;
        out.message = e.what();
        throw;
    }

    const auto& rows = rec.rows;
    const std::size_t m = out.sigmas.size();
    out.defects.assign(m, 0.0);
    out.pair_defects.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        auto weighted = [&](const RecordRow& r) {
            const double gu = r.gevrey_u[j], gv = r.gevrey_v[j];
            return gu * gu + out.eta.value_or(0.0) * gv * gv;
        };
        auto pair_sq = [&](const RecordRow& r) {
            const double p = std::max(r.gevrey_u[j], r.gevrey_v[j]);
            return p * p;
        };
        double sup_w = -std::numeric_limits<double>::infinity();
        double sup_p = sup_w;
        for (const auto& r : rows) {
            sup_w = std::max(sup_w, weighted(r));
            sup_p = std::max(sup_p, pair_sq(r));
        }
        out.pair_defects[j] = sup_p - pair_sq(rows.front());
        out.defects[j] = out.eta ? sup_w - weighted(rows.front()) : out.pair_defects[j];
    }

    std::vector<double> x, y;
    for (std::size_t j = 0; j < m; ++j) {
        const double s = out.sigmas[j];
        const double d = out.defects[j];
        if (d < -1e-8) out.flagged = true;
        if (s <= 0.0) continue;
        if (d <= 0.0) {
            ++out.clipped;
            continue;
        }
        x.push_back(std::log(s));
        y.push_back(std::log(d));
        const double p0 = std::max(rows.front().gevrey_u[j], rows.front().gevrey_v[j]);
        if (p0 > 0.0) out.C_b = std::max(out.C_b, d / (std::pow(s, rho) * p0 * p0 * p0));
    }
    if (x.size() >= 2) {
        const LinearFit lf = fit_line(x, y);
        out.exponent = lf.slope;
        out.exponent_stderr = lf.slope_stderr;
        out.fit_ok = true;
    } else {
        out.message = "fewer than two positive defects; exponent not fitted";
    }
    return out;
}

// --- radius decay -----------------------------------------------------------

TimedRadius measure_radius(const SpectralState& state, const RadiusDecayOptions& opts) {
    TimedRadius tr;
    tr.t = state.time;
    tr.sigma = std::numeric_limits<double>::infinity();
    tr.sigma_norm_proxy = std::numeric_limits<double>::infinity();
    bool any = false;
    auto one = [&](const SpectralField& f, std::optional<RadiusEstimate>& slot) {
        if (f.is_zero()) return;
        try {
            slot = estimate_radius(f, opts.noise_floor);
        } catch (const InsufficientDecay& e) {
            tr.error = e.what();
            return;
        }
        any = true;
        tr.sigma = std::min(tr.sigma, slot->sigma_hat);
        const double base = gevrey_norm(f, {0.0, 0.0});
        tr.sigma_norm_proxy =
            std::min(tr.sigma_norm_proxy, sup_finite_sigma(f, opts.proxy_growth * base));
    };
    one(state.u_hat, tr.u);
    one(state.v_hat, tr.v);
    if (!any) {
        tr.ok = false;
        tr.sigma = std::numeric_limits<double>::quiet_NaN();
        tr.sigma_norm_proxy = std::numeric_limits<double>::quiet_NaN();
        if (tr.error.empty()) tr.error = "zero state";
        return tr;
    }
    tr.estimators_disagree = std::abs(tr.sigma_norm_proxy - tr.sigma) > 0.5 * tr.sigma;
    return tr;
}

DecayFitResult radius_decay_experiment(const SpectralState& initial, const SystemCoefficients& c,
                                       const StepperConfig& cfg, double t_final,
                                       const RadiusDecayOptions& opts) {
    if (!(t_final > initial.time)) throw InvalidParameter("t_final must exceed the initial time");
    if (opts.samples < 8) throw InvalidParameter("radius decay needs at least 8 samples");
    if (!(opts.span >= 16.0)) throw InvalidParameter("sample span must be at least 16");

    DecayFitResult out;
    out.epsilon_tolerance = opts.epsilon_tolerance;
    out.admissible = classify(c).admissible;

    const TimedRadius start = measure_radius(initial, opts);
    if (!start.ok) throw InsufficientDecay("initial data: " + start.error);

    const double t0 = initial.time;
    const double duration = t_final - t0;
    std::vector<double> times;
    const double first = duration / opts.span;
    for (std::size_t i = 0; i < opts.samples; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(opts.samples - 1);
        times.push_back(t0 + first * std::pow(opts.span, frac));
    }

    EvolveOptions eo;
    eo.stride = 0;
    eo.sample_times = times;
    eo.estimate_radius = false;
    out.per_time_radii.push_back(start);
    eo.observers.push_back([&](const SpectralState& s) {
        if (s.time == t0) return;
        out.per_time_radii.push_back(measure_radius(s, opts));
    });
    try {
        evolve(initial, c, cfg, t_final, eo);
    } catch (const RunAborted& e) {
        out.status = RunStatus::BlowUp;
        out.notice = e.what();
        return out;
    }

    // Power-law fit over the later half of the positive-time samples.
    std::vector<double> x, y;
    std::vector<const TimedRadius*> tail;
    for (const auto& r : out.per_time_radii)
        if (r.t > t0) tail.push_back(&r);
    tail.erase(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2));
    for (const TimedRadius* r : tail) {
        if (!r->ok || !(r->sigma > 0.0)) continue;
        x.push_back(std::log(r->t - t0));
        y.push_back(std::log(r->sigma));
    }
    if (!tail.empty()) out.window = {tail.front()->t, tail.back()->t};
    const double spread = x.empty() ? 0.0 : std::exp(x.back() - x.front());
    if (x.size() < 8 || spread < 4.0) {
        out.notice = "fewer than 8 usable samples spanning a factor of 4; no fit";
        return out;
    }
    const LinearFit lf = fit_line(x, y);
    out.exponent_hat = lf.slope;
    out.exponent_stderr = lf.slope_stderr;
    out.c_hat = std::exp(lf.intercept);
    out.fit_ok = true;
    out.consistent = out.exponent_hat >= -4.0 / 3.0 - out.epsilon_tolerance;
    if (!out.admissible) out.notice = "coefficients outside the admissible regimes";
    return out;
}

std::vector<double> predicted_lower_bound_curve_from_delta(double delta, double norm0,
                                                           double sigma0, double rho, double C_b,
                                                           std::span<const double> times) {
    if (!(rho > 0.0 && rho < 0.75)) throw InvalidParameter("rho must lie in (0, 3/4)");
    if (!(norm0 > 0.0)) throw InvalidParameter("norm0 must be positive");
    if (!(C_b > 0.0)) throw InvalidParameter("C_b must be positive");
    if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
    const double base = std::pow(delta / (C_b * std::pow(2.0, 2.5) * norm0), 1.0 / rho);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!(t > 0.0)) {
            out.push_back(sigma0);
            continue;
        }
        out.push_back(std::min(sigma0, base * std::pow(t, -1.0 / rho)));
    }
    return out;
}

std::vector<double> predicted_lower_bound_curve(double norm0, double sigma0, double rho, double c0,
                                                double a, double C_b,
                                                std::span<const double> times) {
    const double delta = c0 * std::pow(1.0 + 2.0 * norm0, -a);
    return predicted_lower_bound_curve_from_delta(delta, norm0, sigma0, rho, C_b, times);
}

// --- Picard contraction -----------------------------------------------------

PicardStudy picard_contraction_study(const SpectralState& initial, const SystemCoefficients& c,
                                     std::span<const double> deltas, const PicardOptions& opts,
                                     int threads) {
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw InvalidParameter("picard deltas must be positive");
        if (i > 0 && !(deltas[i] > deltas[i - 1]))
            throw InvalidParameter("picard deltas must be ascending");
    }
    const double scale = l2_norm(initial.u_hat) + l2_norm(initial.v_hat);
    const double floor = opts.floor * scale;

    PicardStudy study;
    study.cells.resize(deltas.size());
    parallel_for(deltas.size(), threads, [&](std::size_t i) {
        PicardCell& cell = study.cells[i];
        cell.delta = deltas[i];
        try {
            const auto res = picard_iterate(initial, c, deltas[i], opts.iterations,
                                            opts.quadrature_nodes, opts.dealias);
            cell.differences = res.differences;
        } catch (const ContractionFailure& e) {
            cell.failed = true;
            cell.message = e.what();
        } catch (const Error& e) {
            cell.failed = true;
            cell.message = e.what();
        }
        const auto& d = cell.differences;
        for (std::size_t k = 1; k < d.size(); ++k) {
            if (d[k - 1] <= floor || d[k - 1] == 0.0) {
                cell.ratios.push_back(std::nullopt);
                continue;
            }
            cell.ratios.push_back(d[k] / d[k - 1]);
            if (k >= 2) cell.max_ratio = std::max(cell.max_ratio, d[k] / d[k - 1]);
        }
    });

    double prev = -1.0;
    for (const auto& cell : study.cells) {
        const double r = cell.failed ? std::numeric_limits<double>::infinity() : cell.max_ratio;
        if (!study.delta_star && r > 1.0) study.delta_star = cell.delta;
        if (r < prev) study.monotone = false;
        prev = r;
    }
    return study;
}

}  // namespace ckdv
