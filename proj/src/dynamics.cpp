#include "ckdv/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ckdv/gevrey.hpp"
#include "ckdv/quadrature.hpp"

namespace ckdv {

namespace {

void require_same_grid(const SpectralState& s) {
    if (!(*s.u_hat.grid() == *s.v_hat.grid())) {
        throw InvalidParameter("dynamics: u and v live on different grids");
    }
}

void check_amplitude(std::span<const double> f, double time) {
    for (double x : f) {
        if (!std::isfinite(x) || std::abs(x) > kBlowUpAmplitude) {
            throw BlowUp("field amplitude exceeded 1e8 or became non-finite at t = " +
                             std::to_string(time),
                         time);
        }
    }
}

void check_finite(const SpectralField& f, double time) {
    for (const auto& z : f.coeffs()) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw BlowUp("non-finite spectrum at t = " + std::to_string(time), time);
        }
    }
}

void zero_nyquist(SpectralField& f) { f[f.grid()->nyquist_index()] = {}; }

/// Largest weighted amplitude in the top eighth of the dealiased band vs overall.
void check_tail(const SpectralField& f, std::span<const cplx> weight, const char* name) {
    const auto& g = *f.grid();
    const int edge = static_cast<int>(7 * g.size() / 24);
    double top = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double a = std::abs(f[j]) * weight[j].real();
        top = std::max(top, a);
        if (std::abs(g.mode(j)) > edge) tail = std::max(tail, a);
    }
    if (top > 0.0 && tail > kTailTolerance * top) {
        throw TailDominance(std::string("commutator_terms: weighted spectrum of ") + name +
                            " does not decay (tail/max = " + std::to_string(tail / top) + ")");
    }
}

struct Physical {
    std::vector<double> u, v, ux, vx;
};

Physical to_physical(const SpectralState& s, std::span<const cplx> weight) {
    const auto& g = *s.grid();
    const std::size_t n = g.size();
    auto& tr = thread_transform(n);
    const auto d = multipliers::derivative().sample(g);
    Physical p{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
               std::vector<double>(n)};
    std::vector<cplx> tmp(n);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = s.u_hat[j] * weight[j];
    tr.inverse(tmp, p.u);
    for (std::size_t j = 0; j < n; ++j) tmp[j] *= d[j];
    tr.inverse(tmp, p.ux);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = s.v_hat[j] * weight[j];
    tr.inverse(tmp, p.v);
    for (std::size_t j = 0; j < n; ++j) tmp[j] *= d[j];
    tr.inverse(tmp, p.vx);
    return p;
}

SpectralField product_spectrum(const GridPtr& g, std::span<const double> values) {
    SpectralField f(g);
    thread_transform(g->size()).forward(values, f.coeffs());
    dealias_in_place(f);
    return f;
}

/// (E · plain_product - weighted_product), times iξ when d is given
SpectralField weighted_difference(const SpectralField& plain_product, const SpectralField& weighted_product,
                                  std::span<const cplx> e, std::span<const cplx> d) {
    SpectralField out(plain_product.grid());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = e[j] * plain_product[j] - weighted_product[j];
        if (!d.empty()) out[j] *= d[j];
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

NonlinearEvaluator::NonlinearEvaluator(GridPtr grid, SystemCoefficients c, bool dealias)
    : grid_(std::move(grid)),
      c_(c),
      dealias_(dealias),
      deriv_(multipliers::derivative().sample(*grid_)),
      tmp_(grid_->size()),
      u_(grid_->size()),
      ux_(grid_->size()),
      v_(grid_->size()),
      vx_(grid_->size()),
      pu_(grid_->size()),
      pv_(grid_->size()) {}

void NonlinearEvaluator::operator()(const SpectralState& s, NonlinearTerms& out) {
    require_same_grid(s);
    const std::size_t n = grid_->size();
    if (out.rhs_u.size() != n) out.rhs_u = SpectralField(grid_);
    if (out.rhs_v.size() != n) out.rhs_v = SpectralField(grid_);
    if (c_.is_linear()) {
        std::fill(out.rhs_u.coeffs().begin(), out.rhs_u.coeffs().end(), cplx{});
        std::fill(out.rhs_v.coeffs().begin(), out.rhs_v.coeffs().end(), cplx{});
        return;
    }
    auto& tr = thread_transform(n);
    tr.inverse(s.u_hat.coeffs(), u_);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = s.u_hat[j] * deriv_[j];
    tr.inverse(tmp_, ux_);
    tr.inverse(s.v_hat.coeffs(), v_);
    for (std::size_t j = 0; j < n; ++j) tmp_[j] = s.v_hat[j] * deriv_[j];
    tr.inverse(tmp_, vx_);
    check_amplitude(u_, s.time);
    check_amplitude(v_, s.time);

    for (std::size_t j = 0; j < n; ++j) {
        pu_[j] = c_.c11() * u_[j] * ux_[j] + c_.c12() * v_[j] * vx_[j];
        pv_[j] = c_.c21() * ux_[j] * v_[j] + c_.c22() * u_[j] * vx_[j];
    }
    tr.forward(pu_, out.rhs_u.coeffs());
    tr.forward(pv_, out.rhs_v.coeffs());
    if (dealias_) {
        dealias_in_place(out.rhs_u);
        dealias_in_place(out.rhs_v);
    }
}

NonlinearTerms nonlinear_rhs(const SpectralState& state, const SystemCoefficients& c,
                             bool dealias) {
    require_same_grid(state);
    NonlinearTerms out{SpectralField(state.grid()), SpectralField(state.grid())};
    NonlinearEvaluator eval(state.grid(), c, dealias);
    eval(state, out);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct CommutatorInputs {
    std::vector<cplx> e;
    std::vector<cplx> d;
    Physical plain;
    Physical weighted;
};

CommutatorInputs prepare_commutator(const SpectralState& s, double sigma, bool check) {
    const auto& g = *s.grid();
    CommutatorInputs in;
    in.e = multipliers::gevrey_weight(sigma).sample(g);
    in.d = multipliers::derivative().sample(g);
    if (check) {
        check_tail(s.u_hat, in.e, "u");
        check_tail(s.v_hat, in.e, "v");
    }
    const std::vector<cplx> one(g.size(), cplx(1.0, 0.0));
    in.plain = to_physical(s, one);
    in.weighted = to_physical(s, in.e);
    return in;
}

SpectralField two_term_f2(const GridPtr& g, const SystemCoefficients& c, const CommutatorInputs& in) {
    const std::size_t n = g->size();
    std::vector<double> a(n), b(n);
    const auto& p = in.plain;
    const auto& w = in.weighted;
    for (std::size_t j = 0; j < n; ++j) {
        a[j] = c.c21() * p.ux[j] * p.v[j] + c.c22() * p.u[j] * p.vx[j];
        b[j] = c.c21() * w.ux[j] * w.v[j] + c.c22() * w.u[j] * w.vx[j];
    }
    return weighted_difference(product_spectrum(g, a), product_spectrum(g, b), in.e, {});
}

}  // namespace

CommutatorTerms commutator_terms(const SpectralState& state, const SystemCoefficients& c,
                                 double sigma, bool check_tail_flag) {
    require_same_grid(state);
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw InvalidParameter("commutator_terms: sigma must be finite and >= 0");
    }
    const GridPtr& g = state.grid();
    CommutatorTerms out{SpectralField(g), SpectralField(g), sigma};
    // e^{0|ξ|} is the identity: both terms vanish exactly.
    if (sigma == 0.0) return out;

    const auto in = prepare_commutator(state, sigma, check_tail_flag);
    const std::size_t n = g->size();
    const auto& p = in.plain;
    const auto& w = in.weighted;
    std::vector<double> a(n), b(n);

    if (c.c11() != 0.0 || c.c12() != 0.0) {
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = 0.5 * (c.c11() * p.u[j] * p.u[j] + c.c12() * p.v[j] * p.v[j]);
            b[j] = 0.5 * (c.c11() * w.u[j] * w.u[j] + c.c12() * w.v[j] * w.v[j]);
        }
        out.f1 = weighted_difference(product_spectrum(g, a), product_spectrum(g, b), in.e, in.d);
    }

    if (c.c21() == 0.0 && c.c22() == 0.0) return out;
    if (is_divergence_form(c)) {
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = c.c21() * p.u[j] * p.v[j];
            b[j] = c.c21() * w.u[j] * w.v[j];
        }
        out.f2 = weighted_difference(product_spectrum(g, a), product_spectrum(g, b), in.e, in.d);
#ifndef NDEBUG
        const SpectralField alt = two_term_f2(g, c, in);
        const double scale = std::max(out.f2.max_abs(), alt.max_abs());
        if ((out.f2 - alt).max_abs() > 1e-10 * scale) {
            throw std::logic_error("commutator_terms: divergence and two-term forms of f2 disagree");
        }
#endif
    } else {
        out.f2 = two_term_f2(g, c, in);
    }
    return out;
}

SpectralField commutator_f2_two_term(const SpectralState& state, const SystemCoefficients& c,
                                     double sigma, bool check_tail_flag) {
    require_same_grid(state);
    if (sigma == 0.0) return SpectralField(state.grid());
    const auto in = prepare_commutator(state, sigma, check_tail_flag);
    return two_term_f2(state.grid(), c, in);
}

NonlinearTerms conjugated_rhs(const SpectralState& weighted, const SystemCoefficients& c,
                              double sigma, bool dealias) {
    NonlinearTerms out = nonlinear_rhs(weighted, c, dealias);
    if (sigma == 0.0) return out;
    const auto inv = multipliers::gevrey_weight(sigma).sample(*weighted.grid());
    SpectralState plain = weighted;
    for (std::size_t j = 0; j < inv.size(); ++j) {
        plain.u_hat[j] /= inv[j];
        plain.v_hat[j] /= inv[j];
    }
    const auto f = commutator_terms(plain, c, sigma, false);
    out.rhs_u += f.f1;
    out.rhs_v += f.f2;
    return out;
}

// ---------------------------------------------------------------------------

Stepper::Linear Stepper::make_linear(const Grid& g, double a, const StepperConfig& cfg) {
    const std::size_t n = g.size();
    const double h = cfg.dt;
    const auto xi = g.wavenumbers();
    Linear l;
    l.e.resize(n);
    l.e2.resize(n);
    const bool etd = cfg.scheme == Scheme::ETDRK4;
    if (etd) {
        l.q.resize(n);
        l.f1.resize(n);
        l.f2.resize(n);
        l.f3.resize(n);
    }
    const int m = cfg.contour_points;
    std::vector<cplx> roots(m);
    for (int r = 0; r < m; ++r) roots[r] = std::polar(1.0, 2.0 * std::numbers::pi * (r + 0.5) / m);

    for (std::size_t j = 0; j < n; ++j) {
        const double omega = (j == g.nyquist_index()) ? 0.0 : a * xi[j] * xi[j] * xi[j];
        l.e[j] = std::polar(1.0, omega * h);
        l.e2[j] = std::polar(1.0, 0.5 * omega * h);
        if (!etd) continue;
        // φ-weights by averaging over a unit circle around λ = h L (Kassam–Trefethen)
        const cplx lam(0.0, omega * h);
        cplx q{}, f1{}, f2{}, f3{};
        for (const auto& r : roots) {
            const cplx z = lam + r;
            const cplx ez = std::exp(z);
            const cplx z3 = z * z * z;
            q += (std::exp(0.5 * z) - 1.0) / z;
            f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
            f2 += (2.0 + z + ez * (z - 2.0)) / z3;
            f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
        }
        const double s = h / m;
        l.q[j] = s * q;
        l.f1[j] = s * f1;
        l.f2[j] = s * f2;
        l.f3[j] = s * f3;
    }
    return l;
}

Stepper::Stepper(GridPtr grid, const SystemCoefficients& c, StepperConfig cfg)
    : Stepper(grid, c.a1(), c.a2(), cfg,
              [ev = std::make_shared<NonlinearEvaluator>(grid, c, cfg.dealias)](
                  const SpectralState& s, NonlinearTerms& out) { (*ev)(s, out); },
              c.is_linear()) {}

Stepper::Stepper(GridPtr grid, double a1, double a2, StepperConfig cfg, NonlinearOperator op,
                 bool op_is_zero)
    : grid_(std::move(grid)), cfg_(cfg), op_(std::move(op)), op_is_zero_(op_is_zero) {
    if (!std::isfinite(cfg_.dt) || cfg_.dt == 0.0) {
        throw InvalidParameter("stepper: dt must be finite and nonzero");
    }
    if (cfg_.contour_points < 1) throw InvalidParameter("stepper: contour_points must be positive");
    lu_ = make_linear(*grid_, a1, cfg_);
    lv_ = (a2 == a1) ? lu_ : make_linear(*grid_, a2, cfg_);
}

void Stepper::eval(const SpectralState& s, NonlinearTerms& out) {
    op_(s, out);
    zero_nyquist(out.rhs_u);
    zero_nyquist(out.rhs_v);
}

void Stepper::step(SpectralState& s) {
    require_same_grid(s);
    zero_nyquist(s.u_hat);
    zero_nyquist(s.v_hat);
    if (op_is_zero_) {
        apply_sampled(s.u_hat, lu_.e);
        apply_sampled(s.v_hat, lv_.e);
    } else if (cfg_.scheme == Scheme::ETDRK4) {
        step_etdrk4(s);
    } else {
        step_ifrk4(s);
    }
    s.time += cfg_.dt;
    check_finite(s.u_hat, s.time);
    check_finite(s.v_hat, s.time);
}

void Stepper::step_etdrk4(SpectralState& s) {
    const std::size_t n = grid_->size();
    const double t = s.time, h = cfg_.dt;
    NonlinearTerms n0{SpectralField(grid_), SpectralField(grid_)};
    NonlinearTerms na = n0, nb = n0, nc = n0;
    eval(s, n0);

    SpectralState a{SpectralField(grid_), SpectralField(grid_), t + 0.5 * h};
    for (std::size_t j = 0; j < n; ++j) {
        a.u_hat[j] = lu_.e2[j] * s.u_hat[j] + lu_.q[j] * n0.rhs_u[j];
        a.v_hat[j] = lv_.e2[j] * s.v_hat[j] + lv_.q[j] * n0.rhs_v[j];
    }
    eval(a, na);

    SpectralState b{SpectralField(grid_), SpectralField(grid_), t + 0.5 * h};
    for (std::size_t j = 0; j < n; ++j) {
        b.u_hat[j] = lu_.e2[j] * s.u_hat[j] + lu_.q[j] * na.rhs_u[j];
        b.v_hat[j] = lv_.e2[j] * s.v_hat[j] + lv_.q[j] * na.rhs_v[j];
    }
    eval(b, nb);

    SpectralState c{SpectralField(grid_), SpectralField(grid_), t + h};
    for (std::size_t j = 0; j < n; ++j) {
        c.u_hat[j] = lu_.e2[j] * a.u_hat[j] + lu_.q[j] * (2.0 * nb.rhs_u[j] - n0.rhs_u[j]);
        c.v_hat[j] = lv_.e2[j] * a.v_hat[j] + lv_.q[j] * (2.0 * nb.rhs_v[j] - n0.rhs_v[j]);
    }
    eval(c, nc);

    for (std::size_t j = 0; j < n; ++j) {
        s.u_hat[j] = lu_.e[j] * s.u_hat[j] + lu_.f1[j] * n0.rhs_u[j] +
                     2.0 * lu_.f2[j] * (na.rhs_u[j] + nb.rhs_u[j]) + lu_.f3[j] * nc.rhs_u[j];
        s.v_hat[j] = lv_.e[j] * s.v_hat[j] + lv_.f1[j] * n0.rhs_v[j] +
                     2.0 * lv_.f2[j] * (na.rhs_v[j] + nb.rhs_v[j]) + lv_.f3[j] * nc.rhs_v[j];
    }
}

void Stepper::step_ifrk4(SpectralState& s) {
    const std::size_t n = grid_->size();
    const double t = s.time, h = cfg_.dt;
    NonlinearTerms k1{SpectralField(grid_), SpectralField(grid_)};
    NonlinearTerms k2 = k1, k3 = k1, k4 = k1;
    eval(s, k1);

    SpectralState w{SpectralField(grid_), SpectralField(grid_), t + 0.5 * h};
    for (std::size_t j = 0; j < n; ++j) {
        w.u_hat[j] = lu_.e2[j] * (s.u_hat[j] + 0.5 * h * k1.rhs_u[j]);
        w.v_hat[j] = lv_.e2[j] * (s.v_hat[j] + 0.5 * h * k1.rhs_v[j]);
    }
    eval(w, k2);
    for (std::size_t j = 0; j < n; ++j) {
        w.u_hat[j] = lu_.e2[j] * s.u_hat[j] + 0.5 * h * k2.rhs_u[j];
        w.v_hat[j] = lv_.e2[j] * s.v_hat[j] + 0.5 * h * k2.rhs_v[j];
    }
    eval(w, k3);
    w.time = t + h;
    for (std::size_t j = 0; j < n; ++j) {
        w.u_hat[j] = lu_.e[j] * s.u_hat[j] + h * lu_.e2[j] * k3.rhs_u[j];
        w.v_hat[j] = lv_.e[j] * s.v_hat[j] + h * lv_.e2[j] * k3.rhs_v[j];
    }
    eval(w, k4);
    for (std::size_t j = 0; j < n; ++j) {
        s.u_hat[j] = lu_.e[j] * s.u_hat[j] +
                     h / 6.0 *
                         (lu_.e[j] * k1.rhs_u[j] + 2.0 * lu_.e2[j] * (k2.rhs_u[j] + k3.rhs_u[j]) +
                          k4.rhs_u[j]);
        s.v_hat[j] = lv_.e[j] * s.v_hat[j] +
                     h / 6.0 *
                         (lv_.e[j] * k1.rhs_v[j] + 2.0 * lv_.e2[j] * (k2.rhs_v[j] + k3.rhs_v[j]) +
                          k4.rhs_v[j]);
    }
}

SpectralState step(const SpectralState& state, const SystemCoefficients& c,
                   const StepperConfig& cfg) {
    Stepper stepper(state.grid(), c, cfg);
    SpectralState out = state;
    stepper.step(out);
    return out;
}

double lifespan(double norm_u, double norm_v, double c0, double a) {
    if (!(c0 > 0.0) || !(a > 0.0) || !(norm_u >= 0.0) || !(norm_v >= 0.0)) {
        throw InvalidParameter("lifespan: c0, a must be positive and norms nonnegative");
    }
    return c0 * std::pow(1.0 + norm_u + norm_v, -a);
}

double default_dt(double delta) { return std::min(1e-3, delta / 100.0); }

// ---------------------------------------------------------------------------

RecordRow make_row(const SpectralState& s, std::size_t step_index, const EvolveOptions& opts) {
    RecordRow r;
    r.t = s.time;
    r.step = step_index;
    r.l2_u = l2_norm(s.u_hat);
    r.l2_v = l2_norm(s.v_hat);
    r.pair_l2 = std::max(r.l2_u, r.l2_v);
    for (double sg : opts.gevrey_sigmas) {
        r.gevrey_u.push_back(gevrey_norm(s.u_hat, {sg, 0.0}));
        r.gevrey_v.push_back(gevrey_norm(s.v_hat, {sg, 0.0}));
    }
    if (opts.estimate_radius) {
        try {
            if (!s.u_hat.is_zero()) r.radius_u = estimate_radius(s.u_hat, opts.noise_floor);
        } catch (const InsufficientDecay&) {
        }
        try {
            if (!s.v_hat.is_zero()) r.radius_v = estimate_radius(s.v_hat, opts.noise_floor);
        } catch (const InsufficientDecay&) {
        }
    }
    if (opts.eta) r.invariant = r.l2_u * r.l2_u + *opts.eta * r.l2_v * r.l2_v;
    r.mean_u = s.u_hat[0].real();
    r.mean_v = s.v_hat[0].real();
    const auto u = inverse_transform(s.u_hat);
    const auto v = inverse_transform(s.v_hat);
    for (double x : u) r.max_abs_u = std::max(r.max_abs_u, std::abs(x));
    for (double x : v) r.max_abs_v = std::max(r.max_abs_v, std::abs(x));
    return r;
}

RunRecord evolve(SpectralState& state, Stepper& stepper, double t_final, const EvolveOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.gevrey_sigmas = opts.gevrey_sigmas;
    rec.eta = opts.eta;
    rec.dt = stepper.config().dt;

    const double t0 = state.time;
    const double span = t_final - t0;
    if (!(span >= 0.0)) throw InvalidParameter("evolve: t_final must not precede the state time");
    const double h = stepper.config().dt;
    const auto steps = static_cast<std::size_t>(std::llround(span / h));
    if (std::abs(static_cast<double>(steps) * h - span) > 1e-9 * std::max(1.0, span)) {
        throw InvalidParameter("evolve: t_final is not a whole number of steps from the state time");
    }

    std::vector<std::size_t> sample_steps;
    for (double ts : opts.sample_times) {
        if (ts < t0 || ts > t_final) continue;
        sample_steps.push_back(static_cast<std::size_t>(std::llround((ts - t0) / h)));
    }
    std::sort(sample_steps.begin(), sample_steps.end());
    auto wanted = [&](std::size_t i) {
        return i == 0 || i == steps || (opts.stride > 0 && i % opts.stride == 0) ||
               std::binary_search(sample_steps.begin(), sample_steps.end(), i);
    };
    auto record = [&](std::size_t i) {
        rec.rows.push_back(make_row(state, i, opts));
        for (const auto& ob : opts.observers) ob(state);
    };

    record(0);
    try {
        for (std::size_t i = 1; i <= steps; ++i) {
            stepper.step(state);
            state.time = (i == steps) ? t_final : t0 + static_cast<double>(i) * h;
            if (wanted(i)) record(i);
        }
    } catch (const BlowUp& e) {
        rec.status = RunStatus::BlowUp;
        rec.message = e.what();
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        throw RunAborted(e, std::move(rec));
    }
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

RunRecord evolve(SpectralState state, const SystemCoefficients& c, const StepperConfig& cfg,
                 double t_final, const EvolveOptions& opts) {
    const double span = t_final - state.time;
    if (!(span >= 0.0)) throw InvalidParameter("evolve: t_final must not precede the state time");
    if (!(cfg.dt > 0.0)) throw InvalidParameter("evolve: dt must be positive");
    StepperConfig eff = cfg;
    if (span > 0.0) {
        const double steps = std::max(1.0, std::ceil(span / cfg.dt - 1e-9));
        eff.dt = span / steps;
    }
    Stepper stepper(state.grid(), c, eff);
    return evolve(state, stepper, t_final, opts);
}

// ---------------------------------------------------------------------------

PicardResult picard_iterate(const SpectralState& initial, const SystemCoefficients& c,
                            double delta, int n_iters, int quadrature_nodes, bool dealias) {
    require_same_grid(initial);
    if (!(delta > 0.0) || !(delta <= 1.0)) {
        throw InvalidParameter("picard_iterate: delta must lie in (0, 1]");
    }
    if (n_iters < 1) throw InvalidParameter("picard_iterate: n_iters must be >= 1");
    if (quadrature_nodes < 8) throw InvalidParameter("picard_iterate: need >= 8 quadrature nodes");

    const GridPtr& g = initial.grid();
    const std::size_t n = g->size();
    const int q = quadrature_nodes;

    const auto [x, w] = gauss_legendre(q);
    std::vector<double> nodes(q);
    for (int i = 0; i < q; ++i) nodes[i] = 0.5 * delta * (x[i] + 1.0);

    PicardResult res;
    res.delta = delta;
    res.times.push_back(0.0);
    res.times.insert(res.times.end(), nodes.begin(), nodes.end());
    res.times.push_back(delta);
    const std::size_t nt = res.times.size();

    // integ[j][i] = ∫_0^{t_j} ℓ_i(t) dt, Lagrange basis on the nodes, by the same GL rule.
    auto lagrange = [&](int i, double t) {
        double p = 1.0;
        for (int m = 0; m < q; ++m) {
            if (m != i) p *= (t - nodes[m]) / (nodes[i] - nodes[m]);
        }
        return p;
    };
    std::vector<std::vector<double>> integ(nt, std::vector<double>(q, 0.0));
    for (std::size_t j = 0; j < nt; ++j) {
        const double tj = res.times[j];
        for (int i = 0; i < q; ++i) {
            double s = 0.0;
            for (int m = 0; m < q; ++m) s += w[m] * lagrange(i, 0.5 * tj * (x[m] + 1.0));
            integ[j][i] = 0.5 * tj * s;
        }
    }

    // Free-flow factors e^{±L t} per equation and time.
    auto phases = [&](double a, double sign) {
        std::vector<std::vector<cplx>> out(nt);
        for (std::size_t j = 0; j < nt; ++j) {
            out[j] = multipliers::dispersion_phase(a, sign * res.times[j]).sample(*g);
        }
        return out;
    };
    const auto fwd_u = phases(c.a1(), 1.0), bwd_u = phases(c.a1(), -1.0);
    const auto fwd_v = phases(c.a2(), 1.0), bwd_v = phases(c.a2(), -1.0);

    SpectralState w0 = initial;
    w0.time = 0.0;
    zero_nyquist(w0.u_hat);
    zero_nyquist(w0.v_hat);

    // Interaction-picture iterates w^(n)(t_j); u^(n)(t_j) = e^{L t_j} w^(n)(t_j).
    std::vector<SpectralState> prev(nt, w0);
    auto physical = [&](const std::vector<SpectralState>& interaction) {
        std::vector<SpectralState> out = interaction;
        for (std::size_t j = 0; j < nt; ++j) {
            apply_sampled(out[j].u_hat, fwd_u[j]);
            apply_sampled(out[j].v_hat, fwd_v[j]);
            out[j].time = res.times[j];
        }
        return out;
    };
    res.iterates.push_back(physical(prev));

    NonlinearEvaluator eval(g, c, dealias);
    const double floor = 1e-13 * (l2_norm(w0.u_hat) + l2_norm(w0.v_hat));
    int rising = 0;

    for (int it = 1; it < n_iters; ++it) {
        // integrand at the nodes (times index 1..q)
        std::vector<NonlinearTerms> gq;
        gq.reserve(q);
        for (int i = 0; i < q; ++i) {
            const std::size_t j = static_cast<std::size_t>(i) + 1;
            SpectralState p = prev[j];
            apply_sampled(p.u_hat, fwd_u[j]);
            apply_sampled(p.v_hat, fwd_v[j]);
            p.time = res.times[j];
            NonlinearTerms nl{SpectralField(g), SpectralField(g)};
            eval(p, nl);
            apply_sampled(nl.rhs_u, bwd_u[j]);
            apply_sampled(nl.rhs_v, bwd_v[j]);
            zero_nyquist(nl.rhs_u);
            zero_nyquist(nl.rhs_v);
            gq.push_back(std::move(nl));
        }

        std::vector<SpectralState> next(nt, w0);
        double d = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            auto& s = next[j];
            s.time = res.times[j];
            for (int i = 0; i < q; ++i) {
                const double wt = integ[j][i];
                if (wt == 0.0) continue;
                for (std::size_t k = 0; k < n; ++k) {
                    s.u_hat[k] += wt * gq[i].rhs_u[k];
                    s.v_hat[k] += wt * gq[i].rhs_v[k];
                }
            }
            d = std::max(d, l2_norm(s.u_hat - prev[j].u_hat) + l2_norm(s.v_hat - prev[j].v_hat));
        }
        if (!res.differences.empty() && d > res.differences.back() && d > floor) {
            ++rising;
        } else {
            rising = 0;
        }
        res.differences.push_back(d);
        res.iterates.push_back(physical(next));
        prev = std::move(next);
        if (rising >= 3) {
            throw ContractionFailure("picard_iterate: successive differences grew three times in a row"
                                     " (delta = " + std::to_string(delta) + ")",
                                     delta);
        }
    }
    return res;
}

DriftReport check_quadratic_invariant(const RunRecord& record, double eta) {
    DriftReport rep;
    if (record.rows.empty()) return rep;
    auto q = [eta](const RecordRow& r) { return r.l2_u * r.l2_u + eta * r.l2_v * r.l2_v; };
    const auto& first = record.rows.front();
    rep.q0 = q(first);
    const double scale = first.l2_u * first.l2_u + std::abs(eta) * first.l2_v * first.l2_v;
    rep.relative = std::abs(rep.q0) > 1e-12 * scale;
    const double denom = rep.relative ? std::abs(rep.q0) : 1.0;
    for (const auto& r : record.rows) {
        const double d = std::abs(q(r) - rep.q0) / denom;
        if (d > rep.max_drift) {
            rep.max_drift = d;
            rep.t_at_max = r.t;
        }
    }
    return rep;
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "completed";
        case RunStatus::BlowUp: return "blow-up";
        case RunStatus::Failed: return "failed";
    }
    return "?";
}

}  // namespace ckdv
