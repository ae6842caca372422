#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ckdv/dynamics.hpp"
#include "ckdv/errors.hpp"
#include "ckdv/gevrey.hpp"
#include "ckdv/profiles.hpp"
#include "helpers.hpp"

using namespace ckdv;
using testing::d_dx;
using testing::dense_product;
using testing::random_band_limited;
using testing::rel_diff;
using testing::weight;

namespace {

constexpr double kPi = std::numbers::pi;

/// c11 u u_x + c12 v v_x and c21 u_x v + c22 u v_x by dense convolution, kept to |k| <= keep.
NonlinearTerms oracle_rhs(const SpectralState& s, const SystemCoefficients& c, int keep) {
    const auto ux = d_dx(s.u_hat), vx = d_dx(s.v_hat);
    auto ru = c.c11() * dense_product(s.u_hat, ux, keep) + c.c12() * dense_product(s.v_hat, vx, keep);
    auto rv = c.c21() * dense_product(ux, s.v_hat, keep) + c.c22() * dense_product(s.u_hat, vx, keep);
    return {ru, rv};
}

/// f1, f2 written exactly as "weight the product minus product of weighted factors".
std::pair<SpectralField, SpectralField> oracle_commutators(const SpectralState& s, const SystemCoefficients& c,
                                                           double sigma, int keep) {
    const auto plain = oracle_rhs(s, c, keep);
    SpectralState w{weight(s.u_hat, sigma), weight(s.v_hat, sigma)};
    const auto weighted = oracle_rhs(w, c, keep);
    return {weight(plain.rhs_u, sigma) - weighted.rhs_u, weight(plain.rhs_v, sigma) - weighted.rhs_v};
}

SpectralState random_state(const GridPtr& g, int band, std::mt19937_64& rng, double scale = 1.0) {
    return {random_band_limited(g, band, rng, scale, true), random_band_limited(g, band, rng, scale, true)};
}

double state_diff(const SpectralState& a, const SpectralState& b) {
    return l2_norm(a.u_hat - b.u_hat) + l2_norm(a.v_hat - b.v_hat);
}

SpectralState sech2_pair(const GridPtr& g, double amp, double v_shift) {
    ProfileParams p;
    p.u_amplitude = amp;
    p.v_amplitude = amp;
    p.v_center = g->length() / 2 + v_shift;
    return initial_profile("sech2", p, g);
}

SpectralState advance(SpectralState s, const SystemCoefficients& c, double dt, double t_final,
                      Scheme scheme = Scheme::ETDRK4) {
    StepperConfig cfg;
    cfg.dt = dt;
    cfg.scheme = scheme;
    Stepper st(s.grid(), c, cfg);
    EvolveOptions o;
    o.stride = 0;
    o.estimate_radius = false;
    evolve(s, st, t_final, o);
    return s;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("nonlinear terms match dense convolution") {
    std::mt19937_64 rng(21);
    auto g = make_grid(64, 2 * kPi);
    std::uniform_real_distribution<double> uc(-2, 2);
    for (int t = 0; t < 20; ++t) {
        const auto s = random_state(g, 21, rng);
        const SystemCoefficients c(1, 2, uc(rng), uc(rng), uc(rng), uc(rng));
        const auto got = nonlinear_rhs(s, c);
        const auto want = oracle_rhs(s, c, 21);
        CHECK(rel_diff(got.rhs_u, want.rhs_u) < 1e-12);
        CHECK(rel_diff(got.rhs_v, want.rhs_v) < 1e-12);
    }
}

TEST_CASE("linear coefficients give zero nonlinearity") {
    std::mt19937_64 rng(1);
    auto g = make_grid(32, 1.0);
    const auto r = nonlinear_rhs(random_state(g, 10, rng), SystemCoefficients(1, 1, 0, 0, 0, 0));
    CHECK(r.rhs_u.is_zero());
    CHECK(r.rhs_v.is_zero());
}

TEST_CASE("commutators match dense convolution for both presets") {
    std::mt19937_64 rng(2024);
    auto g = make_grid(64, 2 * kPi);
    for (const auto& c : {make_majda_biello(1), make_hirota_satsuma(0.1, 1)}) {
        for (int t = 0; t < 20; ++t) {
            const auto s = random_state(g, 10, rng);
            const double sigma = 0.02 + 0.04 * t;
            const auto got = commutator_terms(s, c, sigma);
            const auto [f1, f2] = oracle_commutators(s, c, sigma, 21);
            CHECK(rel_diff(got.f1, f1) < 1e-11);
            CHECK(rel_diff(got.f2, f2) < 1e-11);
            if (is_divergence_form(c)) CHECK(rel_diff(got.f2, commutator_f2_two_term(s, c, sigma)) < 1e-10);
        }
    }
}

TEST_CASE("commutators vanish at sigma zero and for zero data") {
    std::mt19937_64 rng(3);
    auto g = make_grid(64, 2 * kPi);
    const auto s = random_state(g, 10, rng);
    const auto f = commutator_terms(s, make_majda_biello(1), 0.0);
    CHECK(f.f1.is_zero());
    CHECK(f.f2.is_zero());
    SpectralState z{SpectralField(g), SpectralField(g)};
    const auto fz = commutator_terms(z, make_hirota_satsuma(0.1, 1), 0.3);
    CHECK(fz.f1.max_abs() == 0.0);
    CHECK(fz.f2.max_abs() == 0.0);
}

TEST_CASE("commutators of a single-mode state") {
    // u = cos x: f1 = c11 (e^{σ|∂|}(u u_x) - U U_x) = c11 (-e^{2σ} + e^{2σ}) sin(2x)/2 ... = 0 for c11 = 0.
    auto g = make_grid(64, 2 * kPi);
    SpectralField u(g);
    u.set_mode(1, 0.5);
    u.set_mode(-1, 0.5);
    SpectralState s{u, SpectralField(g)};
    CHECK(commutator_terms(s, make_majda_biello(1), 0.2).f1.is_zero());
    // With c11 = 1: u u_x = -sin(2x)/2, e^{σ|∂|} gives e^{2σ}; U U_x = -e^{2σ} sin(2x)/2. Difference zero too.
    CHECK(commutator_terms(s, SystemCoefficients(1, 1, 1, 0, 0, 0), 0.2).f1.max_abs() < 1e-13);
    // cos x + cos 2x: the k = 1 output mode picks up e^{σ} - e^{3σ}.
    u.set_mode(2, 0.5);
    u.set_mode(-2, 0.5);
    SpectralState s2{u, SpectralField(g)};
    const double sigma = 0.1;
    const auto f = commutator_terms(s2, SystemCoefficients(1, 1, 1, 0, 0, 0), sigma).f1;
    // (u u_x)^_1 = i·1·(u²/2)^_1 with (u²)^_1 = 2·(0.5·0.5) = 0.5; weighted version has e^{σ}e^{2σ}.
    const cplx expected = cplx(0, 1) * 0.25 * (std::exp(sigma) - std::exp(3 * sigma));
    CHECK(std::abs(f.mode(1) - expected) < 1e-14);
}

TEST_CASE("commutators refuse states without a decaying weighted tail") {
    std::mt19937_64 rng(4);
    auto g = make_grid(64, 2 * kPi);
    const auto s = random_state(g, 21, rng);
    CHECK_THROWS_AS(commutator_terms(s, make_majda_biello(1), 0.1), TailDominance);
    CHECK_NOTHROW(commutator_terms(s, make_majda_biello(1), 0.1, false));
    CHECK_THROWS_AS(commutator_terms(s, make_majda_biello(1), -0.1), InvalidParameter);
}

TEST_CASE("conjugated nonlinearity equals the weighted nonlinearity") {
    std::mt19937_64 rng(6);
    auto g = make_grid(64, 2 * kPi);
    const auto c = make_hirota_satsuma(0.1, 1);
    for (int t = 0; t < 5; ++t) {
        const auto s = random_state(g, 10, rng);
        const double sigma = 0.1 * (t + 1);
        SpectralState w{weight(s.u_hat, sigma), weight(s.v_hat, sigma)};
        const auto got = conjugated_rhs(w, c, sigma);
        const auto plain = oracle_rhs(s, c, 21);
        CHECK(rel_diff(got.rhs_u, weight(plain.rhs_u, sigma)) < 1e-11);
        CHECK(rel_diff(got.rhs_v, weight(plain.rhs_v, sigma)) < 1e-11);
    }
}

TEST_CASE("linear flow is the exact dispersion phase") {
    std::mt19937_64 rng(8);
    auto g = make_grid(128, 20.0);
    const auto s = random_state(g, 42, rng);
    const SystemCoefficients c(0.7, -1.3, 0, 0, 0, 0);
    const auto out = advance(s, c, 0.01, 1.0);
    CHECK(out.time == 1.0);
    auto u = apply_multiplier(s.u_hat, multipliers::dispersion_phase(0.7, 1.0));
    auto v = apply_multiplier(s.v_hat, multipliers::dispersion_phase(-1.3, 1.0));
    u[g->nyquist_index()] = 0;
    v[g->nyquist_index()] = 0;
    CHECK(testing::max_diff(out.u_hat, u) < 1e-12);
    CHECK(testing::max_diff(out.v_hat, v) < 1e-12);
}

TEST_CASE("time reversal") {
    std::mt19937_64 rng(9);
    auto g = make_grid(128, 16 * kPi);
    const auto lin = random_state(g, 42, rng, 0.05);
    StepperConfig fwd, bwd;
    fwd.dt = 1e-2;
    bwd.dt = -1e-2;
    const SystemCoefficients c0(1, 1, 0, 0, 0, 0);
    SpectralState s = lin;
    Stepper(g, c0, fwd).step(s);
    Stepper(g, c0, bwd).step(s);
    CHECK(state_diff(s, lin) < 1e-10 * (l2_norm(lin.u_hat) + l2_norm(lin.v_hat)));

    const auto nl = sech2_pair(g, 0.5, 3.0);
    s = nl;
    Stepper(g, make_majda_biello(1), fwd).step(s);
    Stepper(g, make_majda_biello(1), bwd).step(s);
    CHECK(state_diff(s, nl) < 1e-8);
}

TEST_CASE("quadratic invariant picks the positive weight for MB") {
    auto g = make_grid(256, 32 * kPi);
    const auto c = make_majda_biello(1);
    const auto s = sech2_pair(g, 0.5, 4.0);
    StepperConfig cfg;
    cfg.dt = 1e-2;
    EvolveOptions o;
    o.stride = 10;
    o.estimate_radius = false;
    const auto eta = invariant_weight(c);
    REQUIRE(eta);
    o.eta = *eta;
    const auto rec = evolve(s, c, cfg, 2.0, o);
    CHECK(check_quadratic_invariant(rec, *eta).max_drift < 1e-9);
    CHECK(check_quadratic_invariant(rec, -*eta).max_drift > 1e-3);
}

TEST_CASE("quadratic invariant for HS uses c12 over three") {
    auto g = make_grid(256, 32 * kPi);
    const auto c = make_hirota_satsuma(0.1, 2.0);
    const auto s = sech2_pair(g, 0.3, 4.0);
    StepperConfig cfg;
    cfg.dt = 2e-3;
    EvolveOptions o;
    o.stride = 50;
    o.estimate_radius = false;
    const auto rec = evolve(s, c, cfg, 1.0, o);
    CHECK(check_quadratic_invariant(rec, 2.0 / 3.0).max_drift < 1e-8);
    CHECK(check_quadratic_invariant(rec, -2.0 / 3.0).max_drift > 1e-4);
}

TEST_CASE("fourth-order convergence of both schemes") {
    auto g = make_grid(256, 32 * kPi);
    const auto c = make_majda_biello(1);
    const auto s = sech2_pair(g, 0.5, 4.0);
    for (Scheme sc : {Scheme::ETDRK4, Scheme::IFRK4}) {
        const double dt = 0.025;
        const auto ref = advance(s, c, dt / 8, 1.0, sc);
        const double e1 = state_diff(advance(s, c, dt, 1.0, sc), ref);
        const double e2 = state_diff(advance(s, c, dt / 2, 1.0, sc), ref);
        const double ratio = e1 / e2;
        CHECK(ratio > 12.0);
        CHECK(ratio < 20.0);
    }
}

TEST_CASE("means: u always, v for divergence form") {
    auto g = make_grid(128, 16 * kPi);
    ProfileParams p;
    p.u_amplitude = 0.4;
    p.v_amplitude = 0.3;
    p.v_center = 8 * kPi + 3;
    const auto s = initial_profile("gaussian", p, g);
    const auto mb = advance(s, make_majda_biello(1), 1e-2, 1.0);
    CHECK(std::abs(mb.u_hat[0] - s.u_hat[0]) < 1e-14);
    CHECK(std::abs(mb.v_hat[0] - s.v_hat[0]) < 1e-14);
    const auto hs = advance(s, make_hirota_satsuma(0.1, 1), 1e-3, 0.2);
    CHECK(std::abs(hs.u_hat[0] - s.u_hat[0]) < 1e-14);
    CHECK(std::abs(hs.v_hat[0] - s.v_hat[0]) > 1e-8);
}

TEST_CASE("evolving the weighted pair solves the conjugated system") {
    auto g = make_grid(256, 32 * kPi);
    const auto c = make_majda_biello(1);
    const auto s = sech2_pair(g, 0.5, 4.0);
    const double sigma = 0.05;
    const auto e = multipliers::gevrey_weight(sigma);
    StepperConfig cfg;
    cfg.dt = 1e-3;
    const auto direct = advance(s, c, cfg.dt, 0.5);
    SpectralState w{apply_multiplier(s.u_hat, e), apply_multiplier(s.v_hat, e)};
    Stepper st(g, c.a1(), c.a2(), cfg,
               [&](const SpectralState& x, NonlinearTerms& out) { out = conjugated_rhs(x, c, sigma); });
    EvolveOptions o;
    o.stride = 0;
    o.estimate_radius = false;
    evolve(w, st, 0.5, o);
    SpectralState want{apply_multiplier(direct.u_hat, e), apply_multiplier(direct.v_hat, e)};
    CHECK(state_diff(w, want) < 1e-6 * (l2_norm(want.u_hat) + l2_norm(want.v_hat)));
}

TEST_CASE("evolve bookkeeping") {
    auto g = make_grid(64, 8 * kPi);
    const auto s = sech2_pair(g, 0.2, 0.0);
    StepperConfig cfg;
    cfg.dt = 0.03;
    EvolveOptions o;
    o.stride = 5;
    o.sample_times = {0.2};
    o.gevrey_sigmas = {0.0, 0.1};
    const auto rec = evolve(s, make_majda_biello(1), cfg, 1.0, o);
    // dt is reduced to 1/34 so the run lands on t = 1.
    CHECK(rec.dt == doctest::Approx(1.0 / 34));
    CHECK(rec.rows.front().t == 0.0);
    CHECK(rec.rows.back().t == 1.0);
    for (std::size_t i = 1; i < rec.rows.size(); ++i) CHECK(rec.rows[i].t > rec.rows[i - 1].t);
    bool has_sample = false;
    for (const auto& r : rec.rows) has_sample |= std::abs(r.t - 7.0 / 34) < 1e-12;
    CHECK(has_sample);
    CHECK(rec.rows.front().gevrey_u.size() == 2);
    CHECK(rec.rows.front().gevrey_u[0] == doctest::Approx(rec.rows.front().l2_u));
    CHECK(rec.status == RunStatus::Completed);
    CHECK_THROWS_AS(evolve(s, make_majda_biello(1), cfg, -1.0, o), InvalidParameter);
}

TEST_CASE("blow-up aborts with the partial record") {
    auto g = make_grid(64, 2 * kPi);
    std::mt19937_64 rng(10);
    const auto s = random_state(g, 21, rng, 5.0);
    StepperConfig cfg;
    cfg.dt = 0.5;
    cfg.scheme = Scheme::IFRK4;
    EvolveOptions o;
    o.estimate_radius = false;
    try {
        evolve(s, SystemCoefficients(1, 1, 50, 50, 50, 50), cfg, 100.0, o);
        FAIL("expected blow-up");
    } catch (const RunAborted& e) {
        CHECK(e.record().status == RunStatus::BlowUp);
        CHECK(!e.record().rows.empty());
        CHECK(e.time() > 0.0);
    }
}

TEST_CASE("lifespan and default step") {
    CHECK(lifespan(0.0, 0.0) == doctest::Approx(0.1));
    CHECK(lifespan(1.0, 0.0) == doctest::Approx(0.1 / 16));
    CHECK(lifespan(0.5, 0.5, 0.2, 2.0) == doctest::Approx(0.05));
    CHECK(default_dt(1.0) == 1e-3);
    CHECK(default_dt(0.01) == doctest::Approx(1e-4));
    CHECK_THROWS_AS(lifespan(-1.0, 0.0), InvalidParameter);
}

TEST_CASE("Picard: zero and linear data") {
    auto g = make_grid(64, 8 * kPi);
    SpectralState z{SpectralField(g), SpectralField(g)};
    const auto rz = picard_iterate(z, make_majda_biello(1), 0.5, 5);
    for (double d : rz.differences) CHECK(d == 0.0);

    std::mt19937_64 rng(12);
    const auto s = random_state(g, 20, rng);
    const auto rl = picard_iterate(s, SystemCoefficients(1, 2, 0, 0, 0, 0), 0.5, 4);
    for (double d : rl.differences) CHECK(d == 0.0);
    const auto& last = rl.iterates.back().back();
    CHECK(testing::max_diff(last.u_hat, apply_multiplier(s.u_hat, multipliers::dispersion_phase(1, 0.5))) < 1e-12);
    CHECK(rl.times.front() == 0.0);
    CHECK(rl.times.back() == 0.5);
    CHECK(rl.iterates.size() == 4);
}

TEST_CASE("Picard: small data contracts and converges to the stepped solution") {
    auto g = make_grid(256, 32 * kPi);
    const auto c = make_majda_biello(1);
    const auto s = sech2_pair(g, 0.2, 4.0);
    const double delta = 0.1;
    const auto r = picard_iterate(s, c, delta, 8);
    for (std::size_t n = 2; n < r.differences.size(); ++n) {
        if (r.differences[n - 1] < 1e-13) break;
        CHECK(r.differences[n] / r.differences[n - 1] < 0.5);
    }
    const auto stepped = advance(s, c, 1e-3, delta);
    CHECK(state_diff(r.iterates.back().back(), stepped) < 1e-9);
}

TEST_CASE("Picard argument checks") {
    auto g = make_grid(64, 8 * kPi);
    SpectralState z{SpectralField(g), SpectralField(g)};
    CHECK_THROWS_AS(picard_iterate(z, make_majda_biello(1), 0.0, 3), InvalidParameter);
    CHECK_THROWS_AS(picard_iterate(z, make_majda_biello(1), 1.5, 3), InvalidParameter);
    CHECK_THROWS_AS(picard_iterate(z, make_majda_biello(1), 0.5, 0), InvalidParameter);
}

TEST_CASE("Picard reports divergence for large data over long windows") {
    auto g = make_grid(128, 16 * kPi);
    const auto s = sech2_pair(g, 20.0, 0.0);
    CHECK_THROWS_AS(picard_iterate(s, make_majda_biello(1), 1.0, 12), ContractionFailure);
}

TEST_CASE("drift report on a synthetic record") {
    RunRecord rec;
    for (int i = 0; i < 4; ++i) {
        RecordRow r;
        r.t = i;
        r.l2_u = 1.0;
        r.l2_v = i == 2 ? 1.1 : 1.0;
        rec.rows.push_back(r);
    }
    const auto d = check_quadratic_invariant(rec, 1.0);
    CHECK(d.q0 == doctest::Approx(2.0));
    CHECK(d.max_drift == doctest::Approx(0.21 / 2.0));
    CHECK(d.t_at_max == 2.0);
    CHECK(d.relative);
    const auto a = check_quadratic_invariant(rec, -1.0);
    CHECK_FALSE(a.relative);
    CHECK(a.max_drift == doctest::Approx(0.21));
}

}
