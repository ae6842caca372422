#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ckdv/errors.hpp"
#include "ckdv/spectral.hpp"
#include "helpers.hpp"

using namespace ckdv;
using testing::random_band_limited;

TEST_SUITE("spectral") {

TEST_CASE("grid layout") {
    auto g = make_grid(16, 2 * std::numbers::pi);
    CHECK(g->size() == 16);
    CHECK(g->dx() == doctest::Approx(2 * std::numbers::pi / 16));
    CHECK(g->mode(0) == 0);
    CHECK(g->mode(8) == 8);
    CHECK(g->mode(9) == -7);
    CHECK(g->index_of(-1) == 15);
    CHECK(g->nyquist_index() == 8);
    CHECK(g->dealias_cutoff() == 5);
    CHECK(g->wavenumbers()[3] == doctest::Approx(3.0));
    CHECK(g->wavenumbers()[15] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(make_grid(12, 1.0), InvalidParameter);
    CHECK_THROWS_AS(make_grid(8, 1.0), InvalidParameter);
    CHECK_THROWS_AS(make_grid(16, 0.0), InvalidParameter);
}

TEST_CASE("forward transform of cos and sin") {
    const double L = 10.0;
    auto g = make_grid(32, L);
    const auto x = g->points();
    std::vector<double> f(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) f[j] = 3.0 + std::cos(2 * std::numbers::pi * 2 * x[j] / L)
                                                   + 0.5 * std::sin(2 * std::numbers::pi * 5 * x[j] / L);
    const auto h = forward_transform(f, g);
    CHECK(std::abs(h.mode(0) - cplx(3.0, 0.0)) < 1e-14);
    CHECK(std::abs(h.mode(2) - cplx(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(h.mode(-2) - cplx(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(h.mode(5) - cplx(0.0, -0.25)) < 1e-14);
    CHECK(std::abs(h.mode(-5) - cplx(0.0, 0.25)) < 1e-14);
}

TEST_CASE("round trip, Parseval and direct synthesis on random fields") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = std::size_t{16} << (trial % 4);
        const double L = 1.0 + trial;
        auto g = make_grid(n, L);
        const auto f = random_band_limited(g, static_cast<int>(n / 2 - 1), rng, 1.0, true);
        const auto u = inverse_transform(f);
        const auto direct = testing::direct_synthesis(f);
        double dm = 0.0, sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            dm = std::max(dm, std::abs(u[j] - direct[j]));
            sq += u[j] * u[j];
        }
        CHECK(dm < 1e-11);
        CHECK(std::sqrt(sq * g->dx()) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
        const auto back = forward_transform(u, g);
        CHECK(testing::max_diff(back, f) < 1e-12);
        CHECK(back.hermitian_defect() < 1e-13);
    }
}

TEST_CASE("inverse rejects non-Hermitian input") {
    auto g = make_grid(16, 1.0);
    SpectralField f(g);
    f.set_mode(1, {1.0, 0.0});
    CHECK_THROWS_AS(inverse_transform(f), SymmetryViolation);
    f.set_mode(-1, {1.0, 0.0});
    CHECK_NOTHROW(inverse_transform(f));
    f.set_mode(0, {0.0, 1.0});
    CHECK_THROWS_AS(inverse_transform(f), SymmetryViolation);
    f.set_mode(0, {0.0, 1e-15});
    CHECK_NOTHROW(inverse_transform(f));
}

TEST_CASE("inverse_unchecked counts imaginary residue") {
    Transform t(16);
    std::vector<cplx> c(16);
    c[1] = 1.0;
    std::vector<double> out(16);
    t.inverse_unchecked(c, out);
    CHECK(t.imag_discards() == 1);
    c[15] = 1.0;
    t.inverse_unchecked(c, out);
    CHECK(t.imag_discards() == 1);
}

TEST_CASE("derivative multiplier differentiates sin") {
    const double L = 2 * std::numbers::pi;
    auto g = make_grid(64, L);
    const auto x = g->points();
    std::vector<double> f(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) f[j] = std::sin(3 * x[j]);
    const auto df = inverse_transform(apply_multiplier(forward_transform(f, g), multipliers::derivative()));
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(df[j] == doctest::Approx(3 * std::cos(3 * x[j])).epsilon(1e-12));
}

TEST_CASE("Nyquist entry is averaged") {
    auto g = make_grid(16, 2 * std::numbers::pi);
    const auto d = multipliers::derivative().sample(*g);
    CHECK(d[8] == cplx(0.0, 0.0));
    const auto w = multipliers::gevrey_weight(0.1).sample(*g);
    CHECK(w[8].real() == doctest::Approx(std::exp(0.8)));
    const auto p = multipliers::dispersion_phase(1.0, 0.3).sample(*g);
    CHECK(std::abs(p[8].imag()) < 1e-15);
    CHECK(p[8].real() == doctest::Approx(std::cos(512 * 0.3)));
}

TEST_CASE("multiplier products and weights") {
    auto g = make_grid(32, 4.0);
    const auto m = multipliers::gevrey_weight(0.2) * multipliers::sobolev_weight(1.5);
    for (std::size_t i = 0; i < 32; ++i) {
        if (i == 16) continue;
        const double xi = g->wavenumbers()[i];
        CHECK(m(xi).real() == doctest::Approx(std::exp(0.2 * std::abs(xi)) * std::pow(1 + std::abs(xi), 1.5)));
    }
    CHECK(m.exp_rate() == doctest::Approx(0.2));
    const auto ph = multipliers::dispersion_phase(-2.0, 0.7);
    CHECK(std::abs(ph(1.3) - std::exp(cplx(0, -2.0 * 1.3 * 1.3 * 1.3 * 0.7))) < 1e-15);
}

TEST_CASE("multiplier application refuses overflow") {
    auto g = make_grid(64, 2 * std::numbers::pi);
    SpectralField f(g);
    f.set_mode(1, 1.0);
    f.set_mode(-1, 1.0);
    CHECK_THROWS_AS(apply_multiplier(f, multipliers::gevrey_weight(30.0)), OverflowGuard);
    CHECK_NOTHROW(apply_multiplier(f, multipliers::gevrey_weight(20.0)));
}

TEST_CASE("dispersion phases compose and invert") {
    std::mt19937_64 rng(5);
    auto g = make_grid(64, 7.0);
    const auto f = random_band_limited(g, 20, rng);
    const auto a = apply_multiplier(apply_multiplier(f, multipliers::dispersion_phase(0.7, 0.4)),
                                    multipliers::dispersion_phase(0.7, 0.6));
    const auto b = apply_multiplier(f, multipliers::dispersion_phase(0.7, 1.0));
    CHECK(testing::max_diff(a, b) < 1e-12);
    const auto back = apply_multiplier(b, multipliers::dispersion_phase(0.7, -1.0));
    CHECK(testing::max_diff(back, f) < 1e-12);
    CHECK(l2_norm(b) == doctest::Approx(l2_norm(f)).epsilon(1e-14));
}

TEST_CASE("dealias zeroes the top third and is idempotent") {
    std::mt19937_64 rng(3);
    auto g = make_grid(64, 1.0);
    const auto f = random_band_limited(g, 31, rng);
    const auto d = dealias(f);
    for (int k = -31; k <= 31; ++k) {
        if (std::abs(k) <= 21) CHECK(d.mode(k) == f.mode(k));
        else CHECK(d.mode(k) == cplx(0.0));
    }
    CHECK(d[32] == cplx(0.0));
    CHECK(testing::max_diff(dealias(d), d) == 0.0);
}

TEST_CASE("pseudospectral products of dealiased fields are exact convolutions") {
    std::mt19937_64 rng(19);
    auto g = make_grid(64, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_band_limited(g, 21, rng, 1.0, true);
        const auto b = random_band_limited(g, 21, rng, 1.0, true);
        const auto ua = inverse_transform(a), ub = inverse_transform(b);
        std::vector<double> p(ua.size());
        for (std::size_t j = 0; j < p.size(); ++j) p[j] = ua[j] * ub[j];
        const auto ps = dealias(forward_transform(p, g));
        CHECK(testing::rel_diff(ps, testing::dense_product(a, b, 21)) < 1e-13);
    }
}

TEST_CASE("field arithmetic requires matching grids") {
    auto g1 = make_grid(16, 1.0);
    auto g2 = make_grid(32, 1.0);
    SpectralField a(g1), b(g2);
    CHECK_THROWS_AS(a += b, InvalidParameter);
    CHECK_THROWS_AS(SpectralState(a, b), InvalidParameter);
    CHECK_THROWS_AS(SpectralField(g1, std::vector<cplx>(3)), InvalidParameter);
}

}
