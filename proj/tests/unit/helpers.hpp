#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ckdv/spectral.hpp"

namespace testing {

using ckdv::cplx;
using ckdv::GridPtr;
using ckdv::SpectralField;

/// Hermitian field with random modes for 1 <= |k| <= band, zero mean unless asked.
inline SpectralField random_band_limited(const GridPtr& g, int band, std::mt19937_64& rng,
                                         double scale = 1.0, bool with_mean = false) {
    std::normal_distribution<double> nd(0.0, 1.0);
    SpectralField f(g);
    for (int k = 1; k <= band; ++k) {
        const cplx c(nd(rng), nd(rng));
        f.set_mode(k, scale * c);
        f.set_mode(-k, scale * std::conj(c));
    }
    if (with_mean) f.set_mode(0, scale * nd(rng));
    return f;
}

/// Exact product spectrum Σ_{p+q=k} â_p b̂_q for |k| <= keep, other modes zero.
/// Inputs must vanish at the Nyquist index.
inline SpectralField dense_product(const SpectralField& a, const SpectralField& b, int keep) {
    const auto& g = a.grid();
    const int half = static_cast<int>(g->size() / 2);
    SpectralField out(g);
    for (int k = -keep; k <= keep; ++k) {
        cplx s = 0.0;
        for (int p = -half + 1; p < half; ++p) {
            const int q = k - p;
            if (q <= -half || q >= half) continue;
            s += a.mode(p) * b.mode(q);
        }
        out.set_mode(k, s);
    }
    return out;
}

/// Spectrum times m(ξ_k), written out mode by mode.
template <class F>
inline SpectralField times(const SpectralField& f, F m) {
    SpectralField out(f.grid());
    const auto& g = f.grid();
    const int half = static_cast<int>(g->size() / 2);
    for (int k = -half + 1; k < half; ++k) out.set_mode(k, m(2.0 * M_PI * k / g->length()) * f.mode(k));
    return out;
}

inline SpectralField d_dx(const SpectralField& f) {
    return times(f, [](double xi) { return cplx(0.0, xi); });
}

inline SpectralField weight(const SpectralField& f, double sigma) {
    return times(f, [sigma](double xi) { return cplx(std::exp(sigma * std::abs(xi)), 0.0); });
}

inline double max_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
    const double scale = std::max(a.max_abs(), b.max_abs());
    return scale == 0.0 ? 0.0 : max_diff(a, b) / scale;
}

/// Physical values by direct summation u(x_j) = Σ_k û_k e^{iξ_k x_j}.
inline std::vector<double> direct_synthesis(const SpectralField& f) {
    const auto& g = f.grid();
    const std::size_t n = g->size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = g->dx() * static_cast<double>(j);
        cplx s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += f[i] * std::exp(cplx(0.0, g->wavenumbers()[i] * x));
        out[j] = s.real();
    }
    return out;
}

}  // namespace testing
