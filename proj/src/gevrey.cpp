#include "ckdv/gevrey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ckdv/errors.hpp"
#include "ckdv/fit.hpp"

namespace ckdv {

namespace {

constexpr double kLogSpaceAbove = 300.0;

void check_params(const GevreyParams& p) {
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma) || !std::isfinite(p.s)) {
        throw InvalidParameter("gevrey: sigma must be finite and >= 0, s finite");
    }
}

}  // namespace

double log_gevrey_norm(const SpectralField& field, GevreyParams p) {
    check_params(p);
    const auto xi = field.grid()->wavenumbers();
    const auto c = field.coeffs();
    std::vector<double> logs;
    logs.reserve(c.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double a = std::abs(c[j]);
        if (a == 0.0) continue;
        const double k = std::abs(xi[j]);
        const double l = 2.0 * p.sigma * k + 2.0 * p.s * std::log1p(k) + 2.0 * std::log(a);
        logs.push_back(l);
        top = std::max(top, l);
    }
    if (logs.empty()) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (double l : logs) acc += std::exp(l - top);
    return 0.5 * (std::log(field.grid()->length()) + top + std::log(acc));
}

double gevrey_norm(const SpectralField& field, GevreyParams p) {
    check_params(p);
    const auto& g = *field.grid();
    if (p.sigma * g.max_abs_wavenumber() > kLogSpaceAbove) {
        const double l = log_gevrey_norm(field, p);
        if (l >= std::log(std::numeric_limits<double>::max())) {
            throw OverflowGuard("gevrey_norm: value exceeds double range (log " +
                                std::to_string(l) + ")");
        }
        return std::exp(l);
    }
    const auto xi = g.wavenumbers();
    const auto c = field.coeffs();
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] == cplx{}) continue;
        const double k = std::abs(xi[j]);
        const double w = std::exp(p.sigma * k) * (p.s == 0.0 ? 1.0 : std::pow(1.0 + k, p.s));
        s += w * w * std::norm(c[j]);
    }
    const double out = std::sqrt(g.length() * s);
    if (!std::isfinite(out)) throw OverflowGuard("gevrey_norm: non-finite result");
    return out;
}

double pair_norm(const SpectralState& state, GevreyParams p) {
    return std::max(gevrey_norm(state.u_hat, p), gevrey_norm(state.v_hat, p));
}

RadiusEstimate estimate_radius(const SpectralField& field, double noise_floor, int k_min) {
    const auto& g = *field.grid();
    const int n = static_cast<int>(g.size());
    const int half = n / 2;
    if (k_min < 0) k_min = n / 16;

    // Symmetrised amplitude per |k|, Nyquist excluded.
    std::vector<double> amp(half, 0.0);
    amp[0] = std::abs(field.mode(0));
    for (int k = 1; k < half; ++k) {
        amp[k] = std::sqrt(0.5 * (std::norm(field.mode(k)) + std::norm(field.mode(-k))));
    }
    const double top = *std::max_element(amp.begin(), amp.end());
    const double cut = noise_floor * top;

    // Longest run of above-floor modes; zeros are skipped, sub-floor values end a run.
    int best_lo = -1, best_hi = -1, best_count = 0;
    bool best_floor = false;
    int lo = -1, hi = -1, count = 0;
    auto close_run = [&](bool by_floor) {
        if (count > best_count) {
            best_count = count;
            best_lo = lo;
            best_hi = hi;
            best_floor = by_floor;
        }
        lo = hi = -1;
        count = 0;
    };
    for (int k = std::max(k_min, 0); k < half; ++k) {
        const double a = amp[k];
        if (a == 0.0) continue;
        if (a > cut) {
            if (count == 0) lo = k;
            hi = k;
            ++count;
        } else if (count > 0) {
            close_run(true);
        }
    }
    if (count > 0) close_run(false);

    if (best_count < 8) {
        throw InsufficientDecay("estimate_radius: only " + std::to_string(best_count) +
                                " usable modes above the noise floor");
    }

    std::vector<double> x, y;
    x.reserve(best_count);
    y.reserve(best_count);
    const auto xi = g.wavenumbers();
    for (int k = best_lo; k <= best_hi; ++k) {
        if (amp[k] == 0.0) continue;
        x.push_back(std::abs(xi[static_cast<std::size_t>(k)]));
        y.push_back(std::log(amp[k]));
    }
    const LinearFit f = fit_line(x, y);

    RadiusEstimate r;
    r.sigma_hat = std::max(0.0, -f.slope);
    r.k_lo = best_lo;
    r.k_hi = best_hi;
    r.slope_stderr = f.slope_stderr;
    r.residual = f.residual;
    r.floor_hit = best_floor;
    r.modes_used = best_count;
    return r;
}

double sup_finite_sigma(const SpectralField& field, double threshold, double sigma_cap,
                        double tol) {
    if (!(sigma_cap > 0.0) || !(tol > 0.0)) {
        throw InvalidParameter("sup_finite_sigma: cap and tolerance must be positive");
    }
    const double base = gevrey_norm(field, {0.0, 0.0});
    if (!(threshold > base)) {
        throw InvalidParameter("sup_finite_sigma: threshold must exceed the sigma = 0 norm");
    }
    const double log_t = std::log(threshold);
    auto fits = [&](double s) { return log_gevrey_norm(field, {s, 0.0}) <= log_t; };
    if (fits(sigma_cap)) return sigma_cap;
    // norm is nondecreasing in sigma
    double lo = 0.0, hi = sigma_cap;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (fits(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace ckdv
