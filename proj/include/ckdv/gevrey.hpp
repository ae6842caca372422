#pragma once

#include "ckdv/spectral.hpp"

namespace ckdv {

/// Weight e^{σ|ξ|}(1+|ξ|)^s: σ is the strip half-width, s the Sobolev index.
struct GevreyParams {
    double sigma = 0.0;
    double s = 0.0;
};

/// sqrt(L Σ_k e^{2σ|ξ_k|} (1+|ξ_k|)^{2s} |û_k|²). Switches to log-space
/// summation when σ max|ξ| > 300; throws OverflowGuard if the result itself
/// is not representable.
double gevrey_norm(const SpectralField& field, GevreyParams params);

/// Natural log of gevrey_norm, -inf for the zero field. Never overflows.
double log_gevrey_norm(const SpectralField& field, GevreyParams params);

/// max of the two component norms.
double pair_norm(const SpectralState& state, GevreyParams params);

struct RadiusEstimate {
    double sigma_hat = 0.0;
    int k_lo = 0;
    int k_hi = 0;
    double slope_stderr = 0.0;
    double residual = 0.0;
    bool floor_hit = false;
    int modes_used = 0;
};

inline constexpr double kDefaultNoiseFloor = 1e-13;

/// Radius of analyticity from the exponential decay rate of |û_k|: a line
/// fit of ln|û_k| against |ξ_k| over the longest contiguous band with
/// |û_k| > noise_floor max|û| and k >= k_min (default n/16). The Nyquist
/// mode is never used. Exactly-zero amplitudes are skipped without breaking
/// the band.
RadiusEstimate estimate_radius(const SpectralField& field, double noise_floor = kDefaultNoiseFloor,
                               int k_min = -1);

inline constexpr double kDefaultSigmaCap = 5.0;

/// Largest σ in [0, sigma_cap] with gevrey_norm(field, {σ, 0}) <= threshold,
/// by bisection to `tol`. Requires threshold > gevrey_norm(field, {0, 0}).
double sup_finite_sigma(const SpectralField& field, double threshold,
                        double sigma_cap = kDefaultSigmaCap, double tol = 1e-4);

}  // namespace ckdv
