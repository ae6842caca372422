#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ckdv/coeffs.hpp"
#include "ckdv/dynamics.hpp"
#include "ckdv/gevrey.hpp"

namespace ckdv {

/// Exponents the measurements are read against. b and b' are carried as
/// metadata only; no space-time norm is computed from them.
struct AnalysisParams {
    double rho = 0.7;
    double b = 0.75;
    double b_prime = 0.8;
    double epsilon = 0.2;
    std::optional<double> C_b;
};

/// Validates ranges: rho in [0, 1], b in (1/2, 1), b' in [b, 1), epsilon > 0.
void validate(const AnalysisParams& p);

struct LifespanParams {
    double c0 = 0.1;
    double a = 4.0;
};

// --- weight inequality ------------------------------------------------------

/// (e^{σ|ξ1|}e^{σ|ξ2|} - e^{σ|ξ1+ξ2|}) / (4^ρ σ^ρ (⟨ξ1⟩⟨ξ2⟩/⟨ξ1+ξ2⟩)^ρ e^{σ|ξ1|}e^{σ|ξ2|}),
/// evaluated without forming the exponentials.
double inequality_ratio(double xi1, double xi2, double sigma, double rho);

struct InequalityScanReport {
    double worst_ratio = 0.0;
    double worst_xi1 = 0.0, worst_xi2 = 0.0, worst_sigma = 0.0, worst_rho = 0.0;
    std::size_t tuples = 0;
    bool passed = true;  // worst_ratio <= 1 + 1e-12
};

std::vector<double> default_xi_grid();      // -50 .. 50 step 0.5
std::vector<double> default_scan_sigmas();  // 10 log-spaced values in [1e-2, 1]
std::vector<double> default_scan_rhos();    // 0, 1/4, 1/2, 3/4, 1

InequalityScanReport commutator_inequality_scan(std::span<const double> xi,
                                                std::span<const double> sigmas,
                                                std::span<const double> rhos, int threads = 1);

// --- commutator σ-scaling ---------------------------------------------------

struct ScalingFit {
    int term = 1;
    bool skipped = false;
    std::string notice;
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    std::vector<double> sigmas;
    std::vector<double> norms;  // ‖f_term‖_{L²} per sigma
};

/// Slope of ln‖f_i‖ against ln σ for i = 1, 2.
std::array<ScalingFit, 2> commutator_scaling_fit(const SpectralState& state,
                                                 const SystemCoefficients& c,
                                                 std::span<const double> sigmas, int threads = 1);

// --- almost-conservation defect --------------------------------------------

struct AclScanResult {
    double delta = 0.0;
    double rho = 0.0;
    std::vector<double> sigmas;
    /// Weight of the quadratic form the defect is read from; nullopt when the
    /// coefficients admit no invariant, in which case the pair norm is used.
    std::optional<double> eta;
    /// D(σ) = sup_t Q_σ(t) - Q_σ(0) with Q_σ = ‖u‖²_σ + η‖v‖²_σ.
    std::vector<double> defects;
    /// Same with Q_σ the squared pair (max) norm.
    std::vector<double> pair_defects;
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    bool fit_ok = false;
    std::size_t clipped = 0;
    /// max_σ D(σ) / (σ^ρ ‖(u,v)(0)‖³_σ) over σ > 0.
    double C_b = 0.0;
    /// Some D(σ) < -1e-8.
    bool flagged = false;
    RunStatus status = RunStatus::Completed;
    std::string message;
};

/// Evolves once over [0, δ], δ from the lifespan surrogate applied to the L²
/// norms of the data, and reads D(σ) for every σ from the same trajectory.
AclScanResult acl_defect_scan(const SpectralState& initial, const SystemCoefficients& c,
                              std::span<const double> sigmas, double rho, StepperConfig cfg,
                              LifespanParams life = {});

// --- radius decay -----------------------------------------------------------

struct TimedRadius {
    double t = 0.0;
    /// Smaller of the component radii (components that are identically zero are ignored).
    double sigma = 0.0;
    std::optional<RadiusEstimate> u;
    std::optional<RadiusEstimate> v;
    /// Fit-free companion from sup_finite_sigma.
    double sigma_norm_proxy = 0.0;
    /// Proxy and fitted radius differ by more than half the fitted radius.
    bool estimators_disagree = false;
    /// false when the fit failed for every nonzero component; `error` says why.
    bool ok = true;
    std::string error;
};

struct DecayFitResult {
    double c_hat = 0.0;
    double exponent_hat = 0.0;
    double exponent_stderr = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    std::vector<TimedRadius> per_time_radii;
    double epsilon_tolerance = 0.2;
    bool consistent = false;
    bool admissible = false;
    bool fit_ok = false;
    std::string notice;
    RunStatus status = RunStatus::Completed;
};

struct RadiusDecayOptions {
    std::size_t samples = 32;
    /// First sample at t_final / span.
    double span = 256.0;
    double epsilon_tolerance = 0.2;
    double noise_floor = kDefaultNoiseFloor;
    /// The norm proxy uses threshold = growth × ‖·‖_{G^{0,0}}.
    double proxy_growth = 10.0;
};

/// Radius of the combined state: min over nonzero components.
TimedRadius measure_radius(const SpectralState& state, const RadiusDecayOptions& opts = {});

DecayFitResult radius_decay_experiment(const SpectralState& initial, const SystemCoefficients& c,
                                       const StepperConfig& cfg, double t_final,
                                       const RadiusDecayOptions& opts = {});

/// σ(T) = min(σ0, (δ / (C_b 2^{5/2} norm0))^{1/ρ} T^{-1/ρ}) with δ = c0 (1 + 2 norm0)^{-a}.
std::vector<double> predicted_lower_bound_curve(double norm0, double sigma0, double rho, double c0,
                                                double a, double C_b,
                                                std::span<const double> times);

/// Same with δ supplied directly.
std::vector<double> predicted_lower_bound_curve_from_delta(double delta, double norm0,
                                                           double sigma0, double rho, double C_b,
                                                           std::span<const double> times);

// --- Picard contraction -----------------------------------------------------

struct PicardCell {
    double delta = 0.0;
    std::vector<double> differences;
    /// ratios[i] = d_{i+2} / d_{i+1}; nullopt when d_{i+1} is at the round-off floor.
    std::vector<std::optional<double>> ratios;
    /// Largest resolved ratio d_{n+1}/d_n with n >= 2.
    double max_ratio = 0.0;
    bool failed = false;
    std::string message;
};

struct PicardStudy {
    std::vector<PicardCell> cells;
    /// First delta whose max ratio exceeds 1.
    std::optional<double> delta_star;
    /// Max ratio nondecreasing in delta (observed, not asserted).
    bool monotone = true;
};

struct PicardOptions {
    int iterations = 8;
    int quadrature_nodes = 16;
    bool dealias = true;
    /// Differences below floor × (‖u0‖ + ‖v0‖) count as converged.
    double floor = 1e-12;
};

PicardStudy picard_contraction_study(const SpectralState& initial, const SystemCoefficients& c,
                                     std::span<const double> deltas, const PicardOptions& opts = {},
                                     int threads = 1);

}  // namespace ckdv
