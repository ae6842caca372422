#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ckdv/coeffs.hpp"
#include "ckdv/errors.hpp"
#include "ckdv/record.hpp"
#include "ckdv/spectral.hpp"

namespace ckdv {

struct NonlinearTerms {
    SpectralField rhs_u;
    SpectralField rhs_v;
};

/// f1, f2: the defect between applying e^{σ|∂x|} before and after forming
/// the quadratic terms. Both vanish at σ = 0.
struct CommutatorTerms {
    SpectralField f1;
    SpectralField f2;
    double sigma = 0.0;
};

enum class Scheme { IFRK4, ETDRK4 };

struct StepperConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::ETDRK4;
    bool dealias = true;
    int contour_points = 32;
};

/// Spectra of c11 u u_x + c12 v v_x and c21 u_x v + c22 u v_x, products
/// formed pseudospectrally.
NonlinearTerms nonlinear_rhs(const SpectralState& state, const SystemCoefficients& c,
                             bool dealias = true);

/// Relative size of e^{σ|ξ|}|û| in the top eighth of the dealiased band
/// beyond which commutator_terms refuses to work.
inline constexpr double kTailTolerance = 1e-8;

/// f1 and f2 at strip width sigma. For divergence-form systems f2 is formed
/// as c21 ∂x(e^{σ|∂x|}(uv) - (e^{σ|∂x|}u)(e^{σ|∂x|}v)). Throws OverflowGuard
/// or TailDominance when sigma is too large for the state.
CommutatorTerms commutator_terms(const SpectralState& state, const SystemCoefficients& c,
                                 double sigma, bool check_tail = true);

/// f2 always in its two-term form c21(...) + c22(...).
SpectralField commutator_f2_two_term(const SpectralState& state, const SystemCoefficients& c,
                                     double sigma, bool check_tail = true);

/// Nonlinearity of the system satisfied by (U, V) = e^{σ|∂x|}(u, v):
/// c11 U U_x + c12 V V_x + f1 and c21 U_x V + c22 U V_x + f2.
NonlinearTerms conjugated_rhs(const SpectralState& weighted, const SystemCoefficients& c,
                              double sigma, bool dealias = true);

/// Fills the second argument with the nonlinear part of (u_t, v_t) at the given state.
using NonlinearOperator = std::function<void(const SpectralState&, NonlinearTerms&)>;

/// Physical amplitude above which a run is declared blown up.
inline constexpr double kBlowUpAmplitude = 1e8;

/// Reusable evaluator of nonlinear_rhs with its own scratch buffers.
class NonlinearEvaluator {
public:
    NonlinearEvaluator(GridPtr grid, SystemCoefficients c, bool dealias);
    void operator()(const SpectralState& state, NonlinearTerms& out);

private:
    GridPtr grid_;
    SystemCoefficients c_;
    bool dealias_;
    std::vector<cplx> deriv_;
    std::vector<cplx> tmp_;
    std::vector<double> u_, ux_, v_, vx_, pu_, pv_;
};

/// Time stepper treating each equation's dispersion a_j ξ³ exactly through
/// the integrating factor and the nonlinearity explicitly. Holds per-mode
/// coefficients for one dt; confined to one thread. The Nyquist mode is not
/// evolved and is held at zero.
class Stepper {
public:
    Stepper(GridPtr grid, const SystemCoefficients& c, StepperConfig cfg);
    Stepper(GridPtr grid, double a1, double a2, StepperConfig cfg, NonlinearOperator op,
            bool op_is_zero = false);

    /// Advance by cfg.dt. Throws BlowUp on non-finite or oversized fields.
    void step(SpectralState& state);
    const StepperConfig& config() const noexcept { return cfg_; }

private:
    struct Linear {
        std::vector<cplx> e, e2, q, f1, f2, f3;
    };
    static Linear make_linear(const Grid& g, double a, const StepperConfig& cfg);
    void step_etdrk4(SpectralState& s);
    void step_ifrk4(SpectralState& s);
    void eval(const SpectralState& s, NonlinearTerms& out);

    GridPtr grid_;
    StepperConfig cfg_;
    NonlinearOperator op_;
    bool op_is_zero_;
    Linear lu_, lv_;
};

SpectralState step(const SpectralState& state, const SystemCoefficients& c,
                   const StepperConfig& cfg);

/// Existence-time surrogate c0 (1 + ‖u0‖ + ‖v0‖)^{-a}.
double lifespan(double norm_u, double norm_v, double c0 = 0.1, double a = 4.0);
/// Default step: min(1e-3, delta / 100).
double default_dt(double delta);

using Observer = std::function<void(const SpectralState&)>;

struct EvolveOptions {
    /// Record every `stride` steps; 0 records only the sample times and the end points.
    std::size_t stride = 1;
    /// Extra times to record, snapped to the nearest step.
    std::vector<double> sample_times;
    std::vector<double> gevrey_sigmas;
    std::optional<double> eta;
    bool estimate_radius = true;
    double noise_floor = 1e-13;
    /// Called with every recorded state.
    std::vector<Observer> observers;
};

/// Thrown by evolve; carries the trace up to the failure.
class RunAborted : public BlowUp {
public:
    RunAborted(const BlowUp& cause, RunRecord partial)
        : BlowUp(cause.what(), cause.time()), record_(std::move(partial)) {}
    const RunRecord& record() const noexcept { return record_; }

private:
    RunRecord record_;
};

RecordRow make_row(const SpectralState& state, std::size_t step, const EvolveOptions& opts);

/// Steps from state.time to t_final with a uniform step no larger than cfg.dt
/// that lands exactly on t_final.
RunRecord evolve(SpectralState state, const SystemCoefficients& c, const StepperConfig& cfg,
                 double t_final, const EvolveOptions& opts = {});

/// Same, but also hands back the final state.
RunRecord evolve(SpectralState& state, Stepper& stepper, double t_final,
                 const EvolveOptions& opts);

struct PicardResult {
    double delta = 0.0;
    /// Evaluation times: 0, the quadrature nodes on [0, delta], delta.
    std::vector<double> times;
    /// iterates[n][j]: (u^(n), v^(n)) at times[j].
    std::vector<std::vector<SpectralState>> iterates;
    /// differences[n-1] = max_j ‖u^(n) - u^(n-1)‖ + ‖v^(n) - v^(n-1)‖ at times[j].
    std::vector<double> differences;
};

/// Picard iteration of the Duhamel formula on [0, delta]. Iterate 0 is the
/// free flow; iterate n propagates the data exactly and adds the Duhamel
/// integral of iterate n-1's nonlinearity by Gauss–Legendre quadrature in the
/// interaction picture. Returns `n_iters` iterates. Throws ContractionFailure
/// when the differences grow three times in a row.
PicardResult picard_iterate(const SpectralState& initial, const SystemCoefficients& c,
                            double delta, int n_iters, int quadrature_nodes = 16,
                            bool dealias = true);

struct DriftReport {
    double q0 = 0.0;
    double max_drift = 0.0;
    double t_at_max = 0.0;
    /// false when Q(0) vanished and the drift is absolute.
    bool relative = true;
};

/// max_t |Q(t) - Q(0)| / |Q(0)| with Q = ∫(u² + eta v²) dx over the record's rows.
DriftReport check_quadratic_invariant(const RunRecord& record, double eta);

}  // namespace ckdv
