#include "ckdv/coeffs.hpp"

#include <cmath>

#include "ckdv/errors.hpp"

namespace ckdv {

SystemCoefficients::SystemCoefficients(double a1, double a2, double c11, double c12, double c21,
                                       double c22)
    : a1_(a1), a2_(a2), c11_(c11), c12_(c12), c21_(c21), c22_(c22) {
    for (double x : {a1, a2, c11, c12, c21, c22}) {
        if (!std::isfinite(x)) throw InvalidParameter("system coefficients must be finite");
    }
    if (a1 == 0.0 || a2 == 0.0) {
        throw InvalidParameter("dispersion coefficients violate a1a2 ≠ 0");
    }
}

SystemCoefficients make_majda_biello(double a2) {
    if (a2 == 0.0) throw InvalidParameter("majda-biello: a2 must be nonzero (a1a2 ≠ 0)");
    return {1.0, a2, 0.0, -1.0, -1.0, -1.0};
}

SystemCoefficients make_hirota_satsuma(double a1, double c12) {
    if (a1 == 0.0) throw InvalidParameter("hirota-satsuma: a1 must be nonzero (a1a2 ≠ 0)");
    return {a1, 1.0, -6.0 * a1, c12, 0.0, -3.0};
}

RegimeClass classify(const SystemCoefficients& c) {
    using enum BilinearEstimate;
    RegimeClass out;
    out.ratio = c.ratio();
    const double r = out.ratio;

    if (r < 0.0) {
        out.regime = Regime::NegativeRatio;
    } else if (r == 1.0) {
        out.regime = Regime::UnitRatio;
    } else if (r <= 4.0) {
        // the boundary r = 4 belongs to the middle band
        out.regime = Regime::MidRatio;
    } else {
        out.regime = Regime::LargeRatio;
    }

    switch (out.regime) {
        case Regime::NegativeRatio:
        case Regime::LargeRatio:
            out.available_estimates = {Comm0, Comm1, Comm2, Comm3, Comm4};
            break;
        case Regime::MidRatio:
            out.available_estimates = {Comm0};
            out.required_constraints = {{"c12 = 0", c.c12() == 0.0},
                                        {"c21 = 0", c.c21() == 0.0},
                                        {"c22 = 0", c.c22() == 0.0}};
            break;
        case Regime::UnitRatio:
            out.available_estimates = {Comm0, Comm1, Comm2};
            out.required_constraints = {{"c21 = c22", c.c21() == c.c22()}};
            break;
    }

    out.admissible = true;
    for (const auto& k : out.required_constraints) out.admissible = out.admissible && k.satisfied;
    return out;
}

bool is_divergence_form(const SystemCoefficients& c) { return c.c21() == c.c22(); }

std::optional<double> invariant_weight(const SystemCoefficients& c) {
    // d/dt ½∫u² = c12 ∫u v v_x,  d/dt ½∫v² = (c22 - 2 c21) ∫u v v_x
    if (c.c12() == 0.0) return 0.0;
    const double denom = c.c22() - 2.0 * c.c21();
    if (denom == 0.0) return std::nullopt;
    return -c.c12() / denom;
}

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::NegativeRatio: return "negative-ratio";
        case Regime::MidRatio: return "mid-ratio";
        case Regime::UnitRatio: return "unit-ratio";
        case Regime::LargeRatio: return "large-ratio";
    }
    return "?";
}

std::string_view to_string(BilinearEstimate e) {
    switch (e) {
        case BilinearEstimate::Comm0: return "comm0";
        case BilinearEstimate::Comm1: return "comm1";
        case BilinearEstimate::Comm2: return "comm2";
        case BilinearEstimate::Comm3: return "comm3";
        case BilinearEstimate::Comm4: return "comm4";
    }
    return "?";
}

}  // namespace ckdv
