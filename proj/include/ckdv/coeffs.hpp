#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ckdv {

/// Coefficients of the coupled system
///
///   u_t + a1 u_xxx = c11 u u_x + c12 v v_x
///   v_t + a2 v_xxx = c21 u_x v + c22 u v_x
///
/// with a1 a2 != 0. Immutable once constructed.
class SystemCoefficients {
public:
    SystemCoefficients(double a1, double a2, double c11, double c12, double c21, double c22);

    double a1() const noexcept { return a1_; }
    double a2() const noexcept { return a2_; }
    double c11() const noexcept { return c11_; }
    double c12() const noexcept { return c12_; }
    double c21() const noexcept { return c21_; }
    double c22() const noexcept { return c22_; }

    double ratio() const noexcept { return a2_ / a1_; }
    bool is_linear() const noexcept { return c11_ == 0 && c12_ == 0 && c21_ == 0 && c22_ == 0; }

    friend bool operator==(const SystemCoefficients&, const SystemCoefficients&) = default;

private:
    double a1_, a2_, c11_, c12_, c21_, c22_;
};

SystemCoefficients make_majda_biello(double a2);
SystemCoefficients make_hirota_satsuma(double a1, double c12);

enum class Regime { NegativeRatio, MidRatio, UnitRatio, LargeRatio };

/// Bilinear estimates available in each ratio regime.
enum class BilinearEstimate { Comm0, Comm1, Comm2, Comm3, Comm4 };

/// A coefficient that must vanish or an equality that must hold for the regime.
struct Constraint {
    std::string description;  // e.g. "c12 = 0"
    bool satisfied;
};

struct RegimeClass {
    double ratio;
    Regime regime;
    bool admissible;
    std::vector<Constraint> required_constraints;
    std::set<BilinearEstimate> available_estimates;
};

RegimeClass classify(const SystemCoefficients& c);

bool is_divergence_form(const SystemCoefficients& c);

/// Weight eta making ∫(u² + eta v²) dx invariant for smooth solutions:
/// c12 + eta (c22 - 2 c21) = 0. Empty when no such eta exists.
std::optional<double> invariant_weight(const SystemCoefficients& c);

std::string_view to_string(Regime r);
std::string_view to_string(BilinearEstimate e);

}  // namespace ckdv
