#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>

#include "ckdv/spectral.hpp"

namespace ckdv {

/// Parameters of the built-in initial data. Centers default to L/2.
struct ProfileParams {
    double u_amplitude = 0.5;
    double v_amplitude = 0.5;
    double width = 2.0;
    double u_center = std::numeric_limits<double>::quiet_NaN();
    double v_center = std::numeric_limits<double>::quiet_NaN();
    /// Envelope decay rate σ0 for poisson-kernel (r = e^{-σ0}) and random-analytic.
    double radius = 0.5;
    std::uint64_t seed = 0;
    /// Project onto the 2/3-rule band after construction.
    bool dealias = true;
};

/// One of gaussian, sech2, poisson-kernel, random-analytic. The Nyquist mode
/// is always zero.
///
///   gaussian        A exp(-((x - x0)/w)²)
///   sech2           A sech²((x - x0)/w)
///   poisson-kernel  û(ξ) = A e^{-σ0|ξ|} e^{-iξ x0}; radius exactly σ0
///   random-analytic û(ξ) = A e^{-σ0|ξ|} e^{iφ}, φ uniform from the seed
SpectralState initial_profile(std::string_view name, const ProfileParams& params,
                              const GridPtr& grid);

/// Two-column spectrum file: each line `k (re,im)`; `#` starts a comment.
/// Missing negative modes are filled by Hermitian symmetry.
SpectralField load_spectrum_file(const std::filesystem::path& path, const GridPtr& grid);
void write_spectrum_file(const std::filesystem::path& path, const SpectralField& field);

}  // namespace ckdv
