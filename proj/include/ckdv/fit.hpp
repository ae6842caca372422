#pragma once

#include <span>

namespace ckdv {

/// Ordinary least-squares line y = intercept + slope x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    /// Root-mean-square of the residuals.
    double residual = 0.0;
    std::size_t n = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace ckdv
