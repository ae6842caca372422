#pragma once

#include <utility>
#include <vector>

namespace ckdv {

/// Gauss–Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

}  // namespace ckdv
