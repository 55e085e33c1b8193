#pragma once

#include <optional>

#include "mlp/types.hpp"

namespace mlp {

// Exact Gaussian elimination helpers.
int rank(const Mat& a);
std::optional<Mat> inverse(const Mat& a);
// Unique solution of a x = c when a has full column rank and the system is
// consistent; nullopt otherwise.
std::optional<Vec> solve_unique(const Mat& a, const Vec& c);

}  // namespace mlp
