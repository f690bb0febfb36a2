#pragma once

#include <span>

namespace mgcc {

/// V = 1/2 sum (x_i - mean)^2.
double lyapunov(std::span<const double> x) noexcept;

/// max_i x_i - min_i x_i, the largest pairwise gap.
double max_disagreement(std::span<const double> x) noexcept;

}  // namespace mgcc
