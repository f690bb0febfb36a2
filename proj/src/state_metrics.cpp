#include "mgcc/state_metrics.hpp"

#include <algorithm>

namespace mgcc {

double lyapunov(std::span<const double> x) noexcept
{
    if (x.empty()) {
        return 0.0;
    }
    double mean = 0.0;
    for (const double v : x) {
        mean += v;
    }
    mean /= static_cast<double>(x.size());
    double v = 0.0;
    for (const double xi : x) {
        v += (xi - mean) * (xi - mean);
    }
    return 0.5 * v;
}

double max_disagreement(std::span<const double> x) noexcept
{
    if (x.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *hi - *lo;
}

}  // namespace mgcc
