#include "crq/transforms.hpp"

#include "crq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crq {

double signed_log(double y) noexcept {
    const double a = std::abs(y);
    if (a < 1.0) return 0.0;
    return std::copysign(std::log(a), y);
}

double log_max1(double y) noexcept { return std::log(std::max(1.0, y)); }

double apply_transform(ResponseTransform transform, double y) noexcept {
    return transform == ResponseTransform::signed_log ? signed_log(y) : log_max1(y);
}

double discounted_avg(std::span<const double> series, double rate) {
    if (series.empty()) throw Error("discounted_avg: empty series");
    if (!(rate >= 0.0 && rate < 1.0)) throw Error("discounted_avg: rate must lie in [0, 1)");
    const double keep = 1.0 - rate;
    double weight = 1.0;
    double total = 0.0;
    double norm = 0.0;
    for (auto it = series.rbegin(); it != series.rend(); ++it) {
        total += weight * *it;
        norm += weight;
        weight *= keep;
    }
    return total / norm;
}

double min_diff(std::span<const double> series) {
    if (series.size() < 2) throw Error("min_diff: need at least two values");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < series.size(); ++k) best = std::min(best, series[k + 1] - series[k]);
    return best;
}

}  // namespace crq
