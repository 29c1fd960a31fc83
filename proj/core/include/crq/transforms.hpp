#pragma once

#include <span>

namespace crq {

enum class ResponseTransform { signed_log, log_max1 };

/// sign(y) log|y| for |y| >= 1, and 0 inside (-1, 1) so the map stays monotone.
double signed_log(double y) noexcept;

/// log(max(1, y)).
double log_max1(double y) noexcept;

double apply_transform(ResponseTransform transform, double y) noexcept;

/**
 * Exponentially discounted average of a chronological series: the newest
 * value has weight 1, each earlier year is multiplied by (1 - rate), and the
 * weights are normalized to sum to one.
 */
double discounted_avg(std::span<const double> series, double rate);

/// Smallest successive difference s[k+1] - s[k]; needs at least two values.
double min_diff(std::span<const double> series);

}  // namespace crq
