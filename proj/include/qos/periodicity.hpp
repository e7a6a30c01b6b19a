#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace qos {

// Biased sample autocorrelation of the mean-removed series, normalized so
// r[0] = 1; lags 0..max_lag. A constant series yields all zeros past lag 0.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

struct PeriodEstimate {
  std::size_t lag = 0;
  double acf = 0.0;
};

// Highest autocorrelation peak after the first zero crossing, searched up to
// max_lag (default: a quarter of the series). Empty when the autocorrelation
// never crosses zero within range or no positive peak follows.
std::optional<PeriodEstimate> dominant_period(std::span<const double> series,
                                              std::size_t max_lag = 0);

}  // namespace qos
