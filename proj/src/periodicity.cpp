#include "qos/periodicity.hpp"

#include <algorithm>
#include <numeric>

namespace qos {

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n == 0) return {};
  max_lag = std::min(max_lag, n - 1);
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  std::transform(series.begin(), series.end(), x.begin(), [&](double v) { return v - mean; });

  std::vector<double> r(max_lag + 1, 0.0);
  const double c0 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  if (c0 <= 0.0) {
    r[0] = 1.0;
    return r;
  }
  for (std::size_t k = 0; k <= max_lag; ++k) {
    r[k] = std::inner_product(x.begin() + static_cast<std::ptrdiff_t>(k), x.end(), x.begin(), 0.0) / c0;
  }
  return r;
}

std::optional<PeriodEstimate> dominant_period(std::span<const double> series,
                                              std::size_t max_lag) {
  if (max_lag == 0) max_lag = series.size() / 4;
  const auto r = autocorrelation(series, max_lag);
  std::size_t start = 1;
  while (start < r.size() && r[start] > 0.0) ++start;
  if (start >= r.size()) return std::nullopt;
  const auto best = std::max_element(r.begin() + static_cast<std::ptrdiff_t>(start), r.end());
  if (*best <= 0.0) return std::nullopt;
  return PeriodEstimate{static_cast<std::size_t>(best - r.begin()), *best};
}

}  // namespace qos
