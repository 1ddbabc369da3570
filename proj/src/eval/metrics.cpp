#include "eval/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "common/error.hpp"

namespace faasprof {

double mape(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size())
    throw DataError(fmt::format("mape: {} targets but {} predictions", y.size(), y_hat.size()));
  if (y.empty()) throw DataError("mape: no values");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0.0) throw DataError(fmt::format("mape: target {} is zero", i + 1));
    s += std::abs((y[i] - y_hat[i]) / y[i]);
  }
  return 100.0 * s / static_cast<double>(y.size());
}

}  // namespace faasprof
