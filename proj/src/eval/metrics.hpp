#pragma once

#include <span>

namespace faasprof {

// Mean absolute percentage error, in percent. Throws DataError on a zero or
// length mismatch.
double mape(std::span<const double> y, std::span<const double> y_hat);

}  // namespace faasprof
