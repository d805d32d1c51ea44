#pragma once

#include <span>

namespace dito {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares of log(y) against log(x). All values must be positive.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace dito
