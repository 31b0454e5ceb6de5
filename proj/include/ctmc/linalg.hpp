// Small dense numerics used by the reference stepper and the scaling fits:
// a matrix exponential via scaling-and-squaring with a truncated Taylor
// series, and an ordinary least-squares line fit on (log x, log y).

#pragma once

#include <cstdint>
#include <vector>

namespace ctmc {

// Row-major square matrix exponential exp(A) for modest n (reference-quality,
// not performance-tuned). Scaling-and-squaring: A/2^k is fed to a Taylor
// series truncated when terms fall below 1e-18 relative weight, then the
// result is squared k times.
std::vector<double> expm_dense(const std::vector<double>& a, std::int64_t n);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int used = 0;     // rows entering the fit
  int dropped = 0;  // non-positive or non-finite rows skipped
};

// Least squares of log(y) on log(x). Pairs with non-positive or non-finite
// coordinates are dropped (counted in `dropped`); fewer than 3 surviving
// pairs is an InvalidInput error.
FitResult fit_slope(const std::vector<double>& xs,
                    const std::vector<double>& ys);

}  // namespace ctmc
