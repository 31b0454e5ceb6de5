#include "ctmc/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ctmc/errors.hpp"

namespace ctmc {

namespace {

void matmul(const std::vector<double>& a, const std::vector<double>& b,
            std::vector<double>& out, std::int64_t n) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double* arow = a.data() + i * n;
    double* orow = out.data() + i * n;
    for (std::int64_t k = 0; k < n; ++k) {
      double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.data() + k * n;
      for (std::int64_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
}

}  // namespace

std::vector<double> expm_dense(const std::vector<double>& a, std::int64_t n) {
  require(n >= 1 && a.size() == static_cast<std::size_t>(n * n),
          ErrorCode::invalid_input, "expm_dense needs an n-by-n matrix");

  // Scale so the max-abs row sum is below 0.5, keeping the series short and
  // well conditioned.
  double norm = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::int64_t j = 0; j < n; ++j) row += std::abs(a[i * n + j]);
    norm = std::max(norm, row);
  }
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }

  std::vector<double> scaled(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) scaled[i] = a[i] * scale;

  // exp(scaled) by Taylor series: result = I + scaled + scaled^2/2! + ...
  std::vector<double> result(a.size(), 0.0);
  for (std::int64_t i = 0; i < n; ++i) result[i * n + i] = 1.0;
  std::vector<double> term = scaled;
  std::vector<double> next(a.size());
  for (int k = 1; k <= 64; ++k) {
    double term_norm = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::int64_t j = 0; j < n; ++j) row += std::abs(term[i * n + j]);
      term_norm = std::max(term_norm, row);
    }
    for (std::size_t i = 0; i < term.size(); ++i) result[i] += term[i];
    if (term_norm < 1e-18) break;
    matmul(term, scaled, next, n);
    for (std::size_t i = 0; i < next.size(); ++i) {
      term[i] = next[i] / static_cast<double>(k + 1);
    }
  }

  for (int s = 0; s < squarings; ++s) {
    matmul(result, result, next, n);
    std::swap(result, next);
  }
  return result;
}

FitResult fit_slope(const std::vector<double>& xs,
                    const std::vector<double>& ys) {
  require(xs.size() == ys.size(), ErrorCode::invalid_input,
          "fit_slope needs equal-length x and y");
  FitResult fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) ||
        !std::isfinite(ys[i])) {
      ++fit.dropped;
      continue;
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  fit.used = static_cast<int>(lx.size());
  require(fit.used >= 3, ErrorCode::invalid_input,
          "fit_slope needs at least 3 positive finite pairs (have " +
              std::to_string(fit.used) + ")");

  double n = static_cast<double>(fit.used);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    sx += lx[static_cast<std::size_t>(i)];
    sy += ly[static_cast<std::size_t>(i)];
    sxx += lx[static_cast<std::size_t>(i)] * lx[static_cast<std::size_t>(i)];
    sxy += lx[static_cast<std::size_t>(i)] * ly[static_cast<std::size_t>(i)];
    syy += ly[static_cast<std::size_t>(i)] * ly[static_cast<std::size_t>(i)];
  }
  double var_x = sxx - sx * sx / n;
  double var_y = syy - sy * sy / n;
  double cov = sxy - sx * sy / n;
  require(var_x > 0.0, ErrorCode::invalid_input,
          "fit_slope needs at least two distinct x values");
  fit.slope = cov / var_x;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = (var_y > 0.0) ? (cov * cov) / (var_x * var_y) : 1.0;
  return fit;
}

}  // namespace ctmc
