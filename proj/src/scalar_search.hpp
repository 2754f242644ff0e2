#pragma once

#include <cmath>
#include <vector>

namespace advsurr::detail {

struct ScalarMin {
  double arg;
  double value;
};

// Golden-section search on [a, b] for a unimodal f.
template <typename F>
ScalarMin golden_section(F&& f, double a, double b, double xtol, int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (fc <= fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? ScalarMin{c, fc} : ScalarMin{d, fd};
}

// Coarse scan of [lo, hi] followed by golden-section refinement around the
// best sample. Returns the best point seen, grid or refined.
template <typename F>
ScalarMin scan_and_refine(F&& f, double lo, double hi, int points, double xtol) {
  const double step = (hi - lo) / (points - 1);
  int best = 0;
  double best_value = f(lo);
  for (int i = 1; i < points; ++i) {
    const double v = f(lo + i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double x_best = lo + best * step;
  const double a = std::max(lo, x_best - step);
  const double b = std::min(hi, x_best + step);
  const ScalarMin refined = golden_section(f, a, b, xtol);
  if (refined.value < best_value) return refined;
  return {x_best, best_value};
}

}  // namespace advsurr::detail
