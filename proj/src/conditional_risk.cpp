#include "advsurr/conditional_risk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "csv_util.hpp"
#include "scalar_search.hpp"

namespace advsurr {

namespace {

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta = " + detail::format_number(eta) + " outside [0, 1]");
}

double risk_unchecked(const Loss& loss, double eta, double alpha) {
  return weighted(eta, loss(alpha)) + weighted(1.0 - eta, loss(-alpha));
}

detail::ScalarMin finite_minimum(const Loss& loss, double eta, double lo, double hi, const ScoreSearch& s) {
  auto f = [&](double a) { return risk_unchecked(loss, eta, a); };
  const int points = std::max(3, static_cast<int>(std::lround((hi - lo) / (2.0 * s.score_bound) * (s.coarse_points - 1))) + 1);
  return detail::scan_and_refine(f, lo, hi, points, s.tol);
}

// Left-most point of [lo, hi] with f <= threshold, given f(hi) <= threshold < f(lo).
template <typename F>
double leftmost_below(F&& f, double lo, double hi, double threshold) {
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) <= threshold) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace

double conditional_risk(const Loss& loss, double eta, double alpha) {
  check_eta(eta);
  return risk_unchecked(loss, eta, alpha);
}

double min_conditional_risk(const Loss& loss, double eta, const ScoreSearch& search) {
  check_eta(eta);
  const double finite = finite_minimum(loss, eta, -search.score_bound, search.score_bound, search).value;
  return std::min({finite, risk_unchecked(loss, eta, kInf), risk_unchecked(loss, eta, -kInf)});
}

double min_misclassify_risk(const Loss& loss, double eta, const ScoreSearch& search) {
  check_eta(eta);
  if (eta == 0.5) return min_conditional_risk(loss, eta, search);
  if (eta > 0.5) {
    const double finite = finite_minimum(loss, eta, -search.score_bound, 0.0, search).value;
    return std::min({finite, risk_unchecked(loss, eta, 0.0), risk_unchecked(loss, eta, -kInf)});
  }
  const double finite = finite_minimum(loss, eta, 0.0, search.score_bound, search).value;
  return std::min({finite, risk_unchecked(loss, eta, 0.0), risk_unchecked(loss, eta, kInf)});
}

double smallest_minimizer(const Loss& loss, double eta, const ScoreSearch& search) {
  check_eta(eta);
  auto f = [&](double a) { return risk_unchecked(loss, eta, a); };
  const double bound = search.score_bound;
  const auto finite = finite_minimum(loss, eta, -bound, bound, search);
  const double at_pos = f(kInf);
  const double at_neg = f(-kInf);
  const double best = std::min({finite.value, at_pos, at_neg});
  const double threshold = best + search.tol;
  if (at_neg <= threshold) return -kInf;
  // the minimum is reached only as alpha -> +inf
  if (at_pos < finite.value) return kInf;

  const int points = search.coarse_points;
  const double step = 2.0 * bound / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double x = -bound + i * step;
    if (x > finite.arg) break;
    if (f(x) <= threshold) return i == 0 ? x : leftmost_below(f, x - step, x, threshold);
  }
  const double left = std::max(-bound, finite.arg - step);
  if (f(left) <= threshold) return left;
  return leftmost_below(f, left, finite.arg, threshold);
}

ConditionalRiskReport conditional_risk_report(const Loss& loss, double eta, const ScoreSearch& search) {
  return {eta, min_conditional_risk(loss, eta, search), min_misclassify_risk(loss, eta, search),
          smallest_minimizer(loss, eta, search), search.tol};
}

namespace {

MonotoneCurve tabulate_psi(const Loss& loss, int knots, const ScoreSearch& search) {
  if (knots < 2) throw DomainError("psi table needs at least two knots");
  std::vector<Knot> pts(static_cast<std::size_t>(knots));
  const double phi0 = loss.value_at_zero();
  for (int i = 0; i < knots; ++i) {
    const double theta = static_cast<double>(i) / (knots - 1);
    pts[static_cast<std::size_t>(i)] = {theta, phi0 - min_conditional_risk(loss, 0.5 * (1.0 + theta), search)};
  }
  return MonotoneCurve::from_samples(std::move(pts), Direction::nondecreasing);
}

}  // namespace

PsiTransform::PsiTransform(const Loss& loss, int knots, const ScoreSearch& search)
    : curve_(tabulate_psi(loss, knots, search)), phi_zero_(loss.value_at_zero()) {}

double PsiTransform::inverse(double y) const {
  const double top = curve_.knots().back().y;
  if (!(y >= 0.0) || y > top + 1e-12)
    throw DomainError("psi inverse: y = " + detail::format_number(y) + " outside [0, " + detail::format_number(top) + "]");
  return curve_.inverse_leftmost(std::min(y, top));
}

double psi(const Loss& loss, double theta, const ScoreSearch& search) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("psi: theta outside [0, 1]");
  return loss.value_at_zero() - min_conditional_risk(loss, 0.5 * (1.0 + theta), search);
}

double psi_inverse(const Loss& loss, double y, const ScoreSearch& search) {
  return PsiTransform(loss, 4097, search).inverse(y);
}

ConsistencyReport check_consistency(const Loss& loss, double tol, int eta_points) {
  ScoreSearch search;
  search.tol = tol;
  const double phi0 = loss.value_at_zero();
  std::vector<double> grid(static_cast<std::size_t>(eta_points));
  double min_off = kInf;
  std::vector<Knot> upper;
  for (int i = 0; i < eta_points; ++i) {
    const double eta = static_cast<double>(i) / (eta_points - 1);
    grid[static_cast<std::size_t>(i)] = eta;
    if (2 * i == eta_points - 1) continue;
    const double margin = phi0 - min_conditional_risk(loss, eta, search);
    min_off = std::min(min_off, margin);
    if (eta > 0.5) upper.push_back({eta, margin});
  }
  const double at_half = phi0 - min_conditional_risk(loss, 0.5, search);
  upper.insert(upper.begin(), Knot{0.5, at_half});
  return ConsistencyReport{min_off > tol, at_half > tol, at_half, min_off, std::move(grid),
                           MonotoneCurve::from_samples(std::move(upper), Direction::nondecreasing)};
}

}  // namespace advsurr
