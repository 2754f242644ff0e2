#include "advsurr/monotone_curve.hpp"

#include <algorithm>
#include <cmath>

#include "advsurr/errors.hpp"
#include "csv_util.hpp"

namespace advsurr {

MonotoneCurve::MonotoneCurve(std::vector<Knot> knots, Direction direction)
    : knots_(std::move(knots)), direction_(direction) {
  if (knots_.empty()) throw DomainError("monotone curve needs at least one knot");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i].x) || std::isnan(knots_[i].y))
      throw DomainError("monotone curve: non-finite knot at index " + std::to_string(i));
    if (i == 0) continue;
    if (!(knots_[i].x > knots_[i - 1].x))
      throw DomainError("monotone curve: knot x not strictly ascending at index " + std::to_string(i));
    const bool ok = direction_ == Direction::nondecreasing ? knots_[i].y >= knots_[i - 1].y
                                                           : knots_[i].y <= knots_[i - 1].y;
    if (!ok) throw DomainError("monotone curve: y not monotone at x = " + detail::format_number(knots_[i].x));
  }
}

MonotoneCurve MonotoneCurve::from_samples(std::vector<Knot> knots, Direction direction) {
  for (std::size_t i = 1; i < knots.size(); ++i) {
    knots[i].y = direction == Direction::nondecreasing ? std::max(knots[i].y, knots[i - 1].y)
                                                       : std::min(knots[i].y, knots[i - 1].y);
  }
  return MonotoneCurve(std::move(knots), direction);
}

double MonotoneCurve::operator()(double x) const {
  if (x <= knots_.front().x) return knots_.front().y;
  if (x >= knots_.back().x) return knots_.back().y;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](double v, const Knot& k) { return v < k.x; });
  const Knot& b = *it;
  const Knot& a = *(it - 1);
  if (a.y == b.y) return a.y;
  const double t = (x - a.x) / (b.x - a.x);
  return a.y + t * (b.y - a.y);
}

double MonotoneCurve::inverse_leftmost(double y) const {
  if (direction_ != Direction::nondecreasing) throw DomainError("inverse_leftmost needs a nondecreasing curve");
  if (y > knots_.back().y) throw DomainError("inverse_leftmost: " + detail::format_number(y) + " above curve range");
  if (y <= knots_.front().y) return knots_.front().x;
  // first knot reaching y, then bisection inside its segment
  auto it = std::lower_bound(knots_.begin(), knots_.end(), y, [](const Knot& k, double v) { return k.y < v; });
  double lo = (it - 1)->x;
  double hi = it->x;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((*this)(mid) >= y) hi = mid; else lo = mid;
  }
  return hi;
}

void MonotoneCurve::write_csv(std::ostream& out, const char* x_name, const char* y_name) const {
  out << x_name << ',' << y_name << '\n';
  for (const auto& k : knots_) out << detail::format_number(k.x) << ',' << detail::format_number(k.y) << '\n';
}

}  // namespace advsurr
