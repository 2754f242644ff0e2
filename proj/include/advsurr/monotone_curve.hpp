#pragma once

#include <ostream>
#include <vector>

namespace advsurr {

struct Knot {
  double x;
  double y;
};

enum class Direction { nondecreasing, nonincreasing };

// Piecewise-linear curve through ascending knots, clamped outside its range.
class MonotoneCurve {
 public:
  MonotoneCurve(std::vector<Knot> knots, Direction direction);

  // Same as the constructor after replacing y by its running max (or min),
  // which removes round-off wiggles from numerically tabulated curves.
  static MonotoneCurve from_samples(std::vector<Knot> knots, Direction direction);

  [[nodiscard]] double operator()(double x) const;

  // Smallest x with curve(x) >= y (nondecreasing curves only).
  [[nodiscard]] double inverse_leftmost(double y) const;

  [[nodiscard]] const std::vector<Knot>& knots() const { return knots_; }
  [[nodiscard]] Direction direction() const { return direction_; }
  [[nodiscard]] double x_min() const { return knots_.front().x; }
  [[nodiscard]] double x_max() const { return knots_.back().x; }

  void write_csv(std::ostream& out, const char* x_name = "x", const char* y_name = "y") const;

 private:
  std::vector<Knot> knots_;
  Direction direction_;
};

}  // namespace advsurr
