#pragma once

#include <functional>
#include <span>
#include <vector>

#include "advsurr/attack.hpp"
#include "advsurr/monotone_curve.hpp"

namespace advsurr {

// Right-continuous step function: value of the last jump at or left of z,
// zero before the first jump.
class StepCdf {
 public:
  explicit StepCdf(std::vector<Knot> jumps);

  [[nodiscard]] double operator()(double z) const;
  [[nodiscard]] const std::vector<Knot>& jumps() const { return jumps_; }

  // Points (0, h(0)), every jump, and (end, h(end)).
  [[nodiscard]] std::vector<Knot> closure(double end = 0.5) const;

 private:
  std::vector<Knot> jumps_;
};

struct EnvelopeCdf {
  StepCdf h;             // z -> mass share with |eta* - 1/2| <= z
  MonotoneCurve H;       // least concave majorant of h on [0, 1/2]
  double atom_at_half;   // mass with |eta* - 1/2| <= atom_tol
  double atom_tol;
  double total_mass;
  double spacing;
  bool strict;           // atom mass removed from h
};

// 2 * spacing * (median slope of eta* between neighbouring mass nodes),
// floored at 1e-9 so exact ties survive round-off.
[[nodiscard]] double default_atom_tol(const AttackPair& attack);

[[nodiscard]] EnvelopeCdf cdf_abs_eta(const AttackPair& attack, double atom_tol, bool strict = false);
[[nodiscard]] EnvelopeCdf cdf_abs_eta(const AttackPair& attack, bool strict = false);

// Upper hull of points sorted by strictly ascending x (monotone chain).
[[nodiscard]] std::vector<Knot> upper_concave_hull(std::span<const Knot> points);

[[nodiscard]] MonotoneCurve concave_envelope(const MonotoneCurve& curve);
[[nodiscard]] MonotoneCurve concave_envelope(const StepCdf& h, double end = 0.5);

struct DarbouxSums {
  double lower;
  double upper;
};

// For nonincreasing g and nondecreasing h over the given ascending partition:
// lower = sum g(z_{k+1}) dh, upper = sum g(z_k) dh, with 0 * inf = 0.
[[nodiscard]] DarbouxSums rs_integral(const std::function<double(double)>& g, const std::function<double(double)>& h,
                                      std::span<const double> partition);

// Partition from the union of both knot sets, each gap split refine times.
[[nodiscard]] DarbouxSums rs_integral(const MonotoneCurve& g, const MonotoneCurve& h, int refine);

// Ascending points on [start, end]: geometric with per_decade points per
// factor of ten, merged with the extra knots inside the range.
[[nodiscard]] std::vector<double> geometric_partition(double start, double end, int per_decade,
                                                      std::span<const double> extra = {});

struct PowerIntegral {
  DarbouxSums sums;           // at the smallest delta
  std::vector<double> deltas;
  std::vector<double> lower_by_delta;
};

// Integral of H^{-r} dh over (delta, 1/2] along delta = 1e-2, 1e-4, ..., 1e-12.
[[nodiscard]] PowerIntegral envelope_power_integral(const MonotoneCurve& H, const std::function<double(double)>& h,
                                                    std::span<const double> h_knots, double r, int refine = 1);
[[nodiscard]] PowerIntegral envelope_power_integral(const EnvelopeCdf& env, double r, int refine = 1);

}  // namespace advsurr
