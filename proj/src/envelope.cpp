#include "advsurr/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"

namespace advsurr {

StepCdf::StepCdf(std::vector<Knot> jumps) : jumps_(std::move(jumps)) {
  for (std::size_t i = 1; i < jumps_.size(); ++i) {
    if (!(jumps_[i].x > jumps_[i - 1].x)) throw DomainError("step cdf jumps must have ascending positions");
    if (jumps_[i].y < jumps_[i - 1].y) throw DomainError("step cdf must be nondecreasing");
  }
}

double StepCdf::operator()(double z) const {
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), z, [](double v, const Knot& k) { return v < k.x; });
  return it == jumps_.begin() ? 0.0 : (it - 1)->y;
}

std::vector<Knot> StepCdf::closure(double end) const {
  std::vector<Knot> pts;
  pts.push_back({0.0, (*this)(0.0)});
  for (const auto& j : jumps_)
    if (j.x > 0.0 && j.x < end) pts.push_back(j);
  pts.push_back({end, (*this)(end)});
  return pts;
}

double default_atom_tol(const AttackPair& attack) {
  const auto& eta = attack.eta_star;
  std::vector<double> slopes;
  for (std::size_t k = 0; k + 1 < eta.size(); ++k) {
    if (std::isnan(eta[k]) || std::isnan(eta[k + 1])) continue;
    slopes.push_back(std::abs(eta[k + 1] - eta[k]) / eta.grid().spacing);
  }
  double median = 0.0;
  if (!slopes.empty()) {
    auto mid = slopes.begin() + static_cast<std::ptrdiff_t>(slopes.size() / 2);
    std::nth_element(slopes.begin(), mid, slopes.end());
    median = *mid;
  }
  return std::max(2.0 * eta.grid().spacing * median, 1e-9);
}

EnvelopeCdf cdf_abs_eta(const AttackPair& attack, double atom_tol, bool strict) {
  const GridDistribution& p = attack.attacked;
  const double total = p.total_mass();
  std::vector<Knot> points;  // (|eta - 1/2|, mass)
  double atom = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = p.node_mass(k);
    if (m == 0.0) continue;
    const double dist = std::min(0.5, std::abs(attack.eta_star[k] - 0.5));
    if (dist <= atom_tol) {
      atom += m;
      if (strict) continue;
    }
    points.push_back({dist, m});
  }
  std::sort(points.begin(), points.end(), [](const Knot& a, const Knot& b) { return a.x < b.x; });
  std::vector<Knot> jumps;
  double acc = 0.0;
  for (const auto& pt : points) {
    acc += pt.y;
    const double share = std::min(1.0, acc / total);
    if (!jumps.empty() && jumps.back().x == pt.x) jumps.back().y = share;
    else jumps.push_back({pt.x, share});
  }
  StepCdf h(std::move(jumps));
  MonotoneCurve H = concave_envelope(h);
  return EnvelopeCdf{std::move(h), std::move(H), atom, atom_tol, total, p.grid().spacing, strict};
}

EnvelopeCdf cdf_abs_eta(const AttackPair& attack, bool strict) {
  return cdf_abs_eta(attack, default_atom_tol(attack), strict);
}

std::vector<Knot> upper_concave_hull(std::span<const Knot> points) {
  std::vector<Knot> hull;
  for (const Knot& p : points) {
    if (!hull.empty() && !(p.x > hull.back().x)) throw DomainError("hull input must have ascending x");
    // drop the middle point while it lies on or below the chord
    while (hull.size() >= 2) {
      const Knot& o = hull[hull.size() - 2];
      const Knot& a = hull.back();
      const double cross = (a.x - o.x) * (p.y - o.y) - (a.y - o.y) * (p.x - o.x);
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  return hull;
}

MonotoneCurve concave_envelope(const MonotoneCurve& curve) {
  return MonotoneCurve::from_samples(upper_concave_hull(curve.knots()), curve.direction());
}

MonotoneCurve concave_envelope(const StepCdf& h, double end) {
  const auto pts = h.closure(end);
  return MonotoneCurve::from_samples(upper_concave_hull(pts), Direction::nondecreasing);
}

DarbouxSums rs_integral(const std::function<double(double)>& g, const std::function<double(double)>& h,
                        std::span<const double> partition) {
  DarbouxSums sums{0.0, 0.0};
  if (partition.size() < 2) return sums;
  double h_prev = h(partition[0]);
  double g_prev = g(partition[0]);
  for (std::size_t k = 1; k < partition.size(); ++k) {
    const double h_next = h(partition[k]);
    const double g_next = g(partition[k]);
    const double dh = h_next - h_prev;
    sums.lower += weighted(dh, g_next);
    sums.upper += weighted(dh, g_prev);
    h_prev = h_next;
    g_prev = g_next;
  }
  return sums;
}

namespace {

std::vector<double> refine_partition(std::vector<double> knots, int refine) {
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  if (refine <= 1 || knots.size() < 2) return knots;
  std::vector<double> out;
  out.reserve(knots.size() * static_cast<std::size_t>(refine));
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    for (int j = 0; j < refine; ++j)
      out.push_back(knots[i] + (knots[i + 1] - knots[i]) * j / refine);
  out.push_back(knots.back());
  return out;
}

}  // namespace

DarbouxSums rs_integral(const MonotoneCurve& g, const MonotoneCurve& h, int refine) {
  if (refine < 1) throw DomainError("refine must be at least 1");
  const double a = std::max(g.x_min(), h.x_min());
  const double b = std::min(g.x_max(), h.x_max());
  if (!(b > a)) return {0.0, 0.0};
  std::vector<double> knots{a, b};
  for (const auto& k : g.knots())
    if (k.x > a && k.x < b) knots.push_back(k.x);
  for (const auto& k : h.knots())
    if (k.x > a && k.x < b) knots.push_back(k.x);
  const auto partition = refine_partition(std::move(knots), refine);
  return rs_integral([&](double z) { return g(z); }, [&](double z) { return h(z); }, partition);
}

std::vector<double> geometric_partition(double start, double end, int per_decade, std::span<const double> extra) {
  if (!(start > 0.0 && end > start)) throw DomainError("geometric partition needs 0 < start < end");
  const double ratio = std::pow(10.0, 1.0 / per_decade);
  std::vector<double> pts;
  for (double z = start; z < end; z *= ratio) pts.push_back(z);
  pts.push_back(end);
  for (double z : extra)
    if (z > start && z < end) pts.push_back(z);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

PowerIntegral envelope_power_integral(const MonotoneCurve& H, const std::function<double(double)>& h,
                                      std::span<const double> h_knots, double r, int refine) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("power r must lie in (0, 1)");
  auto g = [&](double z) {
    const double v = H(z);
    return v > 0.0 ? std::pow(v, -r) : kInf;
  };
  std::vector<double> extra(h_knots.begin(), h_knots.end());
  for (const auto& k : H.knots()) extra.push_back(k.x);
  PowerIntegral out{{0.0, 0.0}, {}, {}};
  for (double delta = 1e-2; delta >= 1e-12 * 0.999; delta *= 1e-2) {
    auto partition = geometric_partition(delta, 0.5, 2000, extra);
    partition = refine_partition(std::move(partition), refine);
    out.sums = rs_integral(g, h, partition);
    out.deltas.push_back(delta);
    out.lower_by_delta.push_back(out.sums.lower);
  }
  return out;
}

PowerIntegral envelope_power_integral(const EnvelopeCdf& env, double r, int refine) {
  std::vector<double> knots;
  for (const auto& j : env.h.jumps()) knots.push_back(j.x);
  return envelope_power_integral(env.H, [&](double z) { return env.h(z); }, knots, r, refine);
}

}  // namespace advsurr
