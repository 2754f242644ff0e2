#include "advsurr/risk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "csv_util.hpp"

namespace advsurr {

namespace {

// Offset of d inside f's grid, after checking every mass node +- w is covered.
std::ptrdiff_t covering_offset(const GridFunction& f, const GridDistribution& d, std::size_t w) {
  const std::ptrdiff_t s = node_offset(f.grid(), d.grid());
  const auto count = static_cast<std::ptrdiff_t>(f.size());
  const auto radius = static_cast<std::ptrdiff_t>(w);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.node_mass(k) == 0.0) continue;
    const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(k) + s;
    if (idx - radius < 0 || idx + radius >= count)
      throw CoverageError("classifier grid does not cover x = " + detail::format_number(d.grid().node(k)) +
                          " padded by " + std::to_string(w) + " nodes");
  }
  return s;
}

GridFunction compose(const Loss& loss, const GridFunction& f, double sign) {
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (std::isnan(f[k])) throw DomainError("classifier value undefined at node " + std::to_string(k));
    out[k] = loss(sign * f[k]);
  }
  return GridFunction(f.grid(), std::move(out));
}

// sum_k mass1[k] * g1[k + s] + mass0[k] * g0[k + s]
double pair_integral(const GridDistribution& d, const GridFunction& g0, const GridFunction& g1, std::ptrdiff_t s) {
  double total = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto idx = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + s);
    if (d.mass1()[k] != 0.0) total += weighted(d.mass1()[k], g1[idx]);
    if (d.mass0()[k] != 0.0) total += weighted(d.mass0()[k], g0[idx]);
  }
  return total;
}

class CStarCache {
 public:
  CStarCache(const Loss& loss, const ScoreSearch& search) : loss_(loss), search_(search) {}
  double operator()(double eta) {
    auto it = cache_.find(eta);
    if (it != cache_.end()) return it->second;
    const double v = min_conditional_risk(loss_, eta, search_);
    cache_.emplace(eta, v);
    return v;
  }

 private:
  const Loss& loss_;
  ScoreSearch search_;
  std::unordered_map<double, double> cache_;
};

}  // namespace

double surrogate_risk(const GridDistribution& d, const Loss& loss, const GridFunction& f) {
  return adv_surrogate_risk(d, loss, f, 0.0);
}

double classification_risk(const GridDistribution& d, const GridFunction& f) {
  return adv_classification_risk(d, f, 0.0);
}

double adv_surrogate_risk(const GridDistribution& d, const Loss& loss, const GridFunction& f, double eps) {
  const std::size_t w = aligned_radius(f.grid(), eps);
  const std::ptrdiff_t s = covering_offset(f, d, w);
  const GridFunction g1 = sup_ball(compose(loss, f, 1.0), eps);
  const GridFunction g0 = sup_ball(compose(loss, f, -1.0), eps);
  return pair_integral(d, g0, g1, s);
}

double adv_classification_risk(const GridDistribution& d, const GridFunction& f, double eps) {
  const std::size_t w = aligned_radius(f.grid(), eps);
  const std::ptrdiff_t s = covering_offset(f, d, w);
  const Indicators ind = threshold_indicators(f);
  // class 1 errs where f <= 0, class 0 where f > 0
  return pair_integral(d, sup_ball(ind.positive, eps), sup_ball(ind.nonpositive, eps), s);
}

GridFunction eta_field(const GridDistribution& d) {
  std::vector<double> eta(d.size(), std::nan(""));
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double m = d.node_mass(k);
    if (m > 0.0) eta[k] = d.mass1()[k] / m;
  }
  return GridFunction(d.grid(), std::move(eta));
}

DualReport dual_surrogate_objective(const GridDistribution& attack, const Loss& loss, const ScoreSearch& search) {
  GridFunction eta = eta_field(attack);
  CStarCache c_star(loss, search);
  double value = 0.0;
  for (std::size_t k = 0; k < attack.size(); ++k) {
    if (std::isnan(eta[k])) continue;
    value += weighted(attack.node_mass(k), c_star(eta[k]));
  }
  return DualReport{value, std::nullopt, std::move(eta)};
}

DualReport dual_classification_objective(const GridDistribution& attack) {
  double value = 0.0;
  for (std::size_t k = 0; k < attack.size(); ++k) value += std::min(attack.mass0()[k], attack.mass1()[k]);
  return DualReport{value, std::nullopt, eta_field(attack)};
}

std::vector<WeightedAtom> class_atoms(const GridDistribution& d, int label) {
  std::vector<WeightedAtom> atoms;
  for (std::size_t k = 0; k < d.size(); ++k)
    if (d.mass(label, k) > 0.0) atoms.push_back({d.grid().node(k), d.mass(label, k)});
  return atoms;
}

double w_infinity_1d(std::span<const WeightedAtom> a, std::span<const WeightedAtom> b, double mass_tol) {
  auto prepare = [](std::span<const WeightedAtom> in) {
    std::vector<WeightedAtom> out;
    for (const auto& atom : in) {
      if (!(atom.mass >= 0.0)) throw DomainError("negative atom mass");
      if (atom.mass > 0.0) out.push_back(atom);
    }
    std::stable_sort(out.begin(), out.end(), [](const WeightedAtom& p, const WeightedAtom& q) { return p.x < q.x; });
    return out;
  };
  const auto qa = prepare(a);
  const auto qb = prepare(b);
  double ta = 0.0, tb = 0.0;
  for (const auto& p : qa) ta += p.mass;
  for (const auto& p : qb) tb += p.mass;
  const double scale = std::max({1.0, ta, tb});
  if (std::abs(ta - tb) > mass_tol * scale)
    throw FeasibilityError("W-infinity between measures of different mass (" + detail::format_number(ta) + " vs " +
                           detail::format_number(tb) + ")");
  if (qa.empty() || qb.empty()) return 0.0;
  const double slab_tol = 1e-3 * mass_tol * scale;
  double worst = 0.0;
  std::size_t i = 0, j = 0;
  double ra = qa[0].mass, rb = qb[0].mass;
  while (i < qa.size() && j < qb.size()) {
    const double t = std::min(ra, rb);
    if (t > slab_tol) worst = std::max(worst, std::abs(qa[i].x - qb[j].x));
    ra -= t;
    rb -= t;
    if (ra <= slab_tol && ++i < qa.size()) ra += qa[i].mass;
    if (rb <= slab_tol && ++j < qb.size()) rb += qb[j].mass;
  }
  return worst;
}

Feasibility check_feasibility(const GridDistribution& source, const GridDistribution& attack, double eps) {
  Feasibility out{};
  out.eps = eps;
  for (int label = 0; label < 2; ++label) {
    const auto src = class_atoms(source, label);
    const auto att = class_atoms(attack, label);
    const double dist = w_infinity_1d(att, src);
    (label == 0 ? out.dist0 : out.dist1) = dist;
    const double allowed = eps + 1e-9 * std::max(1.0, eps);
    if (dist > allowed)
      throw FeasibilityError("class-" + std::to_string(label) + " attack moves mass " + detail::format_number(dist) +
                             " > eps = " + detail::format_number(eps));
  }
  return out;
}

double duality_gap(const GridDistribution& d, const Loss& loss, const GridFunction& f, const GridDistribution& attack,
                   double eps, const ScoreSearch& search) {
  check_feasibility(d, attack, eps);
  return adv_surrogate_risk(d, loss, f, eps) - dual_surrogate_objective(attack, loss, search).value;
}

double slack_budget(const GridDistribution& d, double kappa) {
  return kappa * d.grid().spacing * d.total_mass();
}

namespace {

struct Atom {
  int label;
  double mass;
  std::size_t first;  // candidate lattice indices [first, last]
  std::size_t last;
};

// Enumerates whole-atom moves; node_value(m0, m1) scores one lattice node.
template <typename NodeValue>
BruteForceResult enumerate_moves(const GridDistribution& d, double eps, const Grid& lattice,
                                 const BruteForceOptions& options, NodeValue&& node_value) {
  const std::size_t w = aligned_radius(lattice, eps);
  const std::ptrdiff_t s = node_offset(lattice, d.grid());
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (int label = 0; label < 2; ++label) {
      const double m = d.mass(label, k);
      if (m == 0.0) continue;
      const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(k) + s;
      if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(lattice.count))
        throw CoverageError("lattice does not contain x = " + detail::format_number(d.grid().node(k)));
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, idx - static_cast<std::ptrdiff_t>(w));
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(lattice.count) - 1,
                                                         idx + static_cast<std::ptrdiff_t>(w));
      atoms.push_back({label, m, static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)});
    }
  }
  if (atoms.size() > options.max_atoms)
    throw SizeError("brute force over " + std::to_string(atoms.size()) + " atoms exceeds the limit of " +
                    std::to_string(options.max_atoms));
  double configs = 1.0;
  for (const auto& a : atoms) configs *= static_cast<double>(a.last - a.first + 1);
  if (configs > static_cast<double>(options.max_configurations))
    throw SizeError("brute force needs " + detail::format_number(configs) + " configurations, limit is " +
                    std::to_string(options.max_configurations));

  std::vector<std::size_t> pos(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) pos[i] = atoms[i].first;
  std::vector<std::pair<double, std::vector<std::size_t>>> best_configs;
  double best = -kInf;
  std::size_t visited = 0;
  std::vector<std::size_t> order(atoms.size());
  while (true) {
    ++visited;
    // group atoms by lattice node
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pos[a] < pos[b]; });
    double value = 0.0;
    for (std::size_t i = 0; i < order.size();) {
      double m0 = 0.0, m1 = 0.0;
      std::size_t j = i;
      for (; j < order.size() && pos[order[j]] == pos[order[i]]; ++j)
        (atoms[order[j]].label == 0 ? m0 : m1) += atoms[order[j]].mass;
      value += node_value(m0, m1);
      i = j;
    }
    if (value > best + options.tie_tol) {
      std::erase_if(best_configs, [&](const auto& entry) { return entry.first < value - options.tie_tol; });
    }
    if (value >= best - options.tie_tol) best_configs.emplace_back(value, pos);
    best = std::max(best, value);
    std::size_t i = 0;
    for (; i < pos.size(); ++i) {
      if (pos[i] < atoms[i].last) {
        ++pos[i];
        break;
      }
      pos[i] = atoms[i].first;
    }
    if (i == pos.size()) break;
  }
  std::erase_if(best_configs, [&](const auto& entry) { return entry.first < best - options.tie_tol; });
  // best configuration first
  std::stable_sort(best_configs.begin(), best_configs.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  auto materialize = [&](const std::vector<std::size_t>& cfg) {
    std::vector<double> m0(lattice.count, 0.0), m1(lattice.count, 0.0);
    for (std::size_t i = 0; i < cfg.size(); ++i) (atoms[i].label == 0 ? m0 : m1)[cfg[i]] += atoms[i].mass;
    return GridDistribution(lattice, std::move(m0), std::move(m1), MassPolicy::unrestricted);
  };
  std::vector<GridDistribution> maximizers;
  maximizers.reserve(best_configs.size());
  for (const auto& entry : best_configs) maximizers.push_back(materialize(entry.second));
  GridDistribution attack = maximizers.front();
  DualReport report{best, check_feasibility(d, attack, eps), eta_field(attack)};
  return BruteForceResult{std::move(report), std::move(attack), std::move(maximizers), visited};
}

}  // namespace

BruteForceResult brute_force_dual(const GridDistribution& d, const Loss& loss, double eps, const Grid& lattice,
                                  const BruteForceOptions& options, const ScoreSearch& search) {
  CStarCache c_star(loss, search);
  auto node_value = [&](double m0, double m1) {
    const double m = m0 + m1;
    return m > 0.0 ? weighted(m, c_star(m1 / m)) : 0.0;
  };
  return enumerate_moves(d, eps, lattice, options, node_value);
}

BruteForceResult brute_force_classification_dual(const GridDistribution& d, double eps, const Grid& lattice,
                                                 const BruteForceOptions& options) {
  return enumerate_moves(d, eps, lattice, options, [](double m0, double m1) { return std::min(m0, m1); });
}

ClassificationOptimum optimal_adv_classification_risk(const GridDistribution& d, double eps) {
  const std::size_t n = d.size();
  const std::size_t w = aligned_radius(d.grid(), eps);
  const auto& m0 = d.mass0();
  const auto& m1 = d.mass1();
  // label 0 means f <= 0 (class 1 errs), label 1 means f > 0 (class 0 errs)
  auto node_cost = [&](std::size_t i, int label, bool both) {
    return both ? m0[i] + m1[i] : (label == 0 ? m1[i] : m0[i]);
  };
  if (w == 0) {
    std::vector<double> labels(n);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = m1[i] > m0[i] ? 1.0 : -1.0;
      value += std::min(m0[i], m1[i]);
    }
    return {value, GridFunction(d.grid(), std::move(labels))};
  }

  // State after deciding node j: (label of j, distance to the nearest earlier
  // node of the other label), distances above 2w collapsed into cap = 2w + 1.
  const std::size_t cap = 2 * w + 1;
  using Row = std::vector<double>;
  std::array<Row, 2> cost{Row(cap + 1, kInf), Row(cap + 1, kInf)};
  cost[0][cap] = cost[1][cap] = 0.0;
  std::vector<std::array<std::uint32_t, 2>> switch_from(n);
  std::vector<std::array<std::uint8_t, 2>> cap_from_cap(n);
  std::array<Row, 2> next{Row(cap + 1, kInf), Row(cap + 1, kInf)};
  for (std::size_t j = 1; j < n; ++j) {
    for (int label = 0; label < 2; ++label) {
      const Row& same = cost[label];
      const Row& other = cost[1 - label];
      Row& out = next[label];
      std::fill(out.begin(), out.end(), kInf);
      std::size_t arg = 1;
      for (std::size_t dist = 2; dist <= cap; ++dist)
        if (other[dist] < other[arg]) arg = dist;
      out[1] = other[arg];
      switch_from[j][label] = static_cast<std::uint32_t>(arg);
      for (std::size_t dist = 2; dist < cap; ++dist) out[dist] = same[dist - 1];
      cap_from_cap[j][label] = same[cap] < same[cap - 1] ? 1 : 0;
      out[cap] = std::min(same[cap], same[cap - 1]);
      if (j >= w) {
        const std::size_t i = j - w;
        for (std::size_t dist = 1; dist <= cap; ++dist)
          if (out[dist] < kInf) out[dist] += node_cost(i, label, dist <= 2 * w);
      }
    }
    std::swap(cost, next);
  }

  // nodes whose window reaches past the last node are charged here
  const std::size_t first_open = n > w ? n - w : 0;
  double best = kInf;
  int best_label = 0;
  std::size_t best_dist = cap;
  for (int label = 0; label < 2; ++label) {
    for (std::size_t dist = 1; dist <= cap; ++dist) {
      if (cost[label][dist] == kInf) continue;
      double total = cost[label][dist];
      for (std::size_t i = first_open; i < n; ++i) total += node_cost(i, label, dist <= (n - 1 - i) + w);
      if (total < best) {
        best = total;
        best_label = label;
        best_dist = dist;
      }
    }
  }

  std::vector<double> labels(n);
  int label = best_label;
  std::size_t dist = best_dist;
  for (std::size_t j = n; j-- > 0;) {
    labels[j] = label == 1 ? 1.0 : -1.0;
    if (j == 0) break;
    if (dist == 1) {
      dist = switch_from[j][label];
      label = 1 - label;
    } else if (dist < cap) {
      --dist;
    } else {
      dist = cap_from_cap[j][label] ? cap : cap - 1;
    }
  }
  return {best, GridFunction(d.grid(), std::move(labels))};
}

}  // namespace advsurr
