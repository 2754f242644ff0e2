#include "advsurr/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "advsurr/risk.hpp"
#include "csv_util.hpp"

namespace advsurr {

namespace {

AttackPair make_pair(const GridDistribution& d, GridDistribution attacked, double shift1, double shift0, double eps) {
  GridFunction eta = eta_field(attacked);
  return AttackPair{d, std::move(attacked), shift1, shift0, std::move(eta), eps};
}

}  // namespace

AttackPair shift_attack(const GridDistribution& d, double eps) {
  const std::size_t w = aligned_radius(d.grid(), eps);
  const std::size_t n = d.size();
  std::vector<double> m0(n, 0.0), m1(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (d.mass1()[k] > 0.0) {
      if (k < w) throw CoverageError("class-1 mass within eps of the left grid end; extend the grid by eps");
      m1[k - w] = d.mass1()[k];
    }
    if (d.mass0()[k] > 0.0) {
      if (k + w >= n) throw CoverageError("class-0 mass within eps of the right grid end; extend the grid by eps");
      m0[k + w] = d.mass0()[k];
    }
  }
  return make_pair(d, GridDistribution(d.grid(), std::move(m0), std::move(m1), MassPolicy::unrestricted), -eps, eps,
                   eps);
}

AttackPair identity_attack(const GridDistribution& d, double eps) {
  return make_pair(d, d, 0.0, 0.0, eps);
}

GridFunction extend_nearest(const GridFunction& eta_star) {
  const std::size_t n = eta_star.size();
  std::vector<double> out(eta_star.values());
  std::vector<std::ptrdiff_t> left(n, -1), right(n, -1);
  std::ptrdiff_t last = -1;
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isnan(out[k])) last = static_cast<std::ptrdiff_t>(k);
    left[k] = last;
  }
  last = -1;
  for (std::size_t k = n; k-- > 0;) {
    if (!std::isnan(eta_star[k])) last = static_cast<std::ptrdiff_t>(k);
    right[k] = last;
  }
  if (left[n - 1] < 0) throw DomainError("eta is undefined everywhere");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isnan(eta_star[k])) continue;
    const auto i = static_cast<std::ptrdiff_t>(k);
    if (left[k] < 0) out[k] = eta_star[static_cast<std::size_t>(right[k])];
    else if (right[k] < 0) out[k] = eta_star[static_cast<std::size_t>(left[k])];
    else out[k] = eta_star[static_cast<std::size_t>(i - left[k] <= right[k] - i ? left[k] : right[k])];
  }
  return GridFunction(eta_star.grid(), std::move(out));
}

GridFunction primal_witness(const AttackPair& attack, const Loss& loss, const ScoreSearch& search) {
  const GridFunction eta = extend_nearest(attack.eta_star);
  std::unordered_map<double, double> memo;
  std::vector<double> f(eta.size());
  for (std::size_t k = 0; k < eta.size(); ++k) {
    auto it = memo.find(eta[k]);
    if (it == memo.end()) it = memo.emplace(eta[k], smallest_minimizer(loss, eta[k], search)).first;
    f[k] = it->second;
  }
  return GridFunction(eta.grid(), std::move(f));
}

SlacknessReport check_complementary_slackness(const GridDistribution& d, const Loss& loss, const GridFunction& f_star,
                                              const AttackPair& attack, double tol, double kappa) {
  check_feasibility(d, attack.attacked, attack.eps);
  ScoreSearch search;
  search.tol = tol;
  auto only = [](const GridDistribution& g, int label) {
    std::vector<double> zero(g.size(), 0.0);
    return label == 0 ? GridDistribution(g.grid(), g.mass0(), zero, MassPolicy::unrestricted)
                      : GridDistribution(g.grid(), zero, g.mass1(), MassPolicy::unrestricted);
  };
  double gap = 0.0;
  for (int label = 0; label < 2; ++label) {
    if ((label == 0 ? d.total0() : d.total1()) == 0.0) continue;
    const double lhs = adv_surrogate_risk(only(d, label), loss, f_star, attack.eps);
    const double rhs = surrogate_risk(only(attack.attacked, label), loss, f_star);
    const double diff = std::abs(lhs - rhs);
    gap += std::isnan(diff) ? kInf : diff;
  }

  const std::ptrdiff_t s = node_offset(f_star.grid(), attack.attacked.grid());
  std::unordered_map<double, double> c_star;
  double worst = 0.0;
  for (std::size_t k = 0; k < attack.attacked.size(); ++k) {
    const double eta = attack.eta_star[k];
    if (std::isnan(eta)) continue;
    auto it = c_star.find(eta);
    if (it == c_star.end()) it = c_star.emplace(eta, min_conditional_risk(loss, eta, search)).first;
    const double f = f_star[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + s)];
    const double excess = conditional_risk(loss, eta, f) - it->second;
    worst = std::max(worst, std::isnan(excess) ? kInf : excess);
  }
  const double slack = slack_budget(d, kappa);
  return {gap, worst, slack, gap <= tol + slack && worst <= tol + slack};
}

ExampleKind parse_example_kind(const std::string& name) {
  if (name == "realizable") return ExampleKind::realizable;
  if (name == "massart") return ExampleKind::massart;
  if (name == "gaussian") return ExampleKind::gaussian;
  throw ParseError("unknown example '" + name + "' (expected realizable, massart or gaussian)");
}

std::string to_string(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::realizable: return "realizable";
    case ExampleKind::massart: return "massart";
    case ExampleKind::gaussian: return "gaussian";
  }
  return "unknown";
}

namespace {

std::string num(double v) { return detail::format_number(v); }

// Node index range [first, last] (relative to origin) covering [a, b].
std::pair<long long, long long> node_range(double a, double b, const GridSpec& g) {
  const auto first = static_cast<long long>(std::floor((a - g.origin) / g.spacing + 0.5));
  const auto last = static_cast<long long>(std::ceil((b - g.origin) / g.spacing - 0.5));
  return {first, last};
}

double cell_overlap(double x, double h, double a, double b) {
  return std::max(0.0, std::min(x + 0.5 * h, b) - std::max(x - 0.5 * h, a));
}

void scale_to(std::vector<double>& m, double target) {
  double total = 0.0;
  for (double v : m) total += v;
  if (total > 0.0)
    for (double& v : m) v *= target / total;
}

}  // namespace

GridDistribution make_example(ExampleKind kind, const ExampleParams& p, const GridSpec& spec) {
  if (!(spec.spacing > 0.0)) throw DomainError("grid spacing must be positive");
  if (!(p.eps >= 0.0)) throw DomainError("eps must be nonnegative");
  const double pad = spec.pad < 0.0 ? p.eps : spec.pad;
  double lo = 0.0, hi = 0.0;
  if (kind == ExampleKind::gaussian) {
    if (!(p.sigma > 0.0)) throw DomainError("gaussian example needs sigma > 0 (got " + num(p.sigma) + ")");
    if (!(p.mu1 > p.mu0)) throw DomainError("gaussian example needs mu1 > mu0");
    if (p.require_concavity) {
      if (!(p.mu0 + 2.0 * p.eps < p.mu1))
        throw DomainError("gaussian example needs mu0 + 2 eps < mu1 (" + num(p.mu0 + 2.0 * p.eps) + " >= " + num(p.mu1) + ")");
      if (!(p.mu1 < p.mu0 + std::numbers::sqrt2 * p.sigma))
        throw DomainError("gaussian example needs mu1 < mu0 + sqrt(2) sigma (" + num(p.mu1) + " >= " +
                          num(p.mu0 + std::numbers::sqrt2 * p.sigma) + ")");
    }
    lo = p.mu0 - 8.0 * p.sigma;
    hi = p.mu1 + 8.0 * p.sigma;
  } else {
    if (!(p.delta > 0.0)) throw DomainError("example needs delta > 0 (got " + num(p.delta) + ")");
    lo = -1.0 - p.delta;
    hi = 1.0 + p.delta;
  }
  const auto [first, last] = node_range(lo, hi, spec);
  const Grid probe(spec.origin, spec.spacing, 1);
  const auto w = static_cast<long long>(aligned_radius(probe, pad));
  const long long k0 = first - w;
  const auto count = static_cast<std::size_t>(last - first + 1 + 2 * w);
  const Grid grid(spec.origin + static_cast<double>(k0) * spec.spacing, spec.spacing, count);

  std::vector<double> m0(count, 0.0), m1(count, 0.0);
  const double h = spec.spacing;
  const double a_left = -1.0 - p.delta, b_left = -p.delta;
  const double a_right = p.delta, b_right = 1.0 + p.delta;
  for (std::size_t k = 0; k < count; ++k) {
    const double x = grid.node(k);
    switch (kind) {
      case ExampleKind::realizable:
        m0[k] = cell_overlap(x, h, a_left, b_left);
        m1[k] = cell_overlap(x, h, a_right, b_right);
        break;
      case ExampleKind::massart: {
        const double left = cell_overlap(x, h, a_left, b_left);
        const double right = cell_overlap(x, h, a_right, b_right);
        m1[k] = 0.25 * left + 0.75 * right;
        m0[k] = 0.75 * left + 0.25 * right;
        break;
      }
      case ExampleKind::gaussian: {
        auto density = [&](double mu) {
          const double t = (x - mu) / p.sigma;
          return std::abs(t) <= 8.0 ? std::exp(-0.5 * t * t) : 0.0;
        };
        m0[k] = density(p.mu0);
        m1[k] = density(p.mu1);
        break;
      }
    }
  }
  if (kind == ExampleKind::massart) {
    // normalize the marginal so eta stays exactly 1/4 and 3/4
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) total += m0[k] + m1[k];
    for (std::size_t k = 0; k < count; ++k) {
      m0[k] /= total;
      m1[k] /= total;
    }
  } else {
    scale_to(m0, 0.5);
    scale_to(m1, 0.5);
  }
  return GridDistribution(grid, std::move(m0), std::move(m1));
}

AttackPair example_attack(ExampleKind kind, const ExampleParams& params, const GridDistribution& d) {
  switch (kind) {
    case ExampleKind::realizable: return identity_attack(d, params.eps);
    case ExampleKind::massart:
      return params.eps <= params.delta ? identity_attack(d, params.eps) : shift_attack(d, params.eps);
    case ExampleKind::gaussian: return shift_attack(d, params.eps);
  }
  return identity_attack(d, params.eps);
}

double delta_of_z(double mu0, double mu1, double sigma, double z) {
  if (!(mu1 > mu0)) throw DomainError("delta_of_z needs mu1 > mu0");
  if (!(sigma > 0.0)) throw DomainError("delta_of_z needs sigma > 0");
  if (!(z >= 0.0)) throw DomainError("delta_of_z needs z >= 0");
  if (z >= 0.5) throw DomainError("delta_of_z diverges for z >= 1/2");
  return sigma * sigma / (mu1 - mu0) * std::log((0.5 + z) / (0.5 - z));
}

LowerBoundReport lower_bound_sequence(const Loss& loss, double alpha, long long n, double eps, double spacing,
                                      const ScoreSearch& search) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw DomainError("alpha must lie in [0, 1/2]");
  if (n < 1) throw DomainError("n must be positive");
  const double phi0 = loss.value_at_zero();
  const double at_half = min_conditional_risk(loss, 0.5, search);
  if (at_half < phi0 - search.tol)
    throw PreconditionError("lower-bound sequence needs C*(1/2) = phi(0); " + loss.name() + " has C*(1/2) = " +
                            num(at_half) + " < phi(0) = " + num(phi0));
  const double margin = phi0 - min_conditional_risk(loss, 0.5 - alpha, search);
  if (!(margin > search.tol))
    throw PreconditionError("lower-bound sequence needs C*(1/2 - alpha) < phi(0)");
  const Grid probe(0.0, spacing, 1);
  const std::size_t w = aligned_radius(probe, eps);
  if (w == 0) throw DomainError("lower-bound sequence needs eps > 0");
  const Grid grid(-static_cast<double>(w) * spacing, spacing, 2 * w + 1);
  std::vector<double> m0(grid.count, 0.0), m1(grid.count, 0.0);
  m1[w] = 0.5 + alpha;
  m0[w] = 0.5 - alpha;
  const GridDistribution d(grid, std::move(m0), std::move(m1));
  std::vector<double> f(grid.count, 1.0 / static_cast<double>(n));
  f[w] = -1.0 / static_cast<double>(n);
  const GridFunction fn(grid, std::move(f));

  const double class_opt = optimal_adv_classification_risk(d, eps).value;
  const double surr_opt = dual_surrogate_objective(d, loss, search).value;
  const double class_excess = adv_classification_risk(d, fn, eps) - class_opt;
  const double surr_excess = adv_surrogate_risk(d, loss, fn, eps) - surr_opt;
  return LowerBoundReport{n, class_excess, surr_excess, class_excess / surr_excess, (0.5 + alpha) / margin,
                          1.0 / margin};
}

}  // namespace advsurr
