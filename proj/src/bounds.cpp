#include "advsurr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "csv_util.hpp"

namespace advsurr {

namespace {

std::string num(double v) { return detail::format_number(v); }

void require_half_degenerate(const Loss& loss, double tol) {
  const double at_half = min_conditional_risk(loss, 0.5);
  if (at_half < loss.value_at_zero() - tol)
    throw PreconditionError("bound needs C*(1/2) = phi(0); " + loss.name() + " has C*(1/2) = " + num(at_half) +
                            " < phi(0) = " + num(loss.value_at_zero()));
}

// sqrt(-e H ln H), zero at H = 0 and H = 1.
double entropy_term(double h) {
  if (h <= 0.0 || h >= 1.0) return 0.0;
  return std::sqrt(-std::numbers::e * h * std::log(h));
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::massart_linear: return "massart_linear";
    case BoundKind::massart_slack: return "massart_slack";
    case BoundKind::concave: return "concave";
    case BoundKind::concave_atom: return "concave_atom";
    case BoundKind::nonadv_linear: return "nonadv_linear";
    case BoundKind::proto_r: return "proto_r";
    case BoundKind::general_concave: return "general_concave";
  }
  return "unknown";
}

BoundSpec::BoundSpec(BoundKind kind, std::string loss, std::function<double(double)> curve, double additive_offset)
    : kind_(kind), loss_(std::move(loss)), curve_(std::move(curve)), offset_(additive_offset) {}

double BoundSpec::operator()(double z) const { return curve_(std::max(z, 0.0)) + offset_; }

MonotoneCurve BoundSpec::tabulate(double z_max, int points) const {
  std::vector<Knot> knots;
  for (int i = 0; i < points; ++i) {
    const double z = z_max * i / (points - 1);
    knots.push_back({z, curve_(z)});
  }
  return MonotoneCurve::from_samples(std::move(knots), Direction::nondecreasing);
}

MassartConstants massart_constant(const Loss& loss, double alpha, double tol) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw DomainError("Massart margin alpha must lie in [0, 1/2]");
  ScoreSearch search;
  search.tol = tol;
  const double margin = loss.value_at_zero() - min_conditional_risk(loss, 0.5 - alpha, search);
  if (!(margin > tol))
    throw PreconditionError("degenerate Massart bound: needs C*(1/2 - alpha) < phi(0), got margin " + num(margin));
  return {1.0 / margin, (0.5 + alpha) / margin};
}

BoundSpec massart_bound(const Loss& loss, double alpha, double tol) {
  const auto c = massart_constant(loss, alpha, tol);
  BoundSpec spec(BoundKind::massart_linear, loss.name(), [k = c.proof](double z) { return k * z; }, 0.0);
  spec.alpha = alpha;
  spec.constant = c.proof;
  spec.conjectured_constant = c.conjectured;
  return spec;
}

double massart_offset_mass(const AttackPair& attack, double alpha, double eta_tol) {
  double mass = 0.0;
  for (std::size_t k = 0; k < attack.attacked.size(); ++k) {
    const double eta = attack.eta_star[k];
    if (std::isnan(eta)) continue;
    if (std::abs(eta - 0.5) < alpha - eta_tol) mass += attack.attacked.node_mass(k);
  }
  return mass;
}

BoundSpec massart_bound_with_slack(const Loss& loss, double alpha, const AttackPair& attack, double tol) {
  const auto c = massart_constant(loss, alpha, tol);
  const double offset = (0.5 + alpha) * massart_offset_mass(attack, alpha);
  BoundSpec spec(BoundKind::massart_slack, loss.name(), [k = c.proof](double z) { return k * z; }, offset);
  spec.alpha = alpha;
  spec.constant = c.proof;
  spec.conjectured_constant = c.conjectured;
  return spec;
}

namespace {

struct TildeCurve {
  std::shared_ptr<const PsiTransform> psi;
  MonotoneCurve H;
  double phi0;
  std::vector<double> knots;
  std::vector<double> prefix_max;

  double literal(double z) const {
    const double lam = psi->inverse(std::min(z / 4.0, phi0));
    return 4.0 * (lam + std::min(1.0, entropy_term(H(lam))));
  }
  double operator()(double z) const {
    auto it = std::upper_bound(knots.begin(), knots.end(), z);
    const double before = it == knots.begin() ? 0.0 : prefix_max[static_cast<std::size_t>(it - knots.begin()) - 1];
    return std::max(literal(z), before);
  }
};

BoundSpec build_tilde(BoundKind kind, const Loss& loss, const EnvelopeCdf& env, const PsiTransform& psi_table,
                      double offset) {
  auto curve = std::make_shared<TildeCurve>(
      TildeCurve{std::make_shared<const PsiTransform>(psi_table), env.H, loss.value_at_zero(), {}, {}});
  // knots densified geometrically near 0, where the entropy term is steep
  const double z_max = 4.0 * loss.value_at_zero();
  std::vector<double> knots{0.0};
  for (double z = 1e-12 * z_max; z < z_max; z *= std::pow(10.0, 1.0 / 64)) knots.push_back(z);
  for (int i = 1; i <= 1024; ++i) knots.push_back(z_max * i / 1024);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double running = 0.0;
  for (double z : knots) {
    running = std::max(running, curve->literal(z));
    curve->prefix_max.push_back(running);
  }
  curve->knots = std::move(knots);
  return BoundSpec(kind, loss.name(), [curve](double z) { return (*curve)(z); }, offset);
}

}  // namespace

BoundSpec phi_tilde(const Loss& loss, const EnvelopeCdf& env, const PsiTransform& psi_table, double tol) {
  require_half_degenerate(loss, tol);
  const double atom_limit = 4.0 * env.spacing * env.total_mass;
  if (!env.strict && env.atom_at_half > atom_limit)
    throw PreconditionError("concave bound needs P*(eta* = 1/2) = 0; the attack carries " + num(env.atom_at_half) +
                            " there (limit " + num(atom_limit) + "), use the atom-corrected bound");
  return build_tilde(BoundKind::concave, loss, env, psi_table, 0.0);
}

BoundSpec phi_tilde(const Loss& loss, const EnvelopeCdf& env, double tol) {
  return phi_tilde(loss, env, PsiTransform(loss), tol);
}

BoundSpec phi_tilde_with_atom(const Loss& loss, const EnvelopeCdf& strict_env, const PsiTransform& psi_table,
                              double tol) {
  if (!strict_env.strict) throw PreconditionError("atom-corrected bound needs an envelope built with strict = true");
  require_half_degenerate(loss, tol);
  return build_tilde(BoundKind::concave_atom, loss, strict_env, psi_table, strict_env.atom_at_half / 2.0);
}

BoundSpec phi_tilde_with_atom(const Loss& loss, const EnvelopeCdf& strict_env, double tol) {
  return phi_tilde_with_atom(loss, strict_env, PsiTransform(loss), tol);
}

BoundSpec proto_bound_r(const Loss& loss, const EnvelopeCdf& env, const PsiTransform& psi_table, double r) {
  if (!(r > 0.0 && r < 1.0)) throw DomainError("r must lie in (0, 1), got " + num(r));
  auto psi = std::make_shared<const PsiTransform>(psi_table);
  const double phi0 = loss.value_at_zero();
  auto lambda = [psi, phi0](double z) { return psi->inverse(std::min(z, phi0)); };
  BoundSpec spec(
      BoundKind::proto_r, loss.name(),
      [lambda, H = env.H, r](double z) {
        const double h = H(0.5 * lambda(z / 4.0));
        return 4.0 * std::sqrt(std::pow(h, r) / (1.0 - r)) + 2.0 * lambda(z / 2.0);
      },
      0.0);
  spec.r = r;
  return spec;
}

BoundSpec proto_bound_r(const Loss& loss, const EnvelopeCdf& env, double r) {
  return proto_bound_r(loss, env, PsiTransform(loss), r);
}

ROptimum optimize_r(double a) {
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("optimize_r needs a in (0, 1], got " + num(a));
  if (a > std::exp(-1.0)) return {1.0, 0.0};
  const double la = std::log(a);
  return {-std::numbers::e * a * la, 1.0 + 1.0 / la};
}

double prop4_bound(const Loss& loss, double alpha, double tol) { return massart_constant(loss, alpha, tol).proof; }

BoundSpec prop4_bound_spec(const Loss& loss, double alpha, double tol) {
  const auto c = massart_constant(loss, alpha, tol);
  BoundSpec spec(BoundKind::nonadv_linear, loss.name(), [k = c.proof](double z) { return k * z; }, 0.0);
  spec.alpha = alpha;
  spec.constant = c.proof;
  spec.conjectured_constant = c.conjectured;
  return spec;
}

bool is_concave(const std::vector<Knot>& knots, double tol) {
  for (std::size_t i = 2; i < knots.size(); ++i) {
    const double s1 = (knots[i - 1].y - knots[i - 2].y) / (knots[i - 1].x - knots[i - 2].x);
    const double s2 = (knots[i].y - knots[i - 1].y) / (knots[i].x - knots[i - 1].x);
    if (s2 > s1 + tol) return false;
  }
  return true;
}

BoundSpec general_concave_bound(const MonotoneCurve& phi_curve, const MonotoneCurve& g_curve, double k,
                                double concavity_tol) {
  if (!(k > 0.0)) throw PreconditionError("general concave bound needs K > 0");
  if (phi_curve.direction() != Direction::nondecreasing || g_curve.direction() != Direction::nondecreasing)
    throw PreconditionError("general concave bound needs nondecreasing Phi and G");
  if (!is_concave(phi_curve.knots(), concavity_tol)) throw PreconditionError("Phi is not concave on its knots");
  if (!is_concave(g_curve.knots(), concavity_tol)) throw PreconditionError("G is not concave on its knots");
  if (std::abs(g_curve(0.0)) > concavity_tol) throw PreconditionError("general concave bound needs G(0) = 0");
  return BoundSpec(
      BoundKind::general_concave, "custom",
      [phi = phi_curve, g = g_curve, k](double z) { return 4.0 * std::sqrt(k * g(z / 4.0)) + 2.0 * phi(z / 2.0); },
      0.0);
}

}  // namespace advsurr
