#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "advsurr/attack.hpp"
#include "advsurr/conditional_risk.hpp"
#include "advsurr/envelope.hpp"
#include "advsurr/loss.hpp"
#include "advsurr/monotone_curve.hpp"

namespace advsurr {

enum class BoundKind { massart_linear, massart_slack, concave, concave_atom, nonadv_linear, proto_r, general_concave };

[[nodiscard]] std::string to_string(BoundKind kind);

// Upper bound on the classification excess as a function of the surrogate
// excess z >= 0.
class BoundSpec {
 public:
  BoundSpec(BoundKind kind, std::string loss, std::function<double(double)> curve, double additive_offset);

  [[nodiscard]] double operator()(double z) const;  // curve(max(z, 0)) + offset
  [[nodiscard]] double curve(double z) const { return curve_(z); }

  [[nodiscard]] BoundKind kind() const { return kind_; }
  [[nodiscard]] const std::string& loss() const { return loss_; }
  [[nodiscard]] double additive_offset() const { return offset_; }

  std::optional<double> alpha;
  std::optional<double> constant;              // slope of the linear kinds
  std::optional<double> conjectured_constant;  // (1/2 + alpha) times the proof constant
  std::optional<double> r;

  // Knots of the curve part on [0, z_max] for export.
  [[nodiscard]] MonotoneCurve tabulate(double z_max, int points = 257) const;

 private:
  BoundKind kind_;
  std::string loss_;
  std::function<double(double)> curve_;
  double offset_;
};

struct MassartConstants {
  double proof;        // 1 / (phi(0) - C*(1/2 - alpha))
  double conjectured;  // (1/2 + alpha) / (phi(0) - C*(1/2 - alpha))
};

[[nodiscard]] MassartConstants massart_constant(const Loss& loss, double alpha, double tol = kDefaultTol);

// z -> constant * z.
[[nodiscard]] BoundSpec massart_bound(const Loss& loss, double alpha, double tol = kDefaultTol);

// eta_tol shrinks the strict inequality |eta* - 1/2| < alpha so that values
// equal to 1/2 +- alpha up to round-off are not counted.
[[nodiscard]] double massart_offset_mass(const AttackPair& attack, double alpha, double eta_tol = 1e-9);

// z -> constant * z + (1/2 + alpha) * P*(|eta* - 1/2| < alpha).
[[nodiscard]] BoundSpec massart_bound_with_slack(const Loss& loss, double alpha, const AttackPair& attack,
                                                 double tol = kDefaultTol);

// Running maximum of z -> 4 (L(z) + min(1, sqrt(-e H(L) ln H(L)))) with
// L(z) = psi^{-1}(min(z / 4, phi(0))).
[[nodiscard]] BoundSpec phi_tilde(const Loss& loss, const EnvelopeCdf& env, const PsiTransform& psi_table,
                                  double tol = kDefaultTol);
[[nodiscard]] BoundSpec phi_tilde(const Loss& loss, const EnvelopeCdf& env, double tol = kDefaultTol);

// phi_tilde on a strict envelope plus the atom mass / 2.
[[nodiscard]] BoundSpec phi_tilde_with_atom(const Loss& loss, const EnvelopeCdf& strict_env,
                                            const PsiTransform& psi_table, double tol = kDefaultTol);
[[nodiscard]] BoundSpec phi_tilde_with_atom(const Loss& loss, const EnvelopeCdf& strict_env,
                                            double tol = kDefaultTol);

// z -> 4 sqrt(H(L(z/4) / 2)^r / (1 - r)) + 2 L(z/2), L(z) = psi^{-1}(min(z, phi(0))).
[[nodiscard]] BoundSpec proto_bound_r(const Loss& loss, const EnvelopeCdf& env, const PsiTransform& psi_table,
                                      double r);
[[nodiscard]] BoundSpec proto_bound_r(const Loss& loss, const EnvelopeCdf& env, double r);

struct ROptimum {
  double value;
  double r;
};

// min over r in [0, 1) of a^r / (1 - r).
[[nodiscard]] ROptimum optimize_r(double a);

// Non-adversarial Massart slope, same formula as massart_constant.
[[nodiscard]] double prop4_bound(const Loss& loss, double alpha, double tol = kDefaultTol);
[[nodiscard]] BoundSpec prop4_bound_spec(const Loss& loss, double alpha, double tol = kDefaultTol);

// z -> 4 sqrt(K G(z/4)) + 2 Phi(z/2) for concave nondecreasing G, Phi.
[[nodiscard]] BoundSpec general_concave_bound(const MonotoneCurve& phi_curve, const MonotoneCurve& g_curve, double k,
                                              double concavity_tol = 1e-9);

// true when every consecutive knot triple has non-increasing slopes (up to tol).
[[nodiscard]] bool is_concave(const std::vector<Knot>& knots, double tol = 1e-9);

}  // namespace advsurr
