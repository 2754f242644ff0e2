#pragma once

#include <vector>

#include "advsurr/loss.hpp"
#include "advsurr/monotone_curve.hpp"

namespace advsurr {

inline constexpr double kDefaultTol = 1e-8;

struct ScoreSearch {
  double tol = kDefaultTol;
  double score_bound = 50.0;  // finite scores searched in [-bound, bound]
  int coarse_points = 2001;
};

// eta * phi(alpha) + (1 - eta) * phi(-alpha).
[[nodiscard]] double conditional_risk(const Loss& loss, double eta, double alpha);

// inf over alpha, including both limits.
[[nodiscard]] double min_conditional_risk(const Loss& loss, double eta, const ScoreSearch& search = {});

// inf over alpha with (2 eta - 1) alpha <= 0, i.e. forcing a wrong sign.
[[nodiscard]] double min_misclassify_risk(const Loss& loss, double eta, const ScoreSearch& search = {});

// Left-most score whose conditional risk is within tol of the minimum;
// -inf / +inf when the minimum is only reached in a limit.
[[nodiscard]] double smallest_minimizer(const Loss& loss, double eta, const ScoreSearch& search = {});

struct ConditionalRiskReport {
  double eta;
  double c_star;
  double c_minus;
  double alpha_min;
  double tol;
};

[[nodiscard]] ConditionalRiskReport conditional_risk_report(const Loss& loss, double eta,
                                                            const ScoreSearch& search = {});

// theta -> phi(0) - C*((1 + theta) / 2) tabulated on [0, 1].
class PsiTransform {
 public:
  explicit PsiTransform(const Loss& loss, int knots = 4097, const ScoreSearch& search = {});

  [[nodiscard]] double operator()(double theta) const { return curve_(theta); }
  // Left-most theta with psi(theta) >= y; y must lie in [0, psi(1)].
  [[nodiscard]] double inverse(double y) const;
  [[nodiscard]] const MonotoneCurve& curve() const { return curve_; }
  [[nodiscard]] double value_at_zero() const { return phi_zero_; }

 private:
  MonotoneCurve curve_;
  double phi_zero_;
};

[[nodiscard]] double psi(const Loss& loss, double theta, const ScoreSearch& search = {});
[[nodiscard]] double psi_inverse(const Loss& loss, double y, const ScoreSearch& search = {});

struct ConsistencyReport {
  bool consistent;                 // phi(0) > C*(eta) for every sampled eta != 1/2
  bool adversarially_consistent;   // phi(0) > C*(1/2)
  double margin_at_half;           // phi(0) - C*(1/2)
  double min_margin_off_half;
  std::vector<double> eta_grid;
  MonotoneCurve margin_curve;      // eta in [1/2, 1] -> phi(0) - C*(eta)
};

[[nodiscard]] ConsistencyReport check_consistency(const Loss& loss, double tol = kDefaultTol,
                                                  int eta_points = 1001);

}  // namespace advsurr
