#pragma once

#include <string>

#include "advsurr/conditional_risk.hpp"
#include "advsurr/grid.hpp"
#include "advsurr/loss.hpp"

namespace advsurr {

struct AttackPair {
  GridDistribution source;
  GridDistribution attacked;
  double shift1;  // displacement of class-1 mass
  double shift0;  // displacement of class-0 mass
  GridFunction eta_star;
  double eps;
};

// Class 1 moves left by eps and class 0 right by eps. d must already carry
// eps of zero-mass padding on both sides.
[[nodiscard]] AttackPair shift_attack(const GridDistribution& d, double eps);

// The unmoved pair, feasible for every eps.
[[nodiscard]] AttackPair identity_attack(const GridDistribution& d, double eps);

// eta_star copied to every node from the nearest node with mass (ties go left).
[[nodiscard]] GridFunction extend_nearest(const GridFunction& eta_star);

// f*(x) = smallest minimizer of C(eta*(x), .), with eta* extended off mass.
[[nodiscard]] GridFunction primal_witness(const AttackPair& attack, const Loss& loss, const ScoreSearch& search = {});

struct SlacknessReport {
  double cond1_gap;
  double cond2_maxviol;
  double slack;
  bool pass;
};

[[nodiscard]] SlacknessReport check_complementary_slackness(const GridDistribution& d, const Loss& loss,
                                                            const GridFunction& f_star, const AttackPair& attack,
                                                            double tol = kDefaultTol, double kappa = 4.0);

enum class ExampleKind { realizable, massart, gaussian };

[[nodiscard]] ExampleKind parse_example_kind(const std::string& name);
[[nodiscard]] std::string to_string(ExampleKind kind);

struct ExampleParams {
  double delta = 0.5;  // half-gap between the class supports (realizable, massart)
  double mu0 = 0.0;
  double mu1 = 1.0;
  double sigma = 1.0;
  double eps = 0.0;                // used for padding and for the gaussian preconditions
  bool require_concavity = false;  // enforce mu0 + 2 eps < mu1 < mu0 + sqrt(2) sigma
};

struct GridSpec {
  double spacing = 1e-3;
  double pad = -1.0;    // zero-mass margin on each side; negative means eps
  double origin = 0.0;  // nodes sit at origin + k * spacing
};

// Realizable: class 0 uniform on [-1-delta, -delta], class 1 on [delta, 1+delta].
// Massart: both intervals carry both classes, eta = 1/4 left and 3/4 right.
// Gaussian: N(mu0, sigma^2) and N(mu1, sigma^2) truncated at 8 sigma.
// Every class totals 1/2.
[[nodiscard]] GridDistribution make_example(ExampleKind kind, const ExampleParams& params, const GridSpec& grid);

// The attack the examples are analysed with: unmoved when the supports cannot
// meet (realizable, massart with eps <= delta), the shift otherwise.
[[nodiscard]] AttackPair example_attack(ExampleKind kind, const ExampleParams& params, const GridDistribution& d);

// Half-width of {x : |eta(x) - 1/2| <= z} for two equal-weight Gaussians.
[[nodiscard]] double delta_of_z(double mu0, double mu1, double sigma, double z);

struct LowerBoundReport {
  long long n;
  double class_excess;
  double surrogate_excess;
  double ratio;
  double limit_ratio;     // (1/2 + alpha) / (phi(0) - C*(1/2 - alpha))
  double proof_constant;  // 1 / (phi(0) - C*(1/2 - alpha))
};

// One atom at 0 with eta = 1/2 + alpha on a grid spanning [-eps, eps];
// f_n = 1/n everywhere except -1/n at the atom.
[[nodiscard]] LowerBoundReport lower_bound_sequence(const Loss& loss, double alpha, long long n, double eps,
                                                    double spacing, const ScoreSearch& search = {});

}  // namespace advsurr
