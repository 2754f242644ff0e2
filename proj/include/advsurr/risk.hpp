#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advsurr/conditional_risk.hpp"
#include "advsurr/grid.hpp"
#include "advsurr/loss.hpp"

namespace advsurr {

enum class RiskKind { classification, surrogate };

struct RiskReport {
  double value = 0.0;
  double eps = 0.0;
  RiskKind kind = RiskKind::surrogate;
  bool adversarial = false;
  std::string distribution_id;
  std::string function_id;
  double spacing = 0.0;
};

// The classifier f may live on a larger grid than d, as long as the grids are
// aligned and f covers every mass node padded by eps.
[[nodiscard]] double surrogate_risk(const GridDistribution& d, const Loss& loss, const GridFunction& f);
[[nodiscard]] double classification_risk(const GridDistribution& d, const GridFunction& f);
[[nodiscard]] double adv_surrogate_risk(const GridDistribution& d, const Loss& loss, const GridFunction& f,
                                        double eps);
[[nodiscard]] double adv_classification_risk(const GridDistribution& d, const GridFunction& f, double eps);

struct Feasibility {
  double dist0;  // W-infinity between attacked and source class-0 marginals
  double dist1;
  double eps;
};

struct DualReport {
  double value = 0.0;
  std::optional<Feasibility> feasibility;
  GridFunction eta_star;  // NaN at nodes without attacked mass
};

// Node-wise class-1 share; NaN where a node carries no mass.
[[nodiscard]] GridFunction eta_field(const GridDistribution& d);

// Sum over mass nodes of mass * C*(eta).
[[nodiscard]] DualReport dual_surrogate_objective(const GridDistribution& attack, const Loss& loss,
                                                  const ScoreSearch& search = {});
// Sum over nodes of min(mass0, mass1).
[[nodiscard]] DualReport dual_classification_objective(const GridDistribution& attack);

struct WeightedAtom {
  double x;
  double mass;
};

[[nodiscard]] std::vector<WeightedAtom> class_atoms(const GridDistribution& d, int label);

// Largest displacement of the monotone (quantile) coupling between two
// discrete measures of equal mass.
[[nodiscard]] double w_infinity_1d(std::span<const WeightedAtom> a, std::span<const WeightedAtom> b,
                                   double mass_tol = 1e-9);

// Per-class W-infinity distances; throws FeasibilityError if either exceeds
// eps + spacing tolerance.
Feasibility check_feasibility(const GridDistribution& source, const GridDistribution& attack, double eps);

// R_phi^eps(f) - Rbar_phi(attack).
[[nodiscard]] double duality_gap(const GridDistribution& d, const Loss& loss, const GridFunction& f,
                                 const GridDistribution& attack, double eps, const ScoreSearch& search = {});

// Shared discretization allowance kappa * spacing * total mass.
[[nodiscard]] double slack_budget(const GridDistribution& d, double kappa = 4.0);

struct BruteForceOptions {
  std::size_t max_atoms = 6;
  std::size_t max_configurations = 5'000'000;
  double tie_tol = 1e-9;  // maximizers are configurations within this of the best value
};

struct BruteForceResult {
  DualReport best;
  GridDistribution attack;                   // an optimal configuration on the lattice
  std::vector<GridDistribution> maximizers;  // every configuration within tie_tol of best
  std::size_t configurations = 0;
};

// Exhaustive search over attacks that move each atom, whole, to a lattice
// node within eps of it. The lattice must contain every mass node of d.
[[nodiscard]] BruteForceResult brute_force_dual(const GridDistribution& d, const Loss& loss, double eps,
                                                const Grid& lattice, const BruteForceOptions& options = {},
                                                const ScoreSearch& search = {});
[[nodiscard]] BruteForceResult brute_force_classification_dual(const GridDistribution& d, double eps,
                                                               const Grid& lattice,
                                                               const BruteForceOptions& options = {});

struct ClassificationOptimum {
  double value;
  GridFunction labels;  // +1 / -1 per node of d's grid
};

// Exact minimum of R^eps over all labelings of d's grid nodes, by dynamic
// programming over (label, distance to the last opposite label).
[[nodiscard]] ClassificationOptimum optimal_adv_classification_risk(const GridDistribution& d, double eps);

}  // namespace advsurr
