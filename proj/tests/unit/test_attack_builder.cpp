#include <gtest/gtest.h>

#include <cmath>

#include "advsurr/attack.hpp"
#include "advsurr/conditional_risk.hpp"
#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "advsurr/risk.hpp"
#include "generators.hpp"

using namespace advsurr;
using advsurr::testing::Gen;

namespace {

double class_mean(const GridDistribution& d, int label) {
  double mass = 0.0, moment = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    mass += d.mass(label, k);
    moment += d.mass(label, k) * d.grid().node(k);
  }
  return moment / mass;
}

double mass_where(const AttackPair& a, double eta) {
  double total = 0.0;
  for (std::size_t k = 0; k < a.attacked.size(); ++k)
    if (std::abs(a.eta_star[k] - eta) < 1e-12) total += a.attacked.node_mass(k);
  return total;
}

ExampleParams gaussian(double mu0, double mu1, double sigma, double eps) {
  ExampleParams p;
  p.mu0 = mu0;
  p.mu1 = mu1;
  p.sigma = sigma;
  p.eps = eps;
  return p;
}

ExampleParams interval(double delta, double eps) {
  ExampleParams p;
  p.delta = delta;
  p.eps = eps;
  return p;
}

}  // namespace

TEST(ShiftAttack, GaussianMeansMoveByEps) {
  const ExampleParams p = gaussian(0.0, 1.0, 1.0, 0.25);
  const GridDistribution d = make_example(ExampleKind::gaussian, p, GridSpec{1e-3});
  const AttackPair a = shift_attack(d, p.eps);
  EXPECT_NEAR(class_mean(a.attacked, 0), 0.25, 1e-3);
  EXPECT_NEAR(class_mean(a.attacked, 1), 0.75, 1e-3);
  EXPECT_DOUBLE_EQ(a.attacked.total0(), d.total0());
  EXPECT_DOUBLE_EQ(a.attacked.total1(), d.total1());
  const Feasibility feas = check_feasibility(d, a.attacked, p.eps);
  EXPECT_NEAR(feas.dist0, 0.25, 1e-12);
  EXPECT_NEAR(feas.dist1, 0.25, 1e-12);
}

TEST(ShiftAttack, ZeroEpsIsIdentity) {
  const GridDistribution d = make_example(ExampleKind::gaussian, gaussian(0.0, 1.0, 1.0, 0.0), GridSpec{1e-2});
  const AttackPair a = shift_attack(d, 0.0);
  EXPECT_EQ(a.attacked.mass0(), d.mass0());
  EXPECT_EQ(a.attacked.mass1(), d.mass1());
}

TEST(ShiftAttack, NeedsPadding) {
  const GridDistribution d = make_example(ExampleKind::massart, interval(0.5, 0.0), GridSpec{1e-2});
  EXPECT_THROW((void)shift_attack(d, 0.1), CoverageError);
  EXPECT_THROW((void)shift_attack(d, 0.105), AlignmentError);
}

TEST(ShiftAttack, MassartAtomAtHalf) {
  // Each class is 3/8 density on [-1-delta, -delta] and [delta, 1+delta] on
  // its heavy side; the shifted overlap has width 2(eps-delta) and carries
  // both classes at density 3/8, so the eta=1/2 mass is 1.5 (eps-delta).
  const double delta = 0.25;
  for (double eps : {0.3, 0.5, 0.75}) {
    const GridDistribution d = make_example(ExampleKind::massart, interval(delta, eps), GridSpec{1e-3});
    const AttackPair a = example_attack(ExampleKind::massart, interval(delta, eps), d);
    EXPECT_NEAR(mass_where(a, 0.5), 1.5 * (eps - delta), 4e-3) << "eps " << eps;
  }
}

TEST(ShiftAttack, RandomInvariants) {
  Gen gen(51);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t w = gen.index(5);
    const Grid grid(0.0, 0.5, 20 + 2 * w);
    const GridDistribution d = gen.atoms(grid, 8, w);
    const double eps = 0.5 * static_cast<double>(w);
    const AttackPair a = shift_attack(d, eps);
    EXPECT_NEAR(a.attacked.total0(), d.total0(), 1e-15);
    EXPECT_NEAR(a.attacked.total1(), d.total1(), 1e-15);
    const Feasibility feas = check_feasibility(d, a.attacked, eps);
    EXPECT_LE(std::max(feas.dist0, feas.dist1), eps + 1e-12);
    for (std::size_t k = 0; k < a.attacked.size(); ++k) {
      if (a.attacked.node_mass(k) > 0.0) {
        EXPECT_GE(a.eta_star[k], 0.0);
        EXPECT_LE(a.eta_star[k], 1.0);
      } else {
        EXPECT_TRUE(std::isnan(a.eta_star[k]));
      }
    }
  }
}

TEST(IdentityAttack, Unmoved) {
  const GridDistribution d = make_example(ExampleKind::massart, interval(0.5, 0.25), GridSpec{1e-2});
  const AttackPair a = identity_attack(d, 0.25);
  EXPECT_EQ(a.attacked.mass0(), d.mass0());
  EXPECT_EQ(a.shift0, 0.0);
  EXPECT_EQ(a.eps, 0.25);
}

TEST(ExtendNearest, TiesGoLeft) {
  const double nan = std::nan("");
  const GridFunction eta(Grid(0.0, 1.0, 7), std::vector<double>{nan, 0.2, nan, nan, 0.8, nan, nan});
  EXPECT_EQ(extend_nearest(eta).values(), (std::vector<double>{0.2, 0.2, 0.2, 0.8, 0.8, 0.8, 0.8}));
  const GridFunction tie(Grid(0.0, 1.0, 3), std::vector<double>{0.1, nan, 0.9});
  EXPECT_EQ(extend_nearest(tie)[1], 0.1);
  EXPECT_THROW((void)extend_nearest(GridFunction(Grid(0.0, 1.0, 2), nan)), DomainError);
}

TEST(PrimalWitness, GaussianExponential) {
  const ExampleParams p = gaussian(0.0, 1.0, 1.0, 0.25);
  const GridDistribution d = make_example(ExampleKind::gaussian, p, GridSpec{1e-2});
  const AttackPair a = shift_attack(d, p.eps);
  const Loss loss = Loss::exponential();
  const GridFunction f = primal_witness(a, loss);
  for (std::size_t k = 1; k < f.size(); ++k) EXPECT_GE(f[k], f[k - 1]);
  const auto mid = static_cast<std::size_t>(std::llround((0.5 - f.grid().lo) / f.grid().spacing));
  EXPECT_NEAR(f[mid], 0.0, 1e-3);
  // exp witness is (1/2) log(eta/(1-eta)) off the tolerance band
  for (std::size_t k = 0; k < f.size(); k += 37) {
    const double eta = extend_nearest(a.eta_star)[k];
    if (eta > 0.01 && eta < 0.99) EXPECT_NEAR(f[k], 0.5 * std::log(eta / (1.0 - eta)), 1e-3);
  }
}

TEST(PrimalWitness, PureRegionsAreInfinite) {
  const ExampleParams p = interval(0.5, 0.25);
  const GridDistribution d = make_example(ExampleKind::realizable, p, GridSpec{1e-2});
  const GridFunction f = primal_witness(identity_attack(d, p.eps), Loss::exponential());
  EXPECT_EQ(f[0], -kInf);
  EXPECT_EQ(f[f.size() - 1], kInf);
}

TEST(PrimalWitness, MassartTwoLevels) {
  const ExampleParams p = interval(0.5, 0.25);
  const GridDistribution d = make_example(ExampleKind::massart, p, GridSpec{1e-2});
  const Loss rho = Loss::rho_margin(1.0);
  const GridFunction f = primal_witness(example_attack(ExampleKind::massart, p, d), rho);
  const double low = smallest_minimizer(rho, 0.25), high = smallest_minimizer(rho, 0.75);
  EXPECT_LT(low, high);
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_TRUE(f[k] == low || f[k] == high) << f[k];
  EXPECT_EQ(f[0], low);
  EXPECT_EQ(f[f.size() - 1], high);
}

TEST(ComplementarySlackness, GaussianPasses) {
  const ExampleParams p = gaussian(0.0, 1.0, 1.0, 0.25);
  const GridDistribution d = make_example(ExampleKind::gaussian, p, GridSpec{1e-2});
  const AttackPair a = shift_attack(d, p.eps);
  for (const Loss& loss : {Loss::exponential(), Loss::logistic()}) {
    const SlacknessReport r = check_complementary_slackness(d, loss, primal_witness(a, loss), a);
    EXPECT_TRUE(r.pass) << loss.name() << " gap " << r.cond1_gap << " viol " << r.cond2_maxviol;
  }
}

TEST(ComplementarySlackness, ZeroScoreFailsPointwise) {
  const ExampleParams p = gaussian(0.0, 1.0, 1.0, 0.25);
  const GridDistribution d = make_example(ExampleKind::gaussian, p, GridSpec{1e-2});
  const AttackPair a = shift_attack(d, p.eps);
  const SlacknessReport r =
      check_complementary_slackness(d, Loss::exponential(), GridFunction(d.grid(), 0.0), a);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.cond2_maxviol, r.slack);
}

TEST(ComplementarySlackness, UnmovedAtZeroEps) {
  Gen gen(52);
  for (int trial = 0; trial < 20; ++trial) {
    const GridDistribution d = gen.atoms(Grid(0.0, 1.0, 12), 6, 0);
    const Loss loss = gen.coin() ? Loss::exponential() : Loss::logistic();
    const AttackPair a = identity_attack(d, 0.0);
    const SlacknessReport r = check_complementary_slackness(d, loss, primal_witness(a, loss), a);
    EXPECT_TRUE(r.pass) << loss.name() << " gap " << r.cond1_gap << " viol " << r.cond2_maxviol;
  }
}

TEST(ComplementarySlackness, RejectsInfeasibleAttack) {
  const GridDistribution d = make_example(ExampleKind::gaussian, gaussian(0.0, 1.0, 1.0, 0.5), GridSpec{1e-2});
  const AttackPair far = shift_attack(d, 0.5);
  AttackPair bad = far;
  bad.eps = 0.25;
  EXPECT_THROW((void)check_complementary_slackness(d, Loss::exponential(), GridFunction(d.grid(), 0.0), bad),
               FeasibilityError);
}

TEST(MakeExample, ClassTotalsAndLevels) {
  for (auto kind : {ExampleKind::realizable, ExampleKind::massart, ExampleKind::gaussian}) {
    const GridDistribution d = make_example(kind, interval(0.5, 0.25), GridSpec{1e-3});
    EXPECT_NEAR(d.total0(), 0.5, 1e-12) << to_string(kind);
    EXPECT_NEAR(d.total1(), 0.5, 1e-12) << to_string(kind);
    EXPECT_NEAR(d.grid().spacing, 1e-3, 0.0);
  }
  const GridDistribution m = make_example(ExampleKind::massart, interval(0.5, 0.0), GridSpec{1e-3});
  const GridFunction eta = eta_field(m);
  for (std::size_t k = 0; k < eta.size(); ++k) {
    if (std::isnan(eta[k])) continue;
    const double x = m.grid().node(k);
    EXPECT_NEAR(eta[k], x < 0.0 ? 0.25 : 0.75, 1e-12) << x;
  }
}

TEST(MakeExample, PaddingAndOrigin) {
  const double eps = 0.25;
  const GridDistribution d = make_example(ExampleKind::realizable, interval(0.5, eps), GridSpec{0.01, -1.0, 0.005});
  const double index = (d.grid().lo - 0.005) / 0.01;
  EXPECT_NEAR(index, std::round(index), 1e-9);
  std::size_t first = d.size(), last = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d.node_mass(k) == 0.0) continue;
    first = std::min(first, k);
    last = k;
  }
  EXPECT_NEAR(d.grid().node(first) - d.grid().lo, eps, 1e-9);
  EXPECT_NEAR(d.grid().hi() - d.grid().node(last), eps, 1e-9);
  EXPECT_NEAR(d.grid().node(first), -1.495, 1e-9);
}

TEST(MakeExample, ParameterErrors) {
  EXPECT_THROW((void)make_example(ExampleKind::realizable, interval(0.0, 0.1), GridSpec{1e-2}), DomainError);
  EXPECT_THROW((void)make_example(ExampleKind::gaussian, gaussian(0.0, 1.0, 0.0, 0.1), GridSpec{1e-2}), DomainError);
  EXPECT_THROW((void)make_example(ExampleKind::gaussian, gaussian(1.0, 1.0, 1.0, 0.1), GridSpec{1e-2}), DomainError);
  EXPECT_THROW((void)make_example(ExampleKind::gaussian, gaussian(0.0, 1.0, 1.0, 0.1), GridSpec{0.0}), DomainError);
  ExampleParams tight = gaussian(0.0, 1.0, 1.0, 0.5);
  tight.require_concavity = true;
  EXPECT_THROW((void)make_example(ExampleKind::gaussian, tight, GridSpec{1e-2}), DomainError);
  ExampleParams wide = gaussian(0.0, 1.5, 1.0, 0.25);
  wide.require_concavity = true;
  EXPECT_THROW((void)make_example(ExampleKind::gaussian, wide, GridSpec{1e-2}), DomainError);
  wide.mu1 = 1.0;
  EXPECT_NO_THROW((void)make_example(ExampleKind::gaussian, wide, GridSpec{1e-2}));
}

TEST(ExampleKind, Parse) {
  EXPECT_EQ(parse_example_kind("massart"), ExampleKind::massart);
  EXPECT_EQ(to_string(parse_example_kind("gaussian")), "gaussian");
  EXPECT_THROW((void)parse_example_kind("cauchy"), ParseError);
}

TEST(ExampleAttack, Choice) {
  const GridDistribution d = make_example(ExampleKind::massart, interval(0.25, 0.5), GridSpec{1e-2});
  EXPECT_EQ(example_attack(ExampleKind::massart, interval(0.25, 0.5), d).shift1, -0.5);
  EXPECT_EQ(example_attack(ExampleKind::massart, interval(0.5, 0.25), d).shift1, 0.0);
  EXPECT_EQ(example_attack(ExampleKind::realizable, interval(0.25, 0.5), d).shift1, 0.0);
}

TEST(RealizableExample, ZeroRiskIffSeparated) {
  for (double eps : {0.1, 0.25, 0.45}) {
    const GridDistribution d = make_example(ExampleKind::realizable, interval(0.5, eps), GridSpec{1e-2});
    EXPECT_EQ(optimal_adv_classification_risk(d, eps).value, 0.0) << eps;
  }
  for (double eps : {0.6, 1.0}) {
    const GridDistribution d = make_example(ExampleKind::realizable, interval(0.5, eps), GridSpec{1e-2});
    EXPECT_GT(optimal_adv_classification_risk(d, eps).value, 0.05) << eps;
  }
}

TEST(DeltaOfZ, Examples) {
  EXPECT_EQ(delta_of_z(0.0, 1.0, 1.0, 0.0), 0.0);
  EXPECT_NEAR(delta_of_z(0.0, 0.5, 1.0, 0.25), 2.0 * std::log(3.0), 1e-12);
  EXPECT_NEAR(delta_of_z(0.0, 0.5, 1.0, 0.25), 2.19722, 1e-5);
  EXPECT_THROW((void)delta_of_z(0.0, 1.0, 1.0, 0.5), DomainError);
  EXPECT_THROW((void)delta_of_z(0.0, 1.0, 1.0, -0.1), DomainError);
  EXPECT_THROW((void)delta_of_z(1.0, 0.0, 1.0, 0.1), DomainError);
}

TEST(DeltaOfZ, MatchesPosteriorLevelSet) {
  // eta(x) = 1 / (1 + exp(-(mu1-mu0)(x - m)/sigma^2)) with m the midpoint
  Gen gen(53);
  for (int trial = 0; trial < 50; ++trial) {
    const double mu0 = gen.uniform(-1.0, 1.0), gap = gen.uniform(0.1, 2.0), sigma = gen.uniform(0.3, 2.0);
    const double z = gen.uniform(0.0, 0.49);
    const double half = delta_of_z(mu0, mu0 + gap, sigma, z);
    const double eta = 1.0 / (1.0 + std::exp(-gap * half / (sigma * sigma)));
    EXPECT_NEAR(eta - 0.5, z, 1e-12);
  }
}

TEST(LowerBoundSequence, HingeRatios) {
  const LowerBoundReport half = lower_bound_sequence(Loss::hinge(), 0.5, 1'000'000, 0.1, 0.05);
  EXPECT_NEAR(half.ratio, 1.0, 1e-5);
  EXPECT_NEAR(half.class_excess, 1.0, 1e-12);
  const LowerBoundReport quarter = lower_bound_sequence(Loss::hinge(), 0.25, 1'000'000, 0.1, 0.05);
  EXPECT_NEAR(quarter.ratio, 1.5, 1e-5);
  EXPECT_NEAR(quarter.limit_ratio, 1.5, 1e-9);
  EXPECT_NEAR(quarter.class_excess, 0.75, 1e-12);
}

TEST(LowerBoundSequence, RatioApproachesLimit) {
  for (double alpha : {0.1, 0.3}) {
    double previous = kInf;
    for (long long n : {1LL, 100LL, 10'000LL, 1'000'000LL}) {
      const LowerBoundReport r = lower_bound_sequence(Loss::hinge(), alpha, n, 0.1, 0.05);
      EXPECT_NEAR(r.class_excess, 0.5 + alpha, 1e-12);
      const double err = std::abs(r.ratio - r.limit_ratio);
      EXPECT_LE(err, previous + 1e-12);
      previous = err;
    }
    EXPECT_LT(previous, 1e-4);
  }
}

TEST(LowerBoundSequence, Preconditions) {
  EXPECT_THROW((void)lower_bound_sequence(Loss::rho_margin(1.0), 0.25, 10, 0.1, 0.05), PreconditionError);
  EXPECT_THROW((void)lower_bound_sequence(Loss::hinge(), 0.0, 10, 0.1, 0.05), PreconditionError);
  EXPECT_THROW((void)lower_bound_sequence(Loss::hinge(), 0.6, 10, 0.1, 0.05), DomainError);
  EXPECT_THROW((void)lower_bound_sequence(Loss::hinge(), 0.25, 0, 0.1, 0.05), DomainError);
  EXPECT_THROW((void)lower_bound_sequence(Loss::hinge(), 0.25, 10, 0.0, 0.05), DomainError);
}

TEST(GaussianExample, ShiftIsOptimal) {
  // mu0 + 2 eps < mu1 < mu0 + sqrt(2) sigma in every setting
  const double spacing = 2e-3;
  for (const auto& p : {gaussian(0.0, 1.0, 1.0, 0.25), gaussian(0.0, 0.8, 1.0, 0.2), gaussian(0.5, 1.7, 1.0, 0.1)}) {
    const GridDistribution d = make_example(ExampleKind::gaussian, p, GridSpec{spacing});
    const AttackPair a = shift_attack(d, p.eps);
    for (const Loss& loss : {Loss::exponential(), Loss::logistic()}) {
      const double gap = duality_gap(d, loss, primal_witness(a, loss), a.attacked, p.eps);
      EXPECT_GE(gap, -1e-8) << loss.name();
      EXPECT_LE(gap, slack_budget(d)) << loss.name() << " mu1 " << p.mu1 << " eps " << p.eps;
    }
  }
}
