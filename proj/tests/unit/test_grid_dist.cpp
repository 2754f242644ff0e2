#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "advsurr/grid.hpp"
#include "generators.hpp"

using namespace advsurr;
using advsurr::testing::Gen;

namespace {

std::vector<double> window_scan(const std::vector<double>& v, std::size_t w, bool take_max) {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t a = k >= w ? k - w : 0;
    const std::size_t b = std::min(v.size() - 1, k + w);
    out[k] = take_max ? *std::max_element(v.begin() + a, v.begin() + b + 1)
                      : *std::min_element(v.begin() + a, v.begin() + b + 1);
  }
  return out;
}

GridFunction on_unit_grid(std::vector<double> v) {
  const std::size_t n = v.size();
  return GridFunction(Grid(0.0, 1.0, n), std::move(v));
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST(Grid, NodesAndValidation) {
  const Grid g(-1.0, 0.25, 9);
  EXPECT_DOUBLE_EQ(g.node(4), 0.0);
  EXPECT_DOUBLE_EQ(g.hi(), 1.0);
  EXPECT_THROW(Grid(0.0, 0.0, 3), DomainError);
  EXPECT_THROW(Grid(0.0, -1.0, 3), DomainError);
  EXPECT_THROW(Grid(0.0, 1.0, 0), DomainError);
}

TEST(Grid, AlignedRadius) {
  const Grid g(0.0, 1e-3, 10);
  EXPECT_EQ(aligned_radius(g, 0.25), 250u);
  EXPECT_EQ(aligned_radius(g, 0.0), 0u);
  try {
    (void)aligned_radius(g, 0.2505);
    FAIL() << "expected an alignment error";
  } catch (const AlignmentError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("0.25"), std::string::npos) << what;
    EXPECT_NE(what.find("0.251"), std::string::npos) << what;
  }
  EXPECT_THROW((void)aligned_radius(g, -0.1), DomainError);
}

TEST(Grid, NodeOffset) {
  EXPECT_EQ(node_offset(Grid(-1.0, 0.5, 10), Grid(0.0, 0.5, 3)), 2);
  EXPECT_THROW((void)node_offset(Grid(0.0, 0.5, 10), Grid(0.1, 0.5, 3)), AlignmentError);
  EXPECT_THROW((void)node_offset(Grid(0.0, 0.5, 10), Grid(0.0, 0.25, 3)), AlignmentError);
}

TEST(SupBall, Examples) {
  const GridFunction f = on_unit_grid({0, 3, 1, 5, 2});
  EXPECT_EQ(sup_ball(f, 1.0).values(), (std::vector<double>{3, 3, 5, 5, 5}));
  EXPECT_EQ(inf_ball(f, 1.0).values(), (std::vector<double>{0, 0, 1, 1, 2}));
  EXPECT_EQ(sup_ball(f, 0.0).values(), f.values());
  EXPECT_EQ(inf_ball(f, 0.0).values(), f.values());
  EXPECT_EQ(sup_ball(on_unit_grid({2, 2, 2}), 2.0).values(), (std::vector<double>{2, 2, 2}));
  EXPECT_THROW((void)sup_ball(f, 0.5), AlignmentError);
}

TEST(SupBall, ExtendedRealsAndNaN) {
  const GridFunction f = on_unit_grid({1.0, kInf, 0.0, -kInf});
  EXPECT_EQ(sup_ball(f, 1.0).values(), (std::vector<double>{kInf, kInf, kInf, 0.0}));
  EXPECT_EQ(inf_ball(f, 1.0).values(), (std::vector<double>{1.0, 0.0, -kInf, -kInf}));
  EXPECT_THROW((void)sup_ball(on_unit_grid({0.0, std::nan("")}), 1.0), DomainError);
}

TEST(SupBall, MatchesWindowScan) {
  Gen gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen.index(512);
    const std::size_t w = gen.index(50);
    std::vector<double> v = gen.values(n, -10.0, 10.0);
    if (gen.coin()) v[gen.index(n)] = kInf;
    const GridFunction f(Grid(0.0, 0.1, n), v);
    const double eps = 0.1 * static_cast<double>(w);
    EXPECT_EQ(sup_ball(f, eps).values(), window_scan(v, w, true));
    EXPECT_EQ(inf_ball(f, eps).values(), window_scan(v, w, false));
  }
}

TEST(SupBall, Properties) {
  Gen gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 40 + gen.index(200);
    const Grid grid(0.0, 1.0, n);
    const GridFunction f = gen.function(grid);
    std::vector<double> bumped = f.values();
    for (auto& x : bumped) x += gen.uniform(0.0, 1.0);
    const GridFunction g(grid, bumped);
    std::vector<double> negated = f.values();
    for (auto& x : negated) x = -x;
    const std::size_t w1 = gen.index(6), w2 = gen.index(6);
    const auto up = sup_ball(f, static_cast<double>(w1));
    const auto up_g = sup_ball(g, static_cast<double>(w1));
    const auto twice = sup_ball(up, static_cast<double>(w2));
    const auto once = sup_ball(f, static_cast<double>(w1 + w2));
    const auto down = inf_ball(f, static_cast<double>(w1));
    const auto neg_up = sup_ball(GridFunction(grid, negated), static_cast<double>(w1));
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_GE(up[k], f[k]);
      EXPECT_LE(up[k], up_g[k]);
      EXPECT_EQ(down[k], -neg_up[k]);
      // the semigroup law holds exactly away from the clamped ends
      if (k >= w1 + w2 && k + w1 + w2 < n) EXPECT_EQ(twice[k], once[k]);
    }
  }
}

TEST(ThresholdIndicators, Examples) {
  const auto ind = threshold_indicators(on_unit_grid({-1, 0, 2}));
  EXPECT_EQ(ind.nonpositive.values(), (std::vector<double>{1, 1, 0}));
  EXPECT_EQ(ind.positive.values(), (std::vector<double>{0, 0, 1}));
  const auto pos = threshold_indicators(on_unit_grid({1, 2}));
  EXPECT_EQ(pos.nonpositive.values(), (std::vector<double>{0, 0}));
  const auto zero = threshold_indicators(on_unit_grid({0, 0}));
  EXPECT_EQ(zero.nonpositive.values(), (std::vector<double>{1, 1}));
  const auto inf = threshold_indicators(on_unit_grid({-kInf, kInf}));
  EXPECT_EQ(inf.positive.values(), (std::vector<double>{0, 1}));
}

TEST(ThresholdIndicators, SumToOne) {
  Gen gen(33);
  for (int trial = 0; trial < 50; ++trial) {
    const GridFunction f = gen.function(Grid(0.0, 1.0, 1 + gen.index(100)));
    const auto ind = threshold_indicators(f);
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_EQ(ind.nonpositive[k] + ind.positive[k], 1.0);
  }
}

TEST(GridDistribution, Validation) {
  const Grid g(0.0, 1.0, 2);
  EXPECT_THROW(GridDistribution(g, {0.5, -0.1}, {0.0, 0.0}), DomainError);
  EXPECT_THROW(GridDistribution(g, {0.0, 0.0}, {0.0, 0.0}), DomainError);
  EXPECT_THROW(GridDistribution(g, {0.7, 0.0}, {0.0, 0.7}), DomainError);
  EXPECT_NO_THROW(GridDistribution(g, {0.7, 0.0}, {0.0, 0.7}, MassPolicy::unrestricted));
  EXPECT_NO_THROW(GridDistribution(g, {0.5, 0.0}, {0.0, 0.5}));
  EXPECT_THROW(GridDistribution(g, {0.5}, {0.0, 0.5}), DomainError);
  const GridDistribution d(g, {0.25, 0.0}, {0.125, 0.5});
  EXPECT_DOUBLE_EQ(d.total0(), 0.25);
  EXPECT_DOUBLE_EQ(d.total1(), 0.625);
  EXPECT_DOUBLE_EQ(d.node_mass(0), 0.375);
  EXPECT_DOUBLE_EQ(d.mass(1, 1), 0.5);
}

TEST(ExtendGrid, Examples) {
  const GridDistribution d(Grid(0.0, 1.0, 2), {0.5, 0.0}, {0.0, 0.5});
  const GridDistribution e = extend_grid(d, 1.0);
  EXPECT_DOUBLE_EQ(e.grid().lo, -1.0);
  EXPECT_DOUBLE_EQ(e.grid().hi(), 2.0);
  EXPECT_EQ(e.mass0(), (std::vector<double>{0.0, 0.5, 0.0, 0.0}));
  EXPECT_EQ(e.mass1(), (std::vector<double>{0.0, 0.0, 0.5, 0.0}));
  EXPECT_DOUBLE_EQ(e.total_mass(), d.total_mass());
  const GridDistribution same = extend_grid(d, 0.0);
  EXPECT_EQ(same.mass0(), d.mass0());
  EXPECT_DOUBLE_EQ(same.grid().lo, d.grid().lo);
  EXPECT_THROW((void)extend_grid(d, 0.5), AlignmentError);
}

TEST(GridCsv, RoundTrip) {
  const GridDistribution d(Grid(-0.5, 0.25, 3), {0.25, 0.0, 0.125}, {0.0, 0.5, 0.125});
  std::ostringstream out;
  write_csv(out, d);
  EXPECT_EQ(out.str(), "x,p0,p1\n-0.5,0.25,0\n-0.25,0,0.5\n0,0.125,0.125\n");
  const auto path = temp_file("advsurr_dist.csv", out.str());
  const GridDistribution back = read_distribution_csv(path);
  EXPECT_EQ(back.mass0(), d.mass0());
  EXPECT_EQ(back.mass1(), d.mass1());
  EXPECT_DOUBLE_EQ(back.grid().spacing, 0.25);

  std::ostringstream fout;
  write_csv(fout, GridFunction(Grid(0.0, 1.0, 2), std::vector<double>{1.5, -kInf}), "f");
  EXPECT_EQ(fout.str(), "x,f\n0,1.5\n1,-inf\n");
  const GridFunction f = read_function_csv(temp_file("advsurr_f.csv", "x,value\n0,1.5\n1,-inf\n"));
  EXPECT_EQ(f[1], -kInf);
  EXPECT_EQ(read_function_csv(temp_file("advsurr_f2.csv", "x,f\n0,2\n1,3\n"))[1], 3.0);
  EXPECT_THROW((void)read_function_csv(temp_file("advsurr_f3.csv", "x,a,b\n0,2,1\n")), ParseError);
}

TEST(GridCsv, Diagnostics) {
  EXPECT_THROW((void)read_distribution_csv(temp_file("advsurr_bad1.csv", "x,p0,p1\n0,0.5,0\n1,0,0.5\n3,0,0\n")),
               ParseError);
  EXPECT_THROW((void)read_distribution_csv(temp_file("advsurr_bad2.csv", "x,p1,p0\n0,0.5,0\n")), ParseError);
  EXPECT_THROW((void)read_distribution_csv(temp_file("advsurr_bad3.csv", "")), ParseError);
  try {
    (void)read_distribution_csv(temp_file("advsurr_bad4.csv", "x,p0,p1\n0,0.5,0\n1,zz,0.5\n"));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
  EXPECT_THROW((void)read_distribution_csv("/nonexistent/advsurr.csv"), ParseError);
}
