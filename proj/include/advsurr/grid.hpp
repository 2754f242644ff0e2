#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <vector>

namespace advsurr {

// Nodes lo + k * spacing for k in [0, count).
struct Grid {
  double lo = 0.0;
  double spacing = 1.0;
  std::size_t count = 1;

  Grid() = default;
  Grid(double lo, double spacing, std::size_t count);

  [[nodiscard]] double node(std::size_t k) const { return lo + static_cast<double>(k) * spacing; }
  [[nodiscard]] double hi() const { return node(count - 1); }
};

// eps / spacing as a node count; throws AlignmentError naming the two nearest
// aligned radii when eps is not a multiple of the spacing (relative tol 1e-9).
[[nodiscard]] std::size_t aligned_radius(const Grid& grid, double eps);

// Index shift s with inner.node(k) == outer.node(k + s); AlignmentError if the
// spacings differ or the offset is not a whole number of nodes.
[[nodiscard]] std::ptrdiff_t node_offset(const Grid& outer, const Grid& inner);

// Values may be +-inf. NaN marks "undefined" in derived fields such as eta.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values);
  GridFunction(Grid grid, double fill);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

enum class MassPolicy {
  at_most_one,   // total mass in (0, 1]
  unrestricted,  // total mass > 0
};

class GridDistribution {
 public:
  GridDistribution(Grid grid, std::vector<double> mass0, std::vector<double> mass1,
                   MassPolicy policy = MassPolicy::at_most_one);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& mass0() const { return mass0_; }
  [[nodiscard]] const std::vector<double>& mass1() const { return mass1_; }
  [[nodiscard]] double mass(int label, std::size_t k) const { return label == 0 ? mass0_[k] : mass1_[k]; }
  [[nodiscard]] double node_mass(std::size_t k) const { return mass0_[k] + mass1_[k]; }
  [[nodiscard]] double total0() const { return total0_; }
  [[nodiscard]] double total1() const { return total1_; }
  [[nodiscard]] double total_mass() const { return total0_ + total1_; }
  [[nodiscard]] std::size_t size() const { return mass0_.size(); }

 private:
  Grid grid_;
  std::vector<double> mass0_;
  std::vector<double> mass1_;
  double total0_ = 0.0;
  double total1_ = 0.0;
};

// Node-wise max / min over windows of radius eps, clamped at the grid ends.
[[nodiscard]] GridFunction sup_ball(const GridFunction& f, double eps);
[[nodiscard]] GridFunction inf_ball(const GridFunction& f, double eps);

struct Indicators {
  GridFunction nonpositive;  // 1 where f <= 0
  GridFunction positive;     // 1 where f > 0
};

[[nodiscard]] Indicators threshold_indicators(const GridFunction& f);

// Adds pad / spacing zero-mass nodes on both sides.
[[nodiscard]] GridDistribution extend_grid(const GridDistribution& d, double pad);

// CSV columns (x, p0, p1) and (x, value); x must be uniformly spaced.
void write_csv(std::ostream& out, const GridDistribution& d);
void write_csv(std::ostream& out, const GridFunction& f, const char* value_name = "value");
[[nodiscard]] GridDistribution read_distribution_csv(const std::filesystem::path& path,
                                                     MassPolicy policy = MassPolicy::at_most_one);
// Two columns: x, then the values under any header name.
[[nodiscard]] GridFunction read_function_csv(const std::filesystem::path& path);

}  // namespace advsurr
