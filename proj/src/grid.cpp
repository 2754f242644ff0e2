#include "advsurr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>

#include "advsurr/errors.hpp"
#include "csv_util.hpp"

namespace advsurr {

namespace {

constexpr double kAlignTol = 1e-9;
constexpr double kMassTol = 1e-12;

// Sliding-window extremum with a monotone deque of indices; `better(a, b)`
// is true when a should evict b from the back.
template <typename Better>
GridFunction sliding_extremum(const GridFunction& f, double eps, Better better) {
  const std::size_t w = aligned_radius(f.grid(), eps);
  const std::size_t n = f.size();
  const auto& v = f.values();
  for (std::size_t k = 0; k < n; ++k)
    if (std::isnan(v[k])) throw DomainError("window extremum of an undefined value at node " + std::to_string(k));
  std::vector<double> out(n);
  std::deque<std::size_t> window;
  for (std::size_t j = 0; j < n + w; ++j) {
    if (j < n) {
      while (!window.empty() && !better(v[window.back()], v[j])) window.pop_back();
      window.push_back(j);
    }
    if (j < w) continue;
    const std::size_t i = j - w;
    while (window.front() + w < i) window.pop_front();
    out[i] = v[window.front()];
  }
  return GridFunction(f.grid(), std::move(out));
}

Grid grid_from_x(const std::vector<double>& xs, const std::filesystem::path& path) {
  if (xs.empty()) throw ParseError(path.string() + ": no rows");
  if (xs.size() == 1) return Grid(xs[0], 1.0, 1);
  const double spacing = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double expected = xs.front() + static_cast<double>(k) * spacing;
    if (std::abs(xs[k] - expected) > 1e-6 * spacing)
      throw ParseError(path.string() + ":" + std::to_string(k + 2) + ": x column is not uniformly spaced");
  }
  return Grid(xs.front(), spacing, xs.size());
}

}  // namespace

Grid::Grid(double lo_, double spacing_, std::size_t count_) : lo(lo_), spacing(spacing_), count(count_) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("grid spacing must be positive");
  if (count == 0) throw DomainError("grid needs at least one node");
  if (!std::isfinite(lo)) throw DomainError("grid origin must be finite");
}

std::size_t aligned_radius(const Grid& grid, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("radius must be finite and nonnegative");
  const double w = eps / grid.spacing;
  const double r = std::round(w);
  if (std::abs(w - r) > kAlignTol * std::max(1.0, w)) {
    const double below = std::floor(w) * grid.spacing;
    const double above = std::ceil(w) * grid.spacing;
    throw AlignmentError("eps = " + detail::format_number(eps) + " is not a multiple of spacing " +
                         detail::format_number(grid.spacing) + "; nearest aligned values are " +
                         detail::format_number(below) + " and " + detail::format_number(above));
  }
  return static_cast<std::size_t>(r);
}

std::ptrdiff_t node_offset(const Grid& outer, const Grid& inner) {
  if (std::abs(outer.spacing - inner.spacing) > kAlignTol * outer.spacing)
    throw AlignmentError("grid spacings differ: " + detail::format_number(outer.spacing) + " vs " +
                         detail::format_number(inner.spacing));
  const double s = (inner.lo - outer.lo) / outer.spacing;
  const double r = std::round(s);
  if (std::abs(s - r) > kAlignTol * std::max(1.0, std::abs(s)))
    throw AlignmentError("grid origins differ by a non-integer number of nodes");
  return static_cast<std::ptrdiff_t>(r);
}

GridFunction::GridFunction(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.count)
    throw DomainError("grid function has " + std::to_string(values_.size()) + " values for " +
                      std::to_string(grid_.count) + " nodes");
}

GridFunction::GridFunction(Grid grid, double fill) : grid_(grid), values_(grid.count, fill) {}

GridDistribution::GridDistribution(Grid grid, std::vector<double> mass0, std::vector<double> mass1, MassPolicy policy)
    : grid_(grid), mass0_(std::move(mass0)), mass1_(std::move(mass1)) {
  if (mass0_.size() != grid_.count || mass1_.size() != grid_.count)
    throw DomainError("distribution mass vectors must match the grid size");
  for (std::size_t k = 0; k < grid_.count; ++k) {
    if (!(mass0_[k] >= 0.0) || !(mass1_[k] >= 0.0) || !std::isfinite(mass0_[k]) || !std::isfinite(mass1_[k]))
      throw DomainError("negative or non-finite mass at node " + std::to_string(k));
  }
  total0_ = std::accumulate(mass0_.begin(), mass0_.end(), 0.0);
  total1_ = std::accumulate(mass1_.begin(), mass1_.end(), 0.0);
  const double total = total0_ + total1_;
  if (!(total > 0.0)) throw DomainError("distribution has no mass");
  if (policy == MassPolicy::at_most_one && total > 1.0 + kMassTol)
    throw DomainError("total mass " + detail::format_number(total) + " exceeds 1");
}

GridFunction sup_ball(const GridFunction& f, double eps) {
  return sliding_extremum(f, eps, [](double a, double b) { return a > b; });
}

GridFunction inf_ball(const GridFunction& f, double eps) {
  return sliding_extremum(f, eps, [](double a, double b) { return a < b; });
}

Indicators threshold_indicators(const GridFunction& f) {
  std::vector<double> nonpos(f.size());
  std::vector<double> pos(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (std::isnan(f[k])) throw DomainError("classifier value undefined at node " + std::to_string(k));
    nonpos[k] = f[k] <= 0.0 ? 1.0 : 0.0;
    pos[k] = 1.0 - nonpos[k];
  }
  return {GridFunction(f.grid(), std::move(nonpos)), GridFunction(f.grid(), std::move(pos))};
}

GridDistribution extend_grid(const GridDistribution& d, double pad) {
  const std::size_t w = aligned_radius(d.grid(), pad);
  const Grid g(d.grid().lo - static_cast<double>(w) * d.grid().spacing, d.grid().spacing, d.size() + 2 * w);
  std::vector<double> m0(g.count, 0.0);
  std::vector<double> m1(g.count, 0.0);
  std::copy(d.mass0().begin(), d.mass0().end(), m0.begin() + static_cast<std::ptrdiff_t>(w));
  std::copy(d.mass1().begin(), d.mass1().end(), m1.begin() + static_cast<std::ptrdiff_t>(w));
  return GridDistribution(g, std::move(m0), std::move(m1), MassPolicy::unrestricted);
}

void write_csv(std::ostream& out, const GridDistribution& d) {
  out << "x,p0,p1\n";
  for (std::size_t k = 0; k < d.size(); ++k)
    out << detail::format_number(d.grid().node(k)) << ',' << detail::format_number(d.mass0()[k]) << ','
        << detail::format_number(d.mass1()[k]) << '\n';
}

void write_csv(std::ostream& out, const GridFunction& f, const char* value_name) {
  out << "x," << value_name << '\n';
  for (std::size_t k = 0; k < f.size(); ++k)
    out << detail::format_number(f.grid().node(k)) << ',' << detail::format_number(f[k]) << '\n';
}

GridDistribution read_distribution_csv(const std::filesystem::path& path, MassPolicy policy) {
  const auto table = detail::read_csv(path, {"x", "p0", "p1"});
  std::vector<double> xs, m0, m1;
  for (const auto& row : table.rows) {
    xs.push_back(row[0]);
    m0.push_back(row[1]);
    m1.push_back(row[2]);
  }
  return GridDistribution(grid_from_x(xs, path), std::move(m0), std::move(m1), policy);
}

GridFunction read_function_csv(const std::filesystem::path& path) {
  // the value column may carry any name (write_csv labels it)
  const auto table = detail::read_csv(path, {"x"});
  if (table.header.size() != 2)
    throw ParseError(path.string() + ":1: expected two columns, x and a value column");
  std::vector<double> xs, vs;
  for (const auto& row : table.rows) {
    xs.push_back(row[0]);
    vs.push_back(row[1]);
  }
  return GridFunction(grid_from_x(xs, path), std::move(vs));
}

}  // namespace advsurr
