#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace advsurr {

// Margin loss phi: continuous, non-increasing, phi(+inf) = 0.
class Loss {
 public:
  using Fn = std::function<double(double)>;

  // fn is only called on finite scores; limit_neg is phi(-inf).
  Loss(std::string name, Fn fn, double limit_neg);

  // Accepts +-inf and maps them to the limits.
  [[nodiscard]] double operator()(double alpha) const;

  [[nodiscard]] double value_at_zero() const { return at_zero_; }
  [[nodiscard]] double limit_pos() const { return 0.0; }
  [[nodiscard]] double limit_neg() const { return limit_neg_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  static Loss hinge();
  static Loss exponential();
  static Loss logistic();
  static Loss rho_margin(double rho);
  static Loss shifted_sigmoid(double tau);
  static Loss half_hinge();

  // Piecewise-linear loss through (alpha, value) samples. Left of the table the
  // first segment is extended linearly; right of it the value is held at the
  // last sample, which must be 0.
  static Loss from_table(std::vector<std::pair<double, double>> samples, std::string name);

 private:
  std::string name_;
  Fn fn_;
  double limit_neg_;
  double at_zero_;
};

// "hinge", "exponential", "logistic", "rho-margin:0.5", "sigmoid:1",
// "half-hinge", "table:path.csv".
[[nodiscard]] Loss parse_loss(std::string_view spec);

// Two-column CSV with header (alpha,value).
[[nodiscard]] Loss read_loss_csv(const std::filesystem::path& path, std::string name);

}  // namespace advsurr
