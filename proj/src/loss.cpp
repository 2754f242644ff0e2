#include "advsurr/loss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "csv_util.hpp"

namespace advsurr {

Loss::Loss(std::string name, Fn fn, double limit_neg)
    : name_(std::move(name)), fn_(std::move(fn)), limit_neg_(limit_neg), at_zero_(fn_(0.0)) {
  if (!(limit_neg_ >= at_zero_)) throw DomainError("loss " + name_ + ": phi(-inf) below phi(0)");
  if (at_zero_ < 0.0) throw DomainError("loss " + name_ + ": negative value at 0");
}

double Loss::operator()(double alpha) const {
  if (alpha == kInf) return 0.0;
  if (alpha == -kInf) return limit_neg_;
  return fn_(alpha);
}

Loss Loss::hinge() {
  return Loss("hinge", [](double a) { return std::max(1.0 - a, 0.0); }, kInf);
}

Loss Loss::exponential() {
  return Loss("exponential", [](double a) { return std::exp(-a); }, kInf);
}

Loss Loss::logistic() {
  return Loss(
      "logistic",
      [](double a) { return a > -35.0 ? std::log1p(std::exp(-a)) : -a + std::log1p(std::exp(a)); },
      kInf);
}

Loss Loss::rho_margin(double rho) {
  if (!(rho > 0.0)) throw DomainError("rho-margin loss needs rho > 0");
  return Loss(
      "rho-margin:" + detail::format_number(rho),
      [rho](double a) { return std::min(1.0, std::max(0.0, 1.0 - a / rho)); }, 1.0);
}

Loss Loss::shifted_sigmoid(double tau) {
  return Loss(
      "sigmoid:" + detail::format_number(tau),
      [tau](double a) {
        const double t = a - tau;
        return t > 0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
      },
      1.0);
}

Loss Loss::half_hinge() {
  return Loss("half-hinge", [](double a) { return 0.5 * std::max(1.0 - a, 0.0); }, kInf);
}

Loss Loss::from_table(std::vector<std::pair<double, double>> samples, std::string name) {
  if (samples.size() < 2) throw ParseError("loss table " + name + " needs at least two rows");
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [a, v] = samples[i];
    if (!std::isfinite(a) || !std::isfinite(v) || v < 0.0)
      throw DomainError("loss table " + name + ": bad row " + std::to_string(i));
    if (i > 0) {
      if (a == samples[i - 1].first)
        throw DomainError("loss table " + name + ": duplicate alpha " + detail::format_number(a));
      if (v > samples[i - 1].second)
        throw DomainError("loss table " + name + ": increasing at alpha " + detail::format_number(a));
    }
  }
  if (samples.back().second != 0.0)
    throw DomainError("loss table " + name + ": last value must be 0 (phi(+inf) = 0)");
  const double slope = (samples[1].second - samples[0].second) / (samples[1].first - samples[0].first);
  const double limit_neg = slope < 0.0 ? kInf : samples[0].second;
  auto fn = [pts = std::move(samples), slope](double a) {
    if (a <= pts.front().first) return pts.front().second + slope * (a - pts.front().first);
    if (a >= pts.back().first) return pts.back().second;
    auto it = std::upper_bound(pts.begin(), pts.end(), a,
                               [](double x, const std::pair<double, double>& p) { return x < p.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (a - x0) / (x1 - x0);
  };
  return Loss(std::move(name), std::move(fn), limit_neg);
}

Loss parse_loss(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string head(spec.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
  auto number = [&](double fallback) { return arg.empty() ? fallback : detail::parse_number(arg, "loss parameter"); };
  if (head == "hinge") return Loss::hinge();
  if (head == "exponential" || head == "exp") return Loss::exponential();
  if (head == "logistic") return Loss::logistic();
  if (head == "rho-margin" || head == "rho") return Loss::rho_margin(number(1.0));
  if (head == "sigmoid") return Loss::shifted_sigmoid(number(1.0));
  if (head == "half-hinge") return Loss::half_hinge();
  if (head == "table") {
    if (arg.empty()) throw ParseError("table loss needs a path: table:<file.csv>");
    return read_loss_csv(arg, "table:" + arg);
  }
  throw ParseError("unknown loss '" + std::string(spec) + "'");
}

Loss read_loss_csv(const std::filesystem::path& path, std::string name) {
  const auto table = detail::read_csv(path, {"alpha", "value"});
  std::vector<std::pair<double, double>> samples;
  samples.reserve(table.rows.size());
  for (const auto& row : table.rows) samples.emplace_back(row[0], row[1]);
  return Loss::from_table(std::move(samples), std::move(name));
}

}  // namespace advsurr
