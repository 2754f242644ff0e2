#include "advsurr/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "advsurr/bounds.hpp"
#include "advsurr/envelope.hpp"
#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "advsurr/report.hpp"
#include "csv_util.hpp"

namespace advsurr {

using nlohmann::json;

SamplerKind parse_sampler(const std::string& name) {
  if (name == "random-threshold") return SamplerKind::random_threshold;
  if (name == "random-piecewise") return SamplerKind::random_piecewise;
  if (name == "perturbed-witness") return SamplerKind::perturbed_witness;
  if (name == "fn-sequence") return SamplerKind::fn_sequence;
  if (name == "mixed") return SamplerKind::mixed;
  throw ParseError("unknown sampler '" + name +
                   "' (expected random-threshold, random-piecewise, perturbed-witness, fn-sequence or mixed)");
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::random_threshold: return "random-threshold";
    case SamplerKind::random_piecewise: return "random-piecewise";
    case SamplerKind::perturbed_witness: return "perturbed-witness";
    case SamplerKind::fn_sequence: return "fn-sequence";
    case SamplerKind::mixed: return "mixed";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void apply_setting(CampaignConfig& c, const std::string& key, const std::string& value, const std::string& where) {
  auto number = [&] {
    try {
      return detail::parse_number(value, key);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  };
  auto count = [&] {
    const double v = number();
    if (!(v >= 0.0) || v != std::floor(v)) throw ParseError(where + ": '" + key + "' must be a nonnegative integer");
    return static_cast<std::uint64_t>(v);
  };
  if (key == "distribution") c.distribution = value;
  else if (key == "delta") c.params.delta = number();
  else if (key == "mu0") c.params.mu0 = number();
  else if (key == "mu1") c.params.mu1 = number();
  else if (key == "sigma") c.params.sigma = number();
  else if (key == "loss") c.loss = value;
  else if (key == "eps") c.eps = number();
  else if (key == "spacing") {
    c.spacing = number();
    if (!(c.spacing > 0.0)) throw ParseError(where + ": spacing must be positive");
  } else if (key == "samples") {
    c.samples = count();
    if (c.samples == 0) throw ParseError(where + ": samples must be at least 1");
  } else if (key == "sampler") {
    try {
      c.sampler = parse_sampler(value);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  } else if (key == "seed") c.seed = count();
  else if (key == "bounds") {
    c.bounds.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item != "thm9" && item != "thm10" && item != "thm11" && item != "thm12" && item != "prop4")
        throw ParseError(where + ": unknown bound '" + item + "' (expected thm9, thm10, thm11, thm12, prop4)");
      c.bounds.push_back(item);
    }
  } else if (key == "out") c.out = value;
  else if (key == "kappa") c.kappa = number();
  else if (key == "alpha") c.alpha = number();
  else if (key == "offset") c.offset = number();
  else if (key == "attack") {
    if (value != "auto" && value != "shift" && value != "identity")
      throw ParseError(where + ": attack must be auto, shift or identity");
    c.attack = value;
  } else if (key == "threads") c.threads = static_cast<unsigned>(count());
  else throw ParseError(where + ": unknown key '" + key + "'");
}

CampaignConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string());
  CampaignConfig config;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
  return config;
}

double detect_massart_alpha(const GridFunction& eta, double eta_tol) {
  double alpha = 0.5;
  for (double v : eta.values())
    if (!std::isnan(v)) alpha = std::min(alpha, std::abs(v - 0.5));
  // snap round-off so that e.g. 0.2499999999 reads as 1/4
  const double snapped = std::round(alpha / eta_tol) * eta_tol;
  return std::clamp(snapped, 0.0, 0.5);
}

ProblemSetup prepare_problem(const CampaignConfig& config) {
  Loss loss = parse_loss(config.loss);
  const double eps = config.eps;
  auto build = [&]() -> std::pair<GridDistribution, AttackPair> {
    if (config.distribution.rfind("csv:", 0) == 0) {
      GridDistribution d = extend_grid(read_distribution_csv(config.distribution.substr(4)), eps);
      if (config.attack == "identity") return {d, identity_attack(d, eps)};
      if (config.attack == "shift") return {d, shift_attack(d, eps)};
      AttackPair unmoved = identity_attack(d, eps);
      AttackPair shifted = shift_attack(d, eps);
      const bool shift_better = dual_surrogate_objective(shifted.attacked, loss).value >
                                dual_surrogate_objective(unmoved.attacked, loss).value;
      return {d, shift_better ? std::move(shifted) : std::move(unmoved)};
    }
    const ExampleKind kind = parse_example_kind(config.distribution);
    ExampleParams params = config.params;
    params.eps = eps;
    GridDistribution d = make_example(kind, params, GridSpec{config.spacing, eps, 0.0});
    if (config.attack == "identity") return {d, identity_attack(d, eps)};
    if (config.attack == "shift") return {d, shift_attack(d, eps)};
    return {d, example_attack(kind, params, d)};
  };
  auto [d, attack] = build();
  GridFunction witness = primal_witness(attack, loss);
  ClassificationOptimum opt = optimal_adv_classification_risk(d, eps);
  const double class_dual = dual_classification_objective(attack.attacked).value;
  const double surr_dual = dual_surrogate_objective(attack.attacked, loss).value;

  double surr_upper = adv_surrogate_risk(d, loss, witness, eps);
  std::vector<double> scales{kInf};
  const double top = smallest_minimizer(loss, 1.0);
  if (std::isfinite(top)) scales.push_back(top);
  for (double scale : scales) {
    std::vector<double> v(opt.labels.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = opt.labels[k] * scale;
    surr_upper = std::min(surr_upper, adv_surrogate_risk(d, loss, GridFunction(d.grid(), std::move(v)), eps));
  }
  const double slack = slack_budget(d, config.kappa);
  return ProblemSetup{d,         std::move(loss), std::move(attack), std::move(witness), std::move(opt.labels),
                      opt.value, class_dual,      surr_upper,        surr_dual,          slack};
}

namespace {

struct SampleResult {
  std::uint64_t seed;
  SamplerKind kind;
  double class_adv;
  double surr_adv;
  double class_std;
  double surr_std;
};

GridFunction sample_classifier(SamplerKind kind, std::mt19937_64& rng, const ProblemSetup& p) {
  const Grid& g = p.d.grid();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> f(g.count);
  switch (kind) {
    case SamplerKind::random_threshold: {
      const double t = g.lo + unit(rng) * (g.hi() - g.lo);
      for (std::size_t k = 0; k < g.count; ++k) f[k] = g.node(k) - t;
      break;
    }
    case SamplerKind::random_piecewise: {
      const int knots = 2 + static_cast<int>(unit(rng) * 7.0);
      std::vector<Knot> pts;
      for (int i = 0; i < knots; ++i) pts.push_back({g.lo + unit(rng) * (g.hi() - g.lo), -2.0 + 4.0 * unit(rng)});
      std::sort(pts.begin(), pts.end(), [](const Knot& a, const Knot& b) { return a.x < b.x; });
      for (std::size_t k = 0; k < g.count; ++k) {
        const double x = g.node(k);
        if (x <= pts.front().x) f[k] = pts.front().y;
        else if (x >= pts.back().x) f[k] = pts.back().y;
        else {
          std::size_t i = 1;
          while (pts[i].x < x) ++i;
          const double span = pts[i].x - pts[i - 1].x;
          f[k] = span > 0.0 ? pts[i - 1].y + (pts[i].y - pts[i - 1].y) * (x - pts[i - 1].x) / span : pts[i].y;
        }
      }
      break;
    }
    case SamplerKind::perturbed_witness: {
      const double amplitude = std::pow(10.0, -3.0 + 3.0 * unit(rng));
      for (std::size_t k = 0; k < g.count; ++k) f[k] = p.witness[k] + amplitude * (2.0 * unit(rng) - 1.0);
      break;
    }
    case SamplerKind::fn_sequence: {
      const double n = std::pow(10.0, 6.0 * unit(rng));
      std::vector<std::size_t> mass_nodes;
      for (std::size_t k = 0; k < g.count; ++k)
        if (p.d.node_mass(k) > 0.0) mass_nodes.push_back(k);
      const std::size_t centre = mass_nodes[std::min(mass_nodes.size() - 1,
                                                     static_cast<std::size_t>(unit(rng) * mass_nodes.size()))];
      std::fill(f.begin(), f.end(), 1.0 / n);
      f[centre] = -1.0 / n;
      break;
    }
    case SamplerKind::mixed: break;
  }
  return GridFunction(g, std::move(f));
}

BoundSpec with_offset(const BoundSpec& spec, double offset) {
  BoundSpec out(spec.kind(), spec.loss(), [spec](double z) { return spec.curve(z); }, offset);
  out.alpha = spec.alpha;
  out.constant = spec.constant;
  out.conjectured_constant = spec.conjectured_constant;
  out.r = spec.r;
  return out;
}

}  // namespace

VerifyReport run_campaign(const CampaignConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.samples == 0) throw ParseError("samples must be at least 1");
  const ProblemSetup p = prepare_problem(config);
  const double eps = config.eps;
  const bool need_std = std::find(config.bounds.begin(), config.bounds.end(), "prop4") != config.bounds.end();

  std::vector<SampleResult> results(config.samples);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.samples; i = next++) {
      const std::uint64_t seed = splitmix64(config.seed ^ splitmix64(i));
      std::mt19937_64 rng(seed);
      SamplerKind kind = config.sampler;
      if (kind == SamplerKind::mixed) kind = static_cast<SamplerKind>(i % 4);
      const GridFunction f = sample_classifier(kind, rng, p);
      SampleResult r{seed, kind, adv_classification_risk(p.d, f, eps), adv_surrogate_risk(p.d, p.loss, f, eps), 0.0,
                     0.0};
      if (need_std) {
        r.class_std = classification_risk(p.d, f);
        r.surr_std = surrogate_risk(p.d, p.loss, f);
      }
      results[i] = r;
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.samples));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // any sampled classifier also bounds the surrogate optimum from above
  double surr_opt = p.surr_opt_upper;
  for (const auto& r : results) surr_opt = std::min(surr_opt, r.surr_adv);
  const double class_std_opt = dual_classification_objective(p.d).value;
  double surr_std_opt = dual_surrogate_objective(p.d, p.loss).value;
  if (need_std)
    for (const auto& r : results) surr_std_opt = std::min(surr_std_opt, r.surr_std);

  std::vector<std::pair<std::string, BoundSpec>> specs;
  json spec_json = json::object();
  const double z_max = 4.0 * p.loss.value_at_zero();
  for (const auto& name : config.bounds) {
    if (name == "thm9") {
      const double alpha = config.alpha.value_or(detect_massart_alpha(p.attack.eta_star));
      specs.emplace_back(name, massart_bound(p.loss, alpha));
    } else if (name == "thm10") {
      const double alpha = config.alpha.value_or(detect_massart_alpha(eta_field(p.d)));
      BoundSpec spec = massart_bound_with_slack(p.loss, alpha, p.attack);
      if (config.offset) spec = with_offset(spec, *config.offset);
      specs.emplace_back(name, spec);
    } else if (name == "thm11") {
      specs.emplace_back(name, phi_tilde(p.loss, cdf_abs_eta(p.attack, false)));
    } else if (name == "thm12") {
      BoundSpec spec = phi_tilde_with_atom(p.loss, cdf_abs_eta(p.attack, true));
      if (config.offset) spec = with_offset(spec, *config.offset);
      specs.emplace_back(name, spec);
    } else if (name == "prop4") {
      const double alpha = config.alpha.value_or(detect_massart_alpha(eta_field(p.d)));
      specs.emplace_back(name, prop4_bound_spec(p.loss, alpha));
    } else {
      throw ParseError("unknown bound '" + name + "'");
    }
    spec_json[name] = to_json(specs.back().second, z_max);
  }

  VerifyReport report;
  report.spacing = p.d.grid().spacing;
  report.kappa = config.kappa;
  report.min_margin = kInf;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    for (const auto& [name, spec] : specs) {
      const bool standard = name == "prop4";
      const double class_excess = standard ? r.class_std - class_std_opt : r.class_adv - p.class_opt;
      const double surr_excess = standard ? r.surr_std - surr_std_opt : r.surr_adv - surr_opt;
      const double value = spec(surr_excess);
      const double margin = value - class_excess;
      report.rows.push_back({i, r.seed, to_string(r.kind), name, surr_excess, class_excess, value, margin, p.slack});
      report.min_margin = std::min(report.min_margin, margin);
      if (margin < -p.slack) ++report.violations;
    }
  }
  report.details = json{
      {"distribution", config.distribution},
      {"loss", p.loss.name()},
      {"eps", eps},
      {"samples", config.samples},
      {"sampler", to_string(config.sampler)},
      {"seed", config.seed},
      {"attack", {{"shift0", p.attack.shift0}, {"shift1", p.attack.shift1}}},
      {"optimum",
       {{"class_opt", p.class_opt},
        {"class_dual", p.class_dual},
        {"surrogate_opt_upper", number_json(surr_opt)},
        {"surrogate_opt_witness", number_json(p.surr_opt_upper)},
        {"surrogate_dual_lower", p.surr_dual_lower},
        {"surrogate_gap", number_json(surr_opt - p.surr_dual_lower)}}},
      {"slack", p.slack},
      {"bounds", spec_json}};
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

void write_rows_csv(std::ostream& out, const std::vector<CampaignRow>& rows) {
  out << "sample,seed,sampler,bound,surr_excess,class_excess,bound_value,margin,slack\n";
  for (const auto& r : rows)
    out << r.sample << ',' << r.seed << ',' << r.sampler << ',' << r.bound << ','
        << detail::format_number(r.surr_excess) << ',' << detail::format_number(r.class_excess) << ','
        << detail::format_number(r.bound_value) << ',' << detail::format_number(r.margin) << ','
        << detail::format_number(r.slack) << '\n';
}

json summary_json(const VerifyReport& report) {
  json j{{"min_margin", number_json(report.min_margin)},
         {"violations", report.violations},
         {"rows", report.rows.size()},
         {"runtime_seconds", report.runtime_seconds},
         {"environment", {{"version", kVersion}, {"spacing", report.spacing}, {"kappa", report.kappa}}}};
  j["details"] = report.details;
  return j;
}

void write_report(const VerifyReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream rows(dir / "rows.csv");
  write_rows_csv(rows, report.rows);
  write_json(summary_json(report), dir / "summary.json");
}

}  // namespace advsurr
