// advsurr: adversarial surrogate-risk toolkit on one-dimensional grids.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "advsurr/attack.hpp"
#include "advsurr/bounds.hpp"
#include "advsurr/campaign.hpp"
#include "advsurr/conditional_risk.hpp"
#include "advsurr/envelope.hpp"
#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"
#include "advsurr/grid.hpp"
#include "advsurr/loss.hpp"
#include "advsurr/report.hpp"
#include "advsurr/risk.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace advsurr;

namespace {

struct Common {
  double spacing = 1e-3;
  double eps = 0.25;
  std::string loss;
  std::string out;
  double kappa = 4.0;
};

json environment(double spacing, double kappa) {
  return json{{"version", kVersion}, {"spacing", spacing}, {"kappa", kappa}};
}

void write_file_csv(const fs::path& path, const auto& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  writer(out);
}

// ---- example ---------------------------------------------------------------

struct ExampleArgs {
  std::string name;
  ExampleParams params;
  double origin = 0.0;
};

int run_example(const ExampleArgs& a, const Common& c) {
  const ExampleKind kind = parse_example_kind(a.name);
  ExampleParams params = a.params;
  params.eps = c.eps;
  const Loss loss = parse_loss(c.loss.empty() ? "exponential" : c.loss);
  const GridDistribution d = make_example(kind, params, GridSpec{c.spacing, c.eps, a.origin});
  const AttackPair attack = example_attack(kind, params, d);
  const GridFunction witness = primal_witness(attack, loss);

  const fs::path out = c.out.empty() ? fs::path("example_" + a.name) : fs::path(c.out);
  fs::create_directories(out);
  write_file_csv(out / "distribution.csv", [&](std::ostream& s) { write_csv(s, d); });
  write_attack_pair(attack, out / "attack");
  write_file_csv(out / "witness.csv", [&](std::ostream& s) { write_csv(s, witness, "f"); });

  const double slack = slack_budget(d, c.kappa);
  const double gap = duality_gap(d, loss, witness, attack.attacked, c.eps);
  const ClassificationOptimum opt = optimal_adv_classification_risk(d, c.eps);
  const double class_dual = dual_classification_objective(attack.attacked).value;
  const SlacknessReport cs = check_complementary_slackness(d, loss, witness, attack, kDefaultTol, c.kappa);
  const double alpha = detect_massart_alpha(attack.eta_star);

  json report{{"environment", environment(c.spacing, c.kappa)},
              {"example", to_string(kind)},
              {"loss", loss.name()},
              {"eps", c.eps},
              {"attack", {{"shift0", attack.shift0}, {"shift1", attack.shift1}}},
              {"feasibility", to_json(check_feasibility(d, attack.attacked, c.eps))},
              {"duality_gap", number_json(gap)},
              {"slack", slack},
              {"duality_gap_within_slack", std::abs(gap) <= slack},
              {"adv_surrogate_risk", number_json(adv_surrogate_risk(d, loss, witness, c.eps))},
              {"dual_surrogate", to_json(dual_surrogate_objective(attack.attacked, loss), c.spacing)},
              {"optimal_adv_classification_risk", opt.value},
              {"dual_classification", class_dual},
              {"complementary_slackness", to_json(cs)},
              {"massart_alpha", alpha}};

  if (kind == ExampleKind::gaussian) {
    const EnvelopeCdf env = cdf_abs_eta(attack, false);
    const double slope = 16.0 * params.sigma * params.sigma / (params.mu1 - params.mu0 - 2.0 * c.eps);
    const double env_slack = slack / env.total_mass;
    double hull_gap = 0.0;
    double linear_excess = -kInf;
    for (const auto& k : env.h.closure()) {
      hull_gap = std::max(hull_gap, env.H(k.x) - k.y);
      linear_excess = std::max(linear_excess, env.H(k.x) - std::min(slope * k.x, 1.0));
    }
    report["envelope"] = to_json(env);
    report["concavity"] = {{"hull_minus_h_max", hull_gap},
                           {"h_concave_within_slack", hull_gap <= env_slack},
                           {"linear_slope", slope},
                           {"envelope_minus_linear_max", linear_excess},
                           {"linear_bound_holds", linear_excess <= env_slack}};
  }
  write_json(report, out / "report.json");
  std::cout << "duality gap " << gap << " (slack " << slack << "), optimal adversarial risk " << opt.value
            << ", massart alpha " << alpha << "\nwrote " << out.string() << "\n";
  return 0;
}

// ---- verify ----------------------------------------------------------------

int run_verify(const std::string& config_path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  CampaignConfig config = config_path.empty() ? CampaignConfig{} : read_config_file(config_path);
  for (const auto& [key, value] : overrides) apply_setting(config, key, value, "--" + key);
  const VerifyReport report = run_campaign(config);
  write_report(report, config.out);
  std::cout << "rows " << report.rows.size() << ", min margin " << report.min_margin << ", violations "
            << report.violations << ", runtime " << report.runtime_seconds << " s\nwrote " << config.out.string()
            << "\n";
  return report.violations > 0 ? 1 : 0;
}

// ---- lowerbound ------------------------------------------------------------

int run_lowerbound(double alpha, const std::vector<long long>& ns, const Common& c) {
  const Loss loss = parse_loss(c.loss.empty() ? "hinge" : c.loss);
  std::vector<LowerBoundReport> rows;
  for (long long n : ns) rows.push_back(lower_bound_sequence(loss, alpha, n, c.eps, c.spacing));
  const fs::path out = c.out.empty() ? fs::path("lowerbound") : fs::path(c.out);
  write_file_csv(out / "lowerbound.csv", [&](std::ostream& s) {
    s << "n,ratio,class_excess,surrogate_excess\n";
    s.precision(17);
    for (const auto& r : rows) s << r.n << ',' << r.ratio << ',' << r.class_excess << ',' << r.surrogate_excess << '\n';
  });
  json series = json::array();
  for (const auto& r : rows) series.push_back(to_json(r));
  const MassartConstants constants = massart_constant(loss, alpha);
  write_json(json{{"environment", environment(c.spacing, c.kappa)},
                  {"loss", loss.name()},
                  {"alpha", alpha},
                  {"proof_constant", constants.proof},
                  {"conjectured_constant", constants.conjectured},
                  {"series", series}},
             out / "lowerbound.json");
  std::cout << "final ratio " << rows.back().ratio << " (conjectured " << constants.conjectured << ", proof "
            << constants.proof << ")\nwrote " << out.string() << "\n";
  return 0;
}

// ---- losscurves ------------------------------------------------------------

int run_losscurves(int points, const Common& c) {
  const Loss loss = parse_loss(c.loss.empty() ? "hinge" : c.loss);
  const fs::path out = c.out.empty() ? fs::path("losscurves") : fs::path(c.out);
  write_file_csv(out / "conditional.csv", [&](std::ostream& s) {
    s << "eta,c_star,c_minus,alpha_min\n";
    s.precision(17);
    for (int i = 0; i < points; ++i) {
      const auto r = conditional_risk_report(loss, static_cast<double>(i) / (points - 1));
      s << r.eta << ',' << r.c_star << ',' << r.c_minus << ',' << r.alpha_min << '\n';
    }
  });
  const PsiTransform psi_table(loss);
  write_file_csv(out / "psi.csv", [&](std::ostream& s) { psi_table.curve().write_csv(s, "theta", "psi"); });
  json report = to_json(check_consistency(loss));
  report["loss"] = loss.name();
  report["environment"] = environment(c.spacing, c.kappa);
  write_json(report, out / "consistency.json");
  std::cout << "consistent " << report["consistent"] << ", adversarially consistent "
            << report["adversarially_consistent"] << "\nwrote " << out.string() << "\n";
  return 0;
}

// ---- risk / dual -----------------------------------------------------------

int run_risk(const std::string& dist_path, const std::string& f_path, const Common& c) {
  const Loss loss = parse_loss(c.loss.empty() ? "hinge" : c.loss);
  const GridDistribution d = read_distribution_csv(dist_path, MassPolicy::unrestricted);
  const GridFunction f = read_function_csv(f_path);
  auto make = [&](RiskKind kind, bool adversarial, double value) {
    return to_json(RiskReport{value, adversarial ? c.eps : 0.0, kind, adversarial, dist_path, f_path,
                              d.grid().spacing});
  };
  json j{{"environment", environment(d.grid().spacing, c.kappa)}, {"loss", loss.name()}};
  j["risks"] = json::array({make(RiskKind::classification, false, classification_risk(d, f)),
                            make(RiskKind::surrogate, false, surrogate_risk(d, loss, f)),
                            make(RiskKind::classification, true, adv_classification_risk(d, f, c.eps)),
                            make(RiskKind::surrogate, true, adv_surrogate_risk(d, loss, f, c.eps))});
  if (c.out.empty()) std::cout << j.dump(2) << "\n";
  else write_json(j, c.out);
  return 0;
}

int run_dual(const std::string& attack_path, const std::string& source_path, bool brute, const Common& c) {
  const Loss loss = parse_loss(c.loss.empty() ? "hinge" : c.loss);
  json j{{"loss", loss.name()}, {"eps", c.eps}};
  double spacing = 0.0;
  if (!attack_path.empty()) {
    const GridDistribution attacked = read_distribution_csv(attack_path, MassPolicy::unrestricted);
    spacing = attacked.grid().spacing;
    DualReport surr = dual_surrogate_objective(attacked, loss);
    DualReport cls = dual_classification_objective(attacked);
    if (!source_path.empty()) {
      const GridDistribution source = read_distribution_csv(source_path, MassPolicy::unrestricted);
      surr.feasibility = cls.feasibility = check_feasibility(source, attacked, c.eps);
    }
    j["surrogate"] = to_json(surr, spacing);
    j["classification"] = to_json(cls, spacing);
  }
  if (brute) {
    if (source_path.empty()) throw ParseError("--brute-force needs --source");
    const GridDistribution source = read_distribution_csv(source_path, MassPolicy::unrestricted);
    spacing = source.grid().spacing;
    const Grid lattice = extend_grid(source, c.eps).grid();
    const BruteForceResult surr = brute_force_dual(source, loss, c.eps, lattice);
    const BruteForceResult cls = brute_force_classification_dual(source, c.eps, lattice);
    j["brute_force"] = {{"surrogate", to_json(surr.best, spacing)},
                        {"surrogate_maximizers", surr.maximizers.size()},
                        {"classification", to_json(cls.best, spacing)},
                        {"configurations", surr.configurations}};
    if (!c.out.empty()) {
      write_file_csv(fs::path(c.out).replace_extension(".attack.csv"),
                     [&](std::ostream& s) { write_csv(s, surr.attack); });
    }
  }
  j["environment"] = environment(spacing, c.kappa);
  if (c.out.empty()) std::cout << j.dump(2) << "\n";
  else write_json(j, c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial surrogate-risk bounds on one-dimensional grids"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spacing", common.spacing, "grid spacing")->check(CLI::PositiveNumber);
    sub->add_option("--eps", common.eps, "attack radius")->check(CLI::NonNegativeNumber);
    sub->add_option("--loss", common.loss, "hinge, exponential, logistic, rho-margin:R, sigmoid:T, half-hinge, table:PATH");
    sub->add_option("--kappa", common.kappa, "slack multiplier");
    sub->add_option("--out", common.out, "output path");
  };

  ExampleArgs ex;
  auto* example = app.add_subcommand("example", "reproduce a built-in example");
  example->add_option("name", ex.name, "realizable, massart or gaussian")->required();
  example->add_option("--delta", ex.params.delta);
  example->add_option("--mu0", ex.params.mu0);
  example->add_option("--mu1", ex.params.mu1);
  example->add_option("--sigma", ex.params.sigma);
  example->add_option("--origin", ex.origin, "grid origin");
  example->add_flag("--require-concavity", ex.params.require_concavity);
  add_common(example);

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  auto* verify = app.add_subcommand("verify", "run a bound-verification campaign");
  verify->add_option("--config", config_path, "key = value file")->check(CLI::ExistingFile);
  const std::vector<std::string> keys{"distribution", "delta",   "mu0",  "mu1",   "sigma",  "loss",
                                      "eps",          "spacing", "samples", "sampler", "seed", "bounds",
                                      "out",          "kappa",   "alpha", "offset", "attack", "threads"};
  std::vector<std::string> override_values(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) verify->add_option("--" + keys[i], override_values[i]);

  double lb_alpha = 0.25;
  std::vector<long long> lb_n{1, 10, 100, 1000, 10000, 100000, 1000000};
  auto* lowerbound = app.add_subcommand("lowerbound", "ratio of excess risks along the 1/n sequence");
  lowerbound->add_option("--alpha", lb_alpha)->check(CLI::Range(0.0, 0.5));
  lowerbound->add_option("--n", lb_n, "sequence indices")->delimiter(',');
  add_common(lowerbound);

  int curve_points = 1001;
  auto* losscurves = app.add_subcommand("losscurves", "conditional-risk curves and consistency");
  losscurves->add_option("--points", curve_points)->check(CLI::Range(2, 1000000));
  add_common(losscurves);

  std::string dist_path, f_path;
  auto* risk = app.add_subcommand("risk", "evaluate the four risks of one classifier");
  risk->add_option("--dist", dist_path, "distribution CSV (x,p0,p1)")->required()->check(CLI::ExistingFile);
  risk->add_option("--f", f_path, "classifier CSV (x,value)")->required()->check(CLI::ExistingFile);
  add_common(risk);

  std::string attack_path, source_path;
  bool brute = false;
  auto* dual = app.add_subcommand("dual", "dual objectives of an attack, or brute-force maximization");
  dual->add_option("--attack", attack_path, "attacked distribution CSV")->check(CLI::ExistingFile);
  dual->add_option("--source", source_path, "source distribution CSV")->check(CLI::ExistingFile);
  dual->add_flag("--brute-force", brute, "maximize over whole-atom moves of --source");
  add_common(dual);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*example) return run_example(ex, common);
    if (*verify) {
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (verify->count("--" + keys[i]) > 0) overrides.emplace_back(keys[i], override_values[i]);
      return run_verify(config_path, overrides);
    }
    if (*lowerbound) return run_lowerbound(lb_alpha, lb_n, common);
    if (*losscurves) return run_losscurves(curve_points, common);
    if (*risk) return run_risk(dist_path, f_path, common);
    if (*dual) return run_dual(attack_path, source_path, brute, common);
  } catch (const advsurr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
