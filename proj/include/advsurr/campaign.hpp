#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "advsurr/attack.hpp"
#include "advsurr/loss.hpp"
#include "advsurr/risk.hpp"

namespace advsurr {

enum class SamplerKind { random_threshold, random_piecewise, perturbed_witness, fn_sequence, mixed };

[[nodiscard]] SamplerKind parse_sampler(const std::string& name);
[[nodiscard]] std::string to_string(SamplerKind kind);

struct CampaignConfig {
  std::string distribution = "massart";  // example name, or csv:<path>
  ExampleParams params;
  std::string loss = "rho-margin:1";
  double eps = 0.25;
  double spacing = 1e-3;
  std::size_t samples = 200;
  SamplerKind sampler = SamplerKind::mixed;
  std::uint64_t seed = 7;
  std::vector<std::string> bounds{"thm9"};  // thm9 thm10 thm11 thm12 prop4
  std::filesystem::path out = "campaign";
  double kappa = 4.0;
  std::optional<double> alpha;   // Massart margin; detected from eta when absent
  std::optional<double> offset;  // replaces the computed additive offset of thm10 / thm12
  std::string attack = "auto";   // auto | shift | identity
  unsigned threads = 0;          // 0 = hardware concurrency
};

// "key = value" per line, '#' starts a comment. Errors name the line.
void apply_setting(CampaignConfig& config, const std::string& key, const std::string& value,
                   const std::string& where = "setting");
[[nodiscard]] CampaignConfig read_config_file(const std::filesystem::path& path);

// Everything a campaign needs about the optimum of one problem instance.
struct ProblemSetup {
  GridDistribution d;
  Loss loss;
  AttackPair attack;
  GridFunction witness;
  GridFunction optimal_labels;
  double class_opt;        // exact grid minimum of R^eps
  double class_dual;       // Rbar of the attack
  double surr_opt_upper;   // smallest R_phi^eps over the witnesses tried
  double surr_dual_lower;  // Rbar_phi of the attack
  double slack;
};

[[nodiscard]] ProblemSetup prepare_problem(const CampaignConfig& config);

// Massart margin: smallest |eta - 1/2| over mass-bearing nodes.
[[nodiscard]] double detect_massart_alpha(const GridFunction& eta, double eta_tol = 1e-9);

struct CampaignRow {
  std::size_t sample;
  std::uint64_t seed;
  std::string sampler;
  std::string bound;
  double surr_excess;
  double class_excess;
  double bound_value;
  double margin;  // bound_value - class_excess
  double slack;
};

struct VerifyReport {
  std::vector<CampaignRow> rows;
  double min_margin = 0.0;
  std::size_t violations = 0;
  double runtime_seconds = 0.0;
  double spacing = 0.0;
  double kappa = 0.0;
  nlohmann::json details;  // optimum estimates, bound specs, config echo
};

[[nodiscard]] VerifyReport run_campaign(const CampaignConfig& config);

void write_rows_csv(std::ostream& out, const std::vector<CampaignRow>& rows);
[[nodiscard]] nlohmann::json summary_json(const VerifyReport& report);

// rows.csv and summary.json under config.out.
void write_report(const VerifyReport& report, const std::filesystem::path& dir);

}  // namespace advsurr
