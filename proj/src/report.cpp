#include "advsurr/report.hpp"

#include <cmath>
#include <fstream>

#include "advsurr/errors.hpp"

namespace advsurr {

using nlohmann::json;

json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json to_json(const RiskReport& r) {
  return json{{"value", number_json(r.value)},
              {"eps", r.eps},
              {"kind", r.kind == RiskKind::classification ? "classification" : "surrogate"},
              {"adversarial", r.adversarial},
              {"distribution", r.distribution_id},
              {"function", r.function_id},
              {"spacing", r.spacing}};
}

json to_json(const Feasibility& f) { return json{{"w_inf_class0", f.dist0}, {"w_inf_class1", f.dist1}, {"eps", f.eps}}; }

json to_json(const DualReport& r, double spacing) {
  json j{{"value", number_json(r.value)}, {"spacing", spacing}};
  j["feasibility"] = r.feasibility ? to_json(*r.feasibility) : json(nullptr);
  return j;
}

json to_json(const ConditionalRiskReport& r) {
  return json{{"eta", r.eta},
              {"c_star", number_json(r.c_star)},
              {"c_minus", number_json(r.c_minus)},
              {"alpha_min", number_json(r.alpha_min)},
              {"tol", r.tol}};
}

json to_json(const ConsistencyReport& r) {
  return json{{"consistent", r.consistent},
              {"adversarially_consistent", r.adversarially_consistent},
              {"margin_at_half", r.margin_at_half},
              {"min_margin_off_half", r.min_margin_off_half},
              {"eta_grid", {{"points", r.eta_grid.size()}, {"lo", r.eta_grid.front()}, {"hi", r.eta_grid.back()}}}};
}

json to_json(const SlacknessReport& r) {
  return json{{"cond1_gap", number_json(r.cond1_gap)},
              {"cond2_maxviol", number_json(r.cond2_maxviol)},
              {"slack", r.slack},
              {"pass", r.pass}};
}

json to_json(const MonotoneCurve& c) {
  json knots = json::array();
  for (const auto& k : c.knots()) knots.push_back({k.x, number_json(k.y)});
  return json{{"direction", c.direction() == Direction::nondecreasing ? "nondecreasing" : "nonincreasing"},
              {"knots", std::move(knots)}};
}

json to_json(const EnvelopeCdf& e) {
  json h = json::array();
  for (const auto& k : e.h.jumps()) h.push_back({k.x, k.y});
  return json{{"h_jumps", std::move(h)},  {"H", to_json(e.H)},       {"atom_at_half", e.atom_at_half},
              {"atom_tol", e.atom_tol},   {"total_mass", e.total_mass}, {"strict", e.strict},
              {"spacing", e.spacing}};
}

json to_json(const BoundSpec& b, double z_max) {
  json j{{"kind", to_string(b.kind())}, {"loss", b.loss()}, {"additive_offset", b.additive_offset()}};
  if (b.alpha) j["alpha"] = *b.alpha;
  if (b.constant) j["constant"] = *b.constant;
  if (b.conjectured_constant) j["conjectured_constant"] = *b.conjectured_constant;
  if (b.r) j["r"] = *b.r;
  if (!b.constant) j["curve"] = to_json(b.tabulate(z_max));
  return j;
}

json to_json(const LowerBoundReport& r) {
  return json{{"n", r.n},
              {"class_excess", r.class_excess},
              {"surrogate_excess", r.surrogate_excess},
              {"ratio", r.ratio},
              {"limit_ratio", r.limit_ratio},
              {"proof_constant", r.proof_constant}};
}

void write_attack_pair(const AttackPair& attack, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "source.csv");
    write_csv(out, attack.source);
  }
  {
    std::ofstream out(dir / "attacked.csv");
    write_csv(out, attack.attacked);
  }
  json manifest{{"eps", attack.eps},
                {"shift0", attack.shift0},
                {"shift1", attack.shift1},
                {"source", {{"file", "source.csv"}, {"total0", attack.source.total0()}, {"total1", attack.source.total1()}}},
                {"attacked",
                 {{"file", "attacked.csv"}, {"total0", attack.attacked.total0()}, {"total1", attack.attacked.total1()}}},
                {"spacing", attack.source.grid().spacing},
                {"version", kVersion}};
  write_json(manifest, dir / "manifest.json");
}

void write_json(const json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace advsurr
