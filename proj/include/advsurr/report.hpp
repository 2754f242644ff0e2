#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "advsurr/attack.hpp"
#include "advsurr/bounds.hpp"
#include "advsurr/conditional_risk.hpp"
#include "advsurr/envelope.hpp"
#include "advsurr/monotone_curve.hpp"
#include "advsurr/risk.hpp"

namespace advsurr {

inline constexpr const char* kVersion = "0.1.0";

// Finite doubles as numbers, infinities and NaN as the strings "inf", "-inf", "nan".
[[nodiscard]] nlohmann::json number_json(double v);

[[nodiscard]] nlohmann::json to_json(const RiskReport& r);
[[nodiscard]] nlohmann::json to_json(const Feasibility& f);
[[nodiscard]] nlohmann::json to_json(const DualReport& r, double spacing);
[[nodiscard]] nlohmann::json to_json(const ConditionalRiskReport& r);
[[nodiscard]] nlohmann::json to_json(const ConsistencyReport& r);
[[nodiscard]] nlohmann::json to_json(const SlacknessReport& r);
[[nodiscard]] nlohmann::json to_json(const MonotoneCurve& c);
[[nodiscard]] nlohmann::json to_json(const EnvelopeCdf& e);
[[nodiscard]] nlohmann::json to_json(const BoundSpec& b, double z_max);
[[nodiscard]] nlohmann::json to_json(const LowerBoundReport& r);

// The attacked pair as source.csv / attacked.csv plus manifest.json in dir.
void write_attack_pair(const AttackPair& attack, const std::filesystem::path& dir);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace advsurr
