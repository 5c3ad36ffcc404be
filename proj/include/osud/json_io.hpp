#pragma once

#include <string>

#include <json.hpp>

#include "osud/adaptive.hpp"
#include "osud/dp.hpp"
#include "osud/noniid.hpp"
#include "osud/quantile_distribution.hpp"

namespace osud {
namespace io {

/// Schema: {"pieces":[{"kind":"atom","mass":..,"value":..},
///                    {"kind":"continuous","q_lo":..,"q_hi":..,"table":[[q,v],..]}]}
/// Continuous pieces serialize as monotone tables with linear interpolation
/// in quantile space (functional pieces are sampled on a 257-point grid).
nlohmann::json distribution_to_json(const QuantileDistribution& dist);
QuantileDistribution distribution_from_json(const nlohmann::json& j);

/// Schema: {n, p, zeta, theta_n, breakpoints[]}
nlohmann::json schedule_to_json(const adaptive::AdaptiveSchedule& schedule);
adaptive::AdaptiveSchedule schedule_from_json(const nlohmann::json& j);

/// Schema: {n, p, zeta, support:[{value, prob}]}
nlohmann::json discrete_instance_to_json(const dp::DiscreteInstance& inst);
dp::DiscreteInstance discrete_instance_from_json(const nlohmann::json& j);

/// Schema: {p, zeta, distributions:[<distribution schema>]}
nlohmann::json noniid_instance_to_json(const noniid::NonIIDInstance& inst);
noniid::NonIIDInstance noniid_instance_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

/// Parses a distribution given either a preset string
/// ("uniform:a,b" | "pointmass:v" | "truncexp:rate,cap" | "power:k")
/// or "@file.json" referring to the schema above.
QuantileDistribution parse_distribution(const std::string& spec);

}  // namespace io
}  // namespace osud
