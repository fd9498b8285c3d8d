#pragma once

// Internal helpers shared by the scenario and run-config loaders.

#include <set>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "fran/scenario.hpp"

namespace fran::detail {

using json = nlohmann::json;

json parse_config_object(const std::string& text);

/// Copies obj[key] into `out` when present and records the key.
template <typename T>
void take(const json& obj, const char* key, T& out, std::set<std::string>& consumed)
{
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad value for '") + key + "': " + e.what());
    }
    consumed.insert(key);
}

/// Copies every recognised scenario key from `obj` into `cfg` and records the
/// consumed key names.
void read_scenario_keys(const json& obj, ScenarioConfig& cfg, std::set<std::string>& consumed);

json scenario_json(const ScenarioConfig& cfg);

void reject_unknown_keys(const json& obj, const std::set<std::string>& consumed);

std::string fnv1a_hex(const std::string& bytes);

} // namespace fran::detail
