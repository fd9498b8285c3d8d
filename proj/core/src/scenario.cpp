#include "fran/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "config_json.hpp"

namespace fran {

double ScenarioConfig::sinr_target() const { return std::pow(10.0, sinr_target_db / 10.0); }

double ScenarioConfig::min_rate() const { return std::log2(1.0 + sinr_target()); }

double ScenarioConfig::total_capacity() const
{
    return std::accumulate(processor_capacity.begin(), processor_capacity.end(), 0.0);
}

void ScenarioConfig::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid scenario: ") + what);
    };
    require(num_rrh >= 1, "num_rrh must be >= 1");
    require(antennas_per_rrh >= 1, "antennas_per_rrh must be >= 1");
    require(num_ue >= 1, "num_ue must be >= 1");
    require(!processor_power.empty(), "at least one processor is required");
    require(processor_power.size() == processor_capacity.size(),
            "processor_power and processor_capacity differ in length");
    for (double p : processor_power) require(p > 0.0, "processor_power entries must be > 0");
    for (double d : processor_capacity) require(d > 0.0, "processor_capacity entries must be > 0");
    require(static_cast<int>(rho.size()) == num_ue, "rho must have one entry per UE");
    for (double r : rho) require(r >= 0.0 && r <= 1.0, "rho entries must lie in [0, 1]");
    require(rrh_spacing > 0.0, "rrh_spacing must be > 0");
    require(ue_disk_radius >= 0.0, "ue_disk_radius must be >= 0");
    require(d2d_max_distance >= 0.0, "d2d_max_distance must be >= 0");
    require(noise_power > 0.0, "noise_power must be > 0");
    require(p_max > 0.0, "p_max must be > 0");
    require(p_d2d > 0.0, "p_d2d must be > 0");
    require(eta_rrh > 0.0 && eta_ue > 0.0, "amplifier efficiencies must be > 0");
    require(p_fronthaul > 0.0, "p_fronthaul must be > 0");
    require(beta > 0.0 && alpha > 0.0, "beta and alpha must be > 0");
    require(steps_per_epoch >= 1, "steps_per_epoch must be >= 1");
    require(shadow_std_db >= 0.0, "shadow_std_db must be >= 0");
    require(penalty_w > 0.0, "penalty_w must be > 0");
    require(xi > 0.0, "xi must be > 0");
    require(max_precoder_iters >= 1, "max_precoder_iters must be >= 1");
    require(num_processors() + 2 * num_ue <= 30, "state too large to index");
}

namespace detail {

json parse_config_object(const std::string& text)
{
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw std::invalid_argument("config must be a JSON object");
    return obj;
}

void read_scenario_keys(const json& obj, ScenarioConfig& cfg, std::set<std::string>& consumed)
{
    take(obj, "num_rrh", cfg.num_rrh, consumed);
    take(obj, "antennas_per_rrh", cfg.antennas_per_rrh, consumed);
    take(obj, "num_ue", cfg.num_ue, consumed);
    take(obj, "rrh_spacing", cfg.rrh_spacing, consumed);
    take(obj, "ue_disk_radius", cfg.ue_disk_radius, consumed);
    take(obj, "d2d_max_distance", cfg.d2d_max_distance, consumed);
    take(obj, "noise_power", cfg.noise_power, consumed);
    take(obj, "p_max", cfg.p_max, consumed);
    take(obj, "p_d2d", cfg.p_d2d, consumed);
    take(obj, "sinr_target_db", cfg.sinr_target_db, consumed);
    take(obj, "eta_rrh", cfg.eta_rrh, consumed);
    take(obj, "eta_ue", cfg.eta_ue, consumed);
    take(obj, "p_fronthaul", cfg.p_fronthaul, consumed);
    take(obj, "processor_power", cfg.processor_power, consumed);
    take(obj, "processor_capacity", cfg.processor_capacity, consumed);
    take(obj, "beta", cfg.beta, consumed);
    take(obj, "alpha", cfg.alpha, consumed);
    take(obj, "steps_per_epoch", cfg.steps_per_epoch, consumed);
    take(obj, "shadow_std_db", cfg.shadow_std_db, consumed);
    take(obj, "penalty_w", cfg.penalty_w, consumed);
    take(obj, "xi", cfg.xi, consumed);
    take(obj, "max_precoder_iters", cfg.max_precoder_iters, consumed);
    take(obj, "redraw_channels_per_epoch", cfg.redraw_channels_per_epoch, consumed);

    if (auto it = obj.find("rho"); it != obj.end()) {
        if (it->is_number()) {
            cfg.rho.assign(static_cast<std::size_t>(std::max(cfg.num_ue, 0)), it->get<double>());
        } else if (it->is_array()) {
            cfg.rho = it->get<std::vector<double>>();
        } else {
            throw std::invalid_argument("'rho' must be a number or a list of numbers");
        }
        consumed.insert("rho");
    } else if (static_cast<int>(cfg.rho.size()) != cfg.num_ue && !cfg.rho.empty()) {
        // num_ue changed without an explicit rho: broadcast the first entry
        cfg.rho.assign(static_cast<std::size_t>(std::max(cfg.num_ue, 0)), cfg.rho.front());
    }
}

json scenario_json(const ScenarioConfig& cfg)
{
    json j;
    j["num_rrh"] = cfg.num_rrh;
    j["antennas_per_rrh"] = cfg.antennas_per_rrh;
    j["num_ue"] = cfg.num_ue;
    j["rrh_spacing"] = cfg.rrh_spacing;
    j["ue_disk_radius"] = cfg.ue_disk_radius;
    j["d2d_max_distance"] = cfg.d2d_max_distance;
    j["noise_power"] = cfg.noise_power;
    j["p_max"] = cfg.p_max;
    j["p_d2d"] = cfg.p_d2d;
    j["sinr_target_db"] = cfg.sinr_target_db;
    j["eta_rrh"] = cfg.eta_rrh;
    j["eta_ue"] = cfg.eta_ue;
    j["p_fronthaul"] = cfg.p_fronthaul;
    j["processor_power"] = cfg.processor_power;
    j["processor_capacity"] = cfg.processor_capacity;
    j["beta"] = cfg.beta;
    j["alpha"] = cfg.alpha;
    j["rho"] = cfg.rho;
    j["steps_per_epoch"] = cfg.steps_per_epoch;
    j["shadow_std_db"] = cfg.shadow_std_db;
    j["penalty_w"] = cfg.penalty_w;
    j["xi"] = cfg.xi;
    j["max_precoder_iters"] = cfg.max_precoder_iters;
    j["redraw_channels_per_epoch"] = cfg.redraw_channels_per_epoch;
    return j;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& consumed)
{
    for (const auto& [key, _] : obj.items()) {
        if (!consumed.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace detail

ScenarioConfig scenario_from_json(const std::string& text)
{
    auto obj = detail::parse_config_object(text);
    ScenarioConfig cfg;
    std::set<std::string> consumed;
    detail::read_scenario_keys(obj, cfg, consumed);
    detail::reject_unknown_keys(obj, consumed);
    return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) { return detail::scenario_json(cfg).dump(2); }

std::string fingerprint(const ScenarioConfig& cfg)
{
    return detail::fnv1a_hex(detail::scenario_json(cfg).dump());
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw std::runtime_error("error while reading '" + path + "'");
    return ss.str();
}

} // namespace fran
