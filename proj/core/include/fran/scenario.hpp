#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fran {

/// Physical and cost parameters of one downlink fog-RAN scenario.
///
/// Defaults reproduce the reference setup: three RRHs with two antennas each
/// on an 800 m equilateral triangle, four UEs in a 100 m disk around the
/// centroid, six heterogeneous cloud processors.
struct ScenarioConfig {
    int num_rrh = 3;
    int antennas_per_rrh = 2;
    int num_ue = 4;

    double rrh_spacing = 800.0;     // m
    double ue_disk_radius = 100.0;  // m
    double d2d_max_distance = 20.0; // m

    double noise_power = 1e-13;   // W
    double p_max = 1.5;           // W per RRH
    double p_d2d = 0.1;           // W per D2D transmitter
    double sinr_target_db = 5.0;  // dB
    double eta_rrh = 1.0 / 40.0;  // RRH amplifier efficiency
    double eta_ue = 1.0 / 20.0;   // UE amplifier efficiency
    double p_fronthaul = 5.0;     // W per C-RAN UE

    std::vector<double> processor_power{21.6, 6.4, 5.0, 8.0, 12.5, 12.5}; // W
    std::vector<double> processor_capacity{6.0, 4.0, 1.0, 2.0, 5.0, 5.0}; // MOPTS

    double beta = 1.0;  // MOPTS per bit/s/Hz
    double alpha = 0.5; // MOPTS per nonzero precoding coefficient

    std::vector<double> rho{0.9, 0.9, 0.9, 0.9};

    int steps_per_epoch = 30;
    double shadow_std_db = 8.0;

    double penalty_w = 200.0;  // reward is -penalty_w when even full capacity cannot serve the C-RAN set
    double xi = 1e-6;          // reweighting offset and zeroing threshold
    int max_precoder_iters = 50;
    bool redraw_channels_per_epoch = false;

    int num_processors() const { return static_cast<int>(processor_power.size()); }
    int num_antennas() const { return num_rrh * antennas_per_rrh; }
    int num_actions() const { return 2 * num_processors() * 2 * num_ue; }
    int state_size() const { return num_processors() + 2 * num_ue; }
    double sinr_target() const;   // linear
    double min_rate() const;      // log2(1 + sinr_target)
    double total_capacity() const;

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

/// Parses a flat JSON object. Unknown keys are an error; `rho` may be a
/// scalar (applied to every UE) or a per-UE list.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Stable 64-bit FNV-1a digest of the canonical JSON form, as 16 hex digits.
std::string fingerprint(const ScenarioConfig& cfg);

/// Reads the whole file; throws std::runtime_error on I/O failure.
std::string read_text_file(const std::string& path);

} // namespace fran
