#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fran/precoding_solution.hpp"
#include "fran/scenario.hpp"
#include "fran/socp.hpp"
#include "fran/state.hpp"
#include "fran/topology.hpp"

namespace fran {

struct PrecoderOptions {
    double xi = 1e-6;
    int max_iters = 50;
    double power_rtol = 1e-6;
    SolverSettings solver;
    std::string dump_dir; // one JSON file per subproblem when non-empty
};

PrecoderOptions precoder_options(const ScenarioConfig& cfg);

using ZeroMask = std::vector<std::vector<bool>>; // [ue][k * L + l]

/// Reweighting state, indexed like PrecodingSolution::v.
struct ReweightState {
    std::vector<Eigen::VectorXd> theta;
    double xi = 1e-6;
    ZeroMask zero_mask;
};

/// One convex subproblem: minimise total transmit power of the served UEs
/// under per-UE SINR targets, per-RRH power caps, an optional weighted-l1
/// budget sum(theta |v|) <= budget, and pinned-zero coefficients.
struct SocpInstance {
    std::vector<int> ues;             // served UE indices
    std::vector<Eigen::VectorXcd> h;  // channel of each served UE
    int num_rrh = 0;
    int antennas_per_rrh = 0;
    double noise_power = 0.0;
    double sinr_target = 0.0; // linear
    double p_max = 0.0;

    bool has_budget = false;
    std::vector<Eigen::VectorXd> theta; // per served UE
    double budget = 0.0;

    ZeroMask zero_mask; // per served UE; empty means nothing pinned

    int num_antennas() const { return num_rrh * antennas_per_rrh; }
    bool pinned(int i, int j) const { return !zero_mask.empty() && zero_mask[i][j]; }
    std::string to_json() const;
};

struct SocpSolution {
    SolverStatus status = SolverStatus::numerical_failure;
    std::vector<Eigen::VectorXcd> v; // per served UE
    double power = 0.0;
    int iterations = 0;
    std::string message;
};

SocpSolution solve_subproblem(const SocpInstance& inst, const SolverSettings& settings = {});

/// Bit m of the result is set when UE m is served.
std::vector<int> ues_in_mask(std::uint32_t mask, int num_ue);

/// QoS-constrained power minimisation without the computing constraint.
PrecodingSolution init_precoding(std::span<const int> cran_set, const ChannelSet& ch, const ScenarioConfig& cfg,
                                 const PrecoderOptions& opts = {});

/// theta = 1 / (|v| + xi) for every coefficient. Throws std::invalid_argument for xi <= 0.
ReweightState update_weights(const PrecodingSolution& prev, double xi);

/// Zeroes coefficients with |v| < xi and adds them to the mask; returns the
/// number of newly masked entries.
int threshold_zeros(PrecodingSolution& sol, ZeroMask& mask, double xi);

/// Fills rates, per-RRH power, totals, nonzero count and computing load from sol.v.
void evaluate_precoding(PrecodingSolution& sol, const ChannelSet& ch, const ScenarioConfig& cfg);

/// Reweighted-l1 sparse precoding under the computing capacity `capacity`.
PrecodingSolution optimize(std::span<const int> cran_set, double capacity, const ChannelSet& ch,
                           const ScenarioConfig& cfg, const PrecoderOptions& opts);
PrecodingSolution optimize(const SystemState& state, const ChannelSet& ch, const ScenarioConfig& cfg,
                           const PrecoderOptions& opts);

/// Thread-safe memo of optimize() keyed by (served-UE mask, capacity).
class PrecodingCache {
public:
    PrecodingCache(const ChannelSet& ch, const ScenarioConfig& cfg, PrecoderOptions opts);

    const PrecodingSolution& get(std::uint32_t cran_mask, double capacity);
    std::size_t size() const;
    void clear();

private:
    ChannelSet ch_;
    ScenarioConfig cfg_;
    PrecoderOptions opts_;
    mutable std::mutex mu_;
    std::map<std::pair<std::uint32_t, double>, PrecodingSolution> memo_;
};

} // namespace fran
