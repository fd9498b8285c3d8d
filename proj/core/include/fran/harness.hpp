#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fran/dqn.hpp"
#include "fran/environment.hpp"
#include "fran/policies.hpp"
#include "fran/qnetwork.hpp"
#include "fran/qtable.hpp"
#include "fran/scenario.hpp"
#include "fran/topology.hpp"

namespace fran {

const char* library_version();

/// Scenario plus training/evaluation settings, loaded from one flat JSON object.
struct RunConfig {
    ScenarioConfig scenario;

    long epochs = 32000;
    long warmup_steps = 1000;
    int train_every = 3;
    int target_sync_every = 480;
    int batch_size = 32;
    double gamma = 0.99;
    double learning_rate = 1e-4;
    int replay_capacity = 5000;
    std::vector<int> hidden_layers{24, 24};
    EpsilonSchedule epsilon;
    double q_alpha = 0.1;
    bool taken_action_target = false;
    double reward_scale = 0.01; // multiplies rewards stored for DQN updates; metrics stay in watts

    std::string policy = "drl"; // drl, drl-cran-only, q-learning, d2d-always, random
    std::string mode = "train";
    std::string out_dir = "out";
    int episodes = 10000;
    int smoothing_window = 500;
    bool record_wall_clock = false; // off keeps metrics files reproducible byte for byte

    std::uint64_t seed = 1;
    std::optional<std::uint64_t> topology_seed;
    std::optional<std::uint64_t> channel_seed;
    std::optional<std::uint64_t> training_seed;
    std::optional<std::uint64_t> evaluation_seed;

    std::vector<int> layer_dims(ActionSpace space) const;
    DqnConfig dqn_config(ActionSpace space) const;
    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

RunConfig run_config_from_json(const std::string& text);
std::string run_config_to_json(const RunConfig& cfg);

struct RunSeeds {
    std::uint64_t topology = 0;
    std::uint64_t channel = 0;
    std::uint64_t training = 0;
    std::uint64_t evaluation = 0;
};

/// Explicit per-stream seeds win; the rest derive from the master seed.
RunSeeds resolve_seeds(const RunConfig& cfg);

/// Topology and channels drawn from the run seeds, plus the environment.
struct Simulation {
    RunConfig cfg;
    RunSeeds seeds;
    Topology topology;
    Environment env;

    /// Redraws channels for the epoch when the scenario asks for it.
    void begin_epoch(std::uint64_t stream, long epoch);
};

Simulation make_simulation(const RunConfig& cfg, std::shared_ptr<PrecodingCache> cache = nullptr);

struct MetricsRow {
    long epoch = 0;
    double discounted_reward = 0.0;
    double mean_power_w = 0.0;
    int protections = 0;
    double epsilon = 0.0;
    double loss = 0.0; // mean over the last 100 updates
    double seconds = 0.0;
};

/// Shortest decimal form that parses back to the same double.
std::string format_number(double x);

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

/// Trailing moving average; entry i averages values[max(0, i - window + 1) .. i].
std::vector<double> trailing_mean(const std::vector<double>& values, int window);

struct TrainingResult {
    QNetwork net;
    AdamState adam;
    ActionSpace space = ActionSpace::full;
    std::vector<MetricsRow> metrics;
    long global_steps = 0;
    std::size_t memory_size = 0;
    long updates = 0;
    long syncs = 0;
};

/// Random warm-up into the replay memory, then epsilon-greedy epochs from the
/// initial state with periodic mini-batch updates and target syncs. Passing
/// `initial` starts from those weights (fresh optimizer and memory).
TrainingResult train_dqn(Simulation& sim, ActionSpace space, const QNetwork* initial = nullptr);

struct QLearningResult {
    QTable table;
    std::vector<MetricsRow> metrics;
};

/// Same interaction budget and exploration schedule as train_dqn.
QLearningResult train_q_learning(Simulation& sim);

struct EvaluationSummary {
    int episodes = 0;
    double mean_discounted_reward = 0.0;
    double stderr_discounted_reward = 0.0;
    double mean_power_w = 0.0;
    double stderr_power_w = 0.0;
    long protections = 0;
    long penalized_steps = 0;
    std::vector<double> discounted_reward; // per epoch
    std::vector<double> power_w;           // per epoch, mean over steps

    double reward_ci_low() const { return mean_discounted_reward - 1.96 * stderr_discounted_reward; }
    double reward_ci_high() const { return mean_discounted_reward + 1.96 * stderr_discounted_reward; }
    double power_ci_low() const { return mean_power_w - 1.96 * stderr_power_w; }
    double power_ci_high() const { return mean_power_w + 1.96 * stderr_power_w; }
};

/// Runs `episodes` epochs from the initial state; epoch e draws from its own
/// stream derived from `seed`, so results do not depend on evaluation order.
EvaluationSummary evaluate_policy(const Policy& policy, Simulation& sim, int episodes, std::uint64_t seed);

void write_evaluation_csv(const std::string& path, const EvaluationSummary& s);

/// Creates `dir` and checks that a file can be written there.
void ensure_writable_dir(const std::string& dir);

// File-producing entry points used by the command-line tool.

/// Writes metrics.csv, manifest.json and checkpoint.json (or qtable.csv).
std::vector<MetricsRow> run_training(const RunConfig& cfg);

/// Greedy evaluation of a checkpoint (or of a baseline when `checkpoint` is
/// empty). A scenario fingerprint mismatch is reported, not fatal.
struct EvaluationReport {
    EvaluationSummary summary;
    std::string warning;
};
EvaluationReport run_evaluation(const std::string& checkpoint, const RunConfig& cfg);

struct SweepEntry {
    double rho = 0.0;
    EvaluationSummary summary;
};
/// Trains and evaluates one model per rho, sharing topology and channels.
std::vector<SweepEntry> run_sweep(const RunConfig& cfg, const std::vector<double>& rhos);

/// Continues training from a checkpoint in the configured scenario.
std::vector<MetricsRow> run_transfer(const std::string& source_checkpoint, const RunConfig& cfg);

struct ViCheckReport {
    double optimal_value = 0.0;    // infinite-horizon V(s0)
    double horizon_value = 0.0;    // optimal expected return over one epoch
    double dqn_return = 0.0;       // evaluated mean discounted return of the trained DQN
    double q_learning_return = 0.0;
    int iterations = 0;
};
/// Value iteration on a small scenario, compared against trained agents.
ViCheckReport run_vi_check(const RunConfig& cfg);

} // namespace fran
