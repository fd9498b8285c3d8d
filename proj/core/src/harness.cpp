#include "fran/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "config_json.hpp"
#include "fran/oracle.hpp"

#ifndef FRAN_VERSION
#define FRAN_VERSION "0.0.0"
#endif

namespace fran {

namespace {

using detail::json;

// independent random streams within a run
constexpr std::uint64_t kTopologyStream = 1;
constexpr std::uint64_t kChannelStream = 2;
constexpr std::uint64_t kTrainingStream = 3;
constexpr std::uint64_t kEvaluationStream = 4;

// sub-streams of the training seed and channel redraw streams
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kEnvStream = 1;
constexpr std::uint64_t kAgentStream = 2;
constexpr std::uint64_t kWarmupEpochs = 1;
constexpr std::uint64_t kTrainingEpochs = 2;
constexpr std::uint64_t kEvaluationEpochs = 3;

constexpr std::size_t kLossWindow = 100;

const char* kMetricsHeader = "epoch,discounted_reward,mean_power_w,protections,epsilon,loss,seconds";

class LossWindow {
public:
    void add(double x)
    {
        values_.push_back(x);
        if (values_.size() > kLossWindow) values_.pop_front();
    }
    double mean() const
    {
        if (values_.empty()) return 0.0;
        return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
    }

private:
    std::deque<double> values_;
};

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

struct EpochAccumulator {
    double discounted = 0.0;
    double discount = 1.0;
    double power = 0.0;
    int protections = 0;
    int steps = 0;

    void add(const StepResult& r, double gamma)
    {
        discounted += discount * r.reward;
        discount *= gamma;
        power += -r.reward;
        protections += r.info.protecting_triggered ? 1 : 0;
        ++steps;
    }
    double mean_power() const { return steps ? power / steps : 0.0; }
};

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

json seeds_json(const RunSeeds& s)
{
    return {{"topology", s.topology}, {"channel", s.channel}, {"training", s.training}, {"evaluation", s.evaluation}};
}

void write_manifest(const RunConfig& cfg, const RunSeeds& seeds, const std::string& mode, double wall_seconds,
                    const json& extra = json::object())
{
    json m;
    m["version"] = library_version();
    m["mode"] = mode;
    m["config"] = json::parse(run_config_to_json(cfg));
    m["seeds"] = seeds_json(seeds);
    m["fingerprint"] = fingerprint(cfg.scenario);
    m["wall_clock_seconds"] = wall_seconds;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    write_text(std::filesystem::path(cfg.out_dir) / "manifest.json", m.dump(2) + "\n");
}

json summary_json(const EvaluationSummary& s)
{
    return {{"episodes", s.episodes},
            {"mean_discounted_reward", s.mean_discounted_reward},
            {"stderr_discounted_reward", s.stderr_discounted_reward},
            {"reward_ci95", {s.reward_ci_low(), s.reward_ci_high()}},
            {"mean_power_w", s.mean_power_w},
            {"stderr_power_w", s.stderr_power_w},
            {"power_ci95", {s.power_ci_low(), s.power_ci_high()}},
            {"protections", s.protections},
            {"penalized_steps", s.penalized_steps}};
}

void mean_and_stderr(const std::vector<double>& x, double& mean, double& se)
{
    const double n = static_cast<double>(x.size());
    mean = n > 0 ? std::accumulate(x.begin(), x.end(), 0.0) / n : 0.0;
    if (x.size() < 2) {
        se = 0.0;
        return;
    }
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / (n - 1.0) / n);
}

void write_qtable_csv(const std::string& path, const QTable& table, int num_states)
{
    std::ostringstream out;
    out << "state,action,value\n";
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < table.num_actions(); ++a) {
            const double v = table.value(static_cast<std::uint32_t>(s), a);
            if (v != 0.0) out << s << ',' << a << ',' << format_number(v) << '\n';
        }
    write_text(path, out.str());
}

QTable read_qtable_csv(const std::string& path, const RunConfig& cfg)
{
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "state,action,value")
        throw std::runtime_error("not a Q-table file: " + path);
    // the stored values are final; rebuild them with a unit learning rate
    QTable table(cfg.scenario.num_actions(), 1.0, 0.0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::uint32_t s = 0;
        int a = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream row(line);
        if (!(row >> s >> c1 >> a >> c2) || c1 != ',' || c2 != ',')
            throw std::runtime_error("malformed Q-table row in " + path);
        std::string rest;
        row >> rest;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
        if (ec != std::errc() || ptr != rest.data() + rest.size())
            throw std::runtime_error("malformed Q-table value in " + path);
        table.update(s, a, v, 0, true);
    }
    return table;
}

ActionSpace space_for_policy(const std::string& policy)
{
    return policy_kind_from_string(policy) == PolicyKind::drl_cran_only ? ActionSpace::processor_only
                                                                        : ActionSpace::full;
}

std::string rho_label(double rho)
{
    std::string s = format_number(rho);
    for (char& c : s)
        if (c == '.') c = 'p';
    return "rho_" + s;
}

} // namespace

const char* library_version() { return FRAN_VERSION; }

std::vector<int> RunConfig::layer_dims(ActionSpace space) const
{
    std::vector<int> dims{scenario.state_size()};
    dims.insert(dims.end(), hidden_layers.begin(), hidden_layers.end());
    dims.push_back(action_count(space, scenario));
    return dims;
}

DqnConfig RunConfig::dqn_config(ActionSpace space) const
{
    DqnConfig d;
    d.layer_dims = layer_dims(space);
    d.learning_rate = learning_rate;
    d.gamma = gamma;
    d.batch_size = batch_size;
    d.replay_capacity = static_cast<std::size_t>(replay_capacity);
    d.taken_action_target = taken_action_target;
    return d;
}

void RunConfig::validate() const
{
    scenario.validate();
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid run config: ") + what);
    };
    require(epochs >= 0, "epochs must be >= 0");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(warmup_steps >= batch_size, "warmup_steps must be >= batch_size");
    require(train_every >= 1 && target_sync_every >= 1, "cadences must be positive");
    require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
    require(learning_rate > 0.0, "learning_rate must be > 0");
    require(replay_capacity >= batch_size, "replay_capacity must be >= batch_size");
    for (int h : hidden_layers) require(h >= 1, "hidden layer sizes must be positive");
    require(epsilon.start >= 0.0 && epsilon.start <= 1.0 && epsilon.end >= 0.0 && epsilon.end <= 1.0,
            "epsilon values must lie in [0, 1]");
    require(epsilon.anneal_steps >= 0, "epsilon_anneal_steps must be >= 0");
    require(reward_scale > 0.0, "reward_scale must be > 0");
    require(q_alpha >= 0.0 && q_alpha <= 1.0, "q_alpha must lie in [0, 1]");
    require(episodes >= 1, "episodes must be >= 1");
    require(smoothing_window >= 1, "smoothing_window must be >= 1");
    policy_kind_from_string(policy);
}

RunConfig run_config_from_json(const std::string& text)
{
    json obj = detail::parse_config_object(text);
    RunConfig cfg;
    std::set<std::string> consumed;
    detail::read_scenario_keys(obj, cfg.scenario, consumed);
    detail::take(obj, "epochs", cfg.epochs, consumed);
    detail::take(obj, "warmup_steps", cfg.warmup_steps, consumed);
    detail::take(obj, "train_every", cfg.train_every, consumed);
    detail::take(obj, "target_sync_every", cfg.target_sync_every, consumed);
    detail::take(obj, "batch_size", cfg.batch_size, consumed);
    detail::take(obj, "gamma", cfg.gamma, consumed);
    detail::take(obj, "learning_rate", cfg.learning_rate, consumed);
    detail::take(obj, "replay_capacity", cfg.replay_capacity, consumed);
    detail::take(obj, "hidden_layers", cfg.hidden_layers, consumed);
    detail::take(obj, "epsilon_start", cfg.epsilon.start, consumed);
    detail::take(obj, "epsilon_end", cfg.epsilon.end, consumed);
    detail::take(obj, "epsilon_anneal_steps", cfg.epsilon.anneal_steps, consumed);
    detail::take(obj, "q_alpha", cfg.q_alpha, consumed);
    detail::take(obj, "taken_action_target", cfg.taken_action_target, consumed);
    detail::take(obj, "reward_scale", cfg.reward_scale, consumed);
    detail::take(obj, "policy", cfg.policy, consumed);
    detail::take(obj, "mode", cfg.mode, consumed);
    detail::take(obj, "out_dir", cfg.out_dir, consumed);
    detail::take(obj, "episodes", cfg.episodes, consumed);
    detail::take(obj, "smoothing_window", cfg.smoothing_window, consumed);
    detail::take(obj, "record_wall_clock", cfg.record_wall_clock, consumed);
    detail::take(obj, "seed", cfg.seed, consumed);
    for (auto [key, slot] : {std::pair{"topology_seed", &cfg.topology_seed}, std::pair{"channel_seed", &cfg.channel_seed},
                             std::pair{"training_seed", &cfg.training_seed},
                             std::pair{"evaluation_seed", &cfg.evaluation_seed}}) {
        std::uint64_t v = 0;
        std::set<std::string> seen;
        detail::take(obj, key, v, seen);
        if (!seen.empty()) {
            *slot = v;
            consumed.insert(key);
        }
    }
    detail::reject_unknown_keys(obj, consumed);
    cfg.validate();
    return cfg;
}

std::string run_config_to_json(const RunConfig& cfg)
{
    json j = detail::scenario_json(cfg.scenario);
    j["epochs"] = cfg.epochs;
    j["warmup_steps"] = cfg.warmup_steps;
    j["train_every"] = cfg.train_every;
    j["target_sync_every"] = cfg.target_sync_every;
    j["batch_size"] = cfg.batch_size;
    j["gamma"] = cfg.gamma;
    j["learning_rate"] = cfg.learning_rate;
    j["replay_capacity"] = cfg.replay_capacity;
    j["hidden_layers"] = cfg.hidden_layers;
    j["epsilon_start"] = cfg.epsilon.start;
    j["epsilon_end"] = cfg.epsilon.end;
    j["epsilon_anneal_steps"] = cfg.epsilon.anneal_steps;
    j["q_alpha"] = cfg.q_alpha;
    j["taken_action_target"] = cfg.taken_action_target;
    j["reward_scale"] = cfg.reward_scale;
    j["policy"] = cfg.policy;
    j["mode"] = cfg.mode;
    j["out_dir"] = cfg.out_dir;
    j["episodes"] = cfg.episodes;
    j["smoothing_window"] = cfg.smoothing_window;
    j["record_wall_clock"] = cfg.record_wall_clock;
    j["seed"] = cfg.seed;
    if (cfg.topology_seed) j["topology_seed"] = *cfg.topology_seed;
    if (cfg.channel_seed) j["channel_seed"] = *cfg.channel_seed;
    if (cfg.training_seed) j["training_seed"] = *cfg.training_seed;
    if (cfg.evaluation_seed) j["evaluation_seed"] = *cfg.evaluation_seed;
    return j.dump(2);
}

RunSeeds resolve_seeds(const RunConfig& cfg)
{
    RunSeeds s;
    s.topology = cfg.topology_seed.value_or(derive_seed(cfg.seed, kTopologyStream));
    s.channel = cfg.channel_seed.value_or(derive_seed(cfg.seed, kChannelStream));
    s.training = cfg.training_seed.value_or(derive_seed(cfg.seed, kTrainingStream));
    s.evaluation = cfg.evaluation_seed.value_or(derive_seed(cfg.seed, kEvaluationStream));
    return s;
}

void Simulation::begin_epoch(std::uint64_t stream, long epoch)
{
    if (!cfg.scenario.redraw_channels_per_epoch) return;
    env.set_channels(
        sample_channels(topology, cfg.scenario, derive_seed(seeds.channel, stream, static_cast<std::uint64_t>(epoch))));
}

Simulation make_simulation(const RunConfig& cfg, std::shared_ptr<PrecodingCache> cache)
{
    cfg.validate();
    RunSeeds seeds = resolve_seeds(cfg);
    Topology topo = generate_topology(cfg.scenario, seeds.topology);
    ChannelSet ch = sample_channels(topo, cfg.scenario, seeds.channel);
    Environment env(cfg.scenario, std::move(ch), std::move(cache));
    return Simulation{cfg, seeds, std::move(topo), std::move(env)};
}

std::string format_number(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows)
{
    std::ostringstream out;
    out << kMetricsHeader << '\n';
    for (const auto& r : rows)
        out << r.epoch << ',' << format_number(r.discounted_reward) << ',' << format_number(r.mean_power_w) << ','
            << r.protections << ',' << format_number(r.epsilon) << ',' << format_number(r.loss) << ','
            << format_number(r.seconds) << '\n';
    write_text(path, out.str());
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path)
{
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader) throw std::runtime_error("not a metrics file: " + path);
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 7) throw std::runtime_error("malformed metrics row in " + path);
        auto num = [&](const std::string& c) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (ec != std::errc() || ptr != c.data() + c.size())
                throw std::runtime_error("malformed number '" + c + "' in " + path);
            return v;
        };
        MetricsRow r;
        r.epoch = static_cast<long>(num(cells[0]));
        r.discounted_reward = num(cells[1]);
        r.mean_power_w = num(cells[2]);
        r.protections = static_cast<int>(num(cells[3]));
        r.epsilon = num(cells[4]);
        r.loss = num(cells[5]);
        r.seconds = num(cells[6]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<double> trailing_mean(const std::vector<double>& values, int window)
{
    if (window < 1) throw std::invalid_argument("smoothing window must be >= 1");
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i];
        if (i >= static_cast<std::size_t>(window)) sum -= values[i - window];
        out[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, window));
    }
    return out;
}

TrainingResult train_dqn(Simulation& sim, ActionSpace space, const QNetwork* initial)
{
    const RunConfig& cfg = sim.cfg;
    const ScenarioConfig& sc = cfg.scenario;
    const int T = sc.steps_per_epoch;
    const int num_actions = action_count(space, sc);
    const Stopwatch clock(cfg.record_wall_clock);

    Rng init_rng(derive_seed(sim.seeds.training, kInitStream));
    Rng env_rng(derive_seed(sim.seeds.training, kEnvStream));
    Rng agent_rng(derive_seed(sim.seeds.training, kAgentStream));
    const DqnConfig dc = cfg.dqn_config(space);
    DqnAgent agent = initial ? DqnAgent(dc, *initial) : DqnAgent(dc, init_rng);

    const SystemState start = sim.env.initial_state();
    SystemState s = start;
    for (long i = 0, k = 0; i < cfg.warmup_steps; ++i) {
        if (k == 0) sim.begin_epoch(kWarmupEpochs, i / T);
        const int a = std::uniform_int_distribution<int>(0, num_actions - 1)(agent_rng);
        const StepResult r = sim.env.step(s, to_control(space, a, sc), env_rng);
        const bool terminal = k == T - 1;
        agent.memory().push({encode_state(s), a, cfg.reward_scale * r.reward, encode_state(r.next), terminal});
        s = terminal ? start : r.next;
        k = terminal ? 0 : k + 1;
    }

    TrainingResult out;
    LossWindow losses;
    long t = 0;
    for (long e = 0; e < cfg.epochs; ++e) {
        sim.begin_epoch(kTrainingEpochs, e);
        s = start;
        EpochAccumulator acc;
        for (int k = 0; k < T; ++k) {
            Eigen::VectorXd x = encode_state(s);
            const int a = select_action(agent.online(), x, t, cfg.epsilon, agent_rng);
            const StepResult r = sim.env.step(s, to_control(space, a, sc), env_rng);
            const bool terminal = k == T - 1;
            agent.memory().push({std::move(x), a, cfg.reward_scale * r.reward, encode_state(r.next), terminal});
            if ((t + 1) % cfg.train_every == 0) losses.add(agent.train_step(agent_rng));
            if ((t + 1) % cfg.target_sync_every == 0) agent.sync_target();
            acc.add(r, cfg.gamma);
            s = r.next;
            ++t;
        }
        out.metrics.push_back({e + 1, acc.discounted, acc.mean_power(), acc.protections, cfg.epsilon.value(t - 1),
                               losses.mean(), clock.seconds()});
    }
    if (!agent.online().all_finite()) throw std::runtime_error("training diverged: non-finite network parameters");

    out.net = agent.online();
    out.adam = agent.optimizer();
    out.space = space;
    out.global_steps = t;
    out.memory_size = agent.memory().size();
    out.updates = agent.updates();
    out.syncs = agent.syncs();
    return out;
}

QLearningResult train_q_learning(Simulation& sim)
{
    const RunConfig& cfg = sim.cfg;
    const ScenarioConfig& sc = cfg.scenario;
    const int T = sc.steps_per_epoch;
    const int N = sc.num_processors();
    const Stopwatch clock(cfg.record_wall_clock);

    Rng env_rng(derive_seed(sim.seeds.training, kEnvStream));
    Rng agent_rng(derive_seed(sim.seeds.training, kAgentStream));
    QLearningResult out{QTable(sc.num_actions(), cfg.q_alpha, cfg.gamma), {}};
    QTable& q = out.table;

    const SystemState start = sim.env.initial_state();
    SystemState s = start;
    for (long i = 0, k = 0; i < cfg.warmup_steps; ++i) {
        if (k == 0) sim.begin_epoch(kWarmupEpochs, i / T);
        const int a = std::uniform_int_distribution<int>(0, sc.num_actions() - 1)(agent_rng);
        const StepResult r = sim.env.step(s, decode_action(a, N, sc.num_ue), env_rng);
        const bool terminal = k == T - 1;
        q.update(state_code(s), a, r.reward, state_code(r.next), terminal);
        s = terminal ? start : r.next;
        k = terminal ? 0 : k + 1;
    }

    long t = 0;
    for (long e = 0; e < cfg.epochs; ++e) {
        sim.begin_epoch(kTrainingEpochs, e);
        s = start;
        EpochAccumulator acc;
        for (int k = 0; k < T; ++k) {
            const std::uint32_t code = state_code(s);
            const double u = std::uniform_real_distribution<double>(0.0, 1.0)(agent_rng);
            const int a = u < cfg.epsilon.value(t)
                              ? std::uniform_int_distribution<int>(0, sc.num_actions() - 1)(agent_rng)
                              : q.greedy(code);
            const StepResult r = sim.env.step(s, decode_action(a, N, sc.num_ue), env_rng);
            q.update(code, a, r.reward, state_code(r.next), k == T - 1);
            acc.add(r, cfg.gamma);
            s = r.next;
            ++t;
        }
        out.metrics.push_back({e + 1, acc.discounted, acc.mean_power(), acc.protections, cfg.epsilon.value(t - 1),
                               0.0, clock.seconds()});
    }
    return out;
}

EvaluationSummary evaluate_policy(const Policy& policy, Simulation& sim, int episodes, std::uint64_t seed)
{
    if (episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
    const int T = sim.cfg.scenario.steps_per_epoch;
    EvaluationSummary out;
    out.episodes = episodes;
    const SystemState start = sim.env.initial_state();
    for (int e = 0; e < episodes; ++e) {
        sim.begin_epoch(kEvaluationEpochs, e);
        Rng rng(derive_seed(seed, 0, static_cast<std::uint64_t>(e)));
        SystemState s = start;
        EpochAccumulator acc;
        for (int k = 0; k < T; ++k) {
            const StepResult r = sim.env.step(s, policy.act(s, k, rng), rng);
            acc.add(r, sim.cfg.gamma);
            out.penalized_steps += r.penalized ? 1 : 0;
            s = r.next;
        }
        out.protections += acc.protections;
        out.discounted_reward.push_back(acc.discounted);
        out.power_w.push_back(acc.mean_power());
    }
    mean_and_stderr(out.discounted_reward, out.mean_discounted_reward, out.stderr_discounted_reward);
    mean_and_stderr(out.power_w, out.mean_power_w, out.stderr_power_w);
    return out;
}

void write_evaluation_csv(const std::string& path, const EvaluationSummary& s)
{
    std::ostringstream out;
    out << "epoch,discounted_reward,mean_power_w\n";
    for (std::size_t e = 0; e < s.discounted_reward.size(); ++e)
        out << e + 1 << ',' << format_number(s.discounted_reward[e]) << ',' << format_number(s.power_w[e]) << '\n';
    write_text(path, out.str());
}

void ensure_writable_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
    const auto probe = std::filesystem::path(dir) / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw std::runtime_error("output directory " + dir + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

std::vector<MetricsRow> run_training(const RunConfig& cfg)
{
    cfg.validate();
    ensure_writable_dir(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    Simulation sim = make_simulation(cfg);
    const std::filesystem::path dir(cfg.out_dir);
    std::vector<MetricsRow> metrics;
    json extra = json::object();

    const PolicyKind kind = policy_kind_from_string(cfg.policy);
    if (kind == PolicyKind::q_learning) {
        QLearningResult res = train_q_learning(sim);
        write_qtable_csv((dir / "qtable.csv").string(), res.table, 1 << cfg.scenario.state_size());
        metrics = std::move(res.metrics);
    } else if (kind == PolicyKind::drl || kind == PolicyKind::drl_cran_only) {
        TrainingResult res = train_dqn(sim, space_for_policy(cfg.policy));
        save_checkpoint((dir / "checkpoint.json").string(),
                        {res.net, res.adam, fingerprint(cfg.scenario), to_string(res.space)});
        extra = {{"global_steps", res.global_steps}, {"updates", res.updates}, {"target_syncs", res.syncs}};
        metrics = std::move(res.metrics);
    } else {
        throw std::invalid_argument(std::string("policy '") + cfg.policy + "' is not trainable");
    }
    write_metrics_csv((dir / "metrics.csv").string(), metrics);
    write_manifest(cfg, sim.seeds, "train",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), extra);
    return metrics;
}

EvaluationReport run_evaluation(const std::string& checkpoint, const RunConfig& cfg)
{
    cfg.validate();
    ensure_writable_dir(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    Simulation sim = make_simulation(cfg);
    EvaluationReport report;

    std::unique_ptr<Policy> policy;
    if (!checkpoint.empty() && checkpoint.ends_with(".csv")) {
        policy = std::make_unique<QTablePolicy>(read_qtable_csv(checkpoint, cfg), cfg.scenario);
    } else if (!checkpoint.empty()) {
        Checkpoint ck = load_checkpoint(checkpoint);
        if (ck.fingerprint != fingerprint(cfg.scenario)) {
            report.warning = "checkpoint was trained on scenario " + ck.fingerprint + ", evaluating on " +
                             fingerprint(cfg.scenario);
            std::cerr << "warning: " << report.warning << '\n';
        }
        policy = std::make_unique<NetworkPolicy>(std::move(ck.net), action_space_from_string(ck.action_space),
                                                 cfg.scenario);
    } else {
        switch (policy_kind_from_string(cfg.policy)) {
        case PolicyKind::random: policy = std::make_unique<RandomPolicy>(cfg.scenario); break;
        case PolicyKind::d2d_always: policy = std::make_unique<D2dAlwaysPolicy>(cfg.scenario); break;
        default: throw std::invalid_argument("policy '" + cfg.policy + "' needs --checkpoint");
        }
    }

    report.summary = evaluate_policy(*policy, sim, cfg.episodes, sim.seeds.evaluation);
    const std::filesystem::path dir(cfg.out_dir);
    write_evaluation_csv((dir / "eval.csv").string(), report.summary);
    json summary = summary_json(report.summary);
    summary["policy"] = to_string(policy->kind());
    summary["checkpoint"] = checkpoint;
    if (!report.warning.empty()) summary["warning"] = report.warning;
    write_text(dir / "eval_summary.json", summary.dump(2) + "\n");
    write_manifest(cfg, sim.seeds, "eval",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return report;
}

std::vector<SweepEntry> run_sweep(const RunConfig& cfg, const std::vector<double>& rhos)
{
    cfg.validate();
    if (rhos.size() < 2) throw std::invalid_argument("a sweep needs at least two rho values");
    ensure_writable_dir(cfg.out_dir);
    const PolicyKind kind = policy_kind_from_string(cfg.policy);
    if (kind != PolicyKind::drl && kind != PolicyKind::drl_cran_only)
        throw std::invalid_argument("sweeps train DQN policies only");

    std::vector<SweepEntry> out;
    std::shared_ptr<PrecodingCache> shared;
    for (double rho : rhos) {
        RunConfig c = cfg;
        c.scenario.rho.assign(static_cast<std::size_t>(c.scenario.num_ue), rho);
        c.out_dir = (std::filesystem::path(cfg.out_dir) / rho_label(rho)).string();
        ensure_writable_dir(c.out_dir);
        Simulation sim = make_simulation(c, shared);
        shared = sim.env.precoding_cache(); // rho does not change precoding

        const auto t0 = std::chrono::steady_clock::now();
        TrainingResult res = train_dqn(sim, space_for_policy(c.policy));
        const std::filesystem::path dir(c.out_dir);
        save_checkpoint((dir / "checkpoint.json").string(),
                        {res.net, res.adam, fingerprint(c.scenario), to_string(res.space)});
        write_metrics_csv((dir / "metrics.csv").string(), res.metrics);

        NetworkPolicy policy(res.net, res.space, c.scenario);
        EvaluationSummary summary = evaluate_policy(policy, sim, c.episodes, sim.seeds.evaluation);
        write_evaluation_csv((dir / "eval.csv").string(), summary);
        write_manifest(c, sim.seeds, "sweep",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        out.push_back({rho, std::move(summary)});
    }

    std::ostringstream table;
    table << "rho,mean_power_w,power_ci_low,power_ci_high,mean_discounted_reward,reward_ci_low,reward_ci_high\n";
    for (const auto& e : out)
        table << format_number(e.rho) << ',' << format_number(e.summary.mean_power_w) << ','
              << format_number(e.summary.power_ci_low()) << ',' << format_number(e.summary.power_ci_high()) << ','
              << format_number(e.summary.mean_discounted_reward) << ',' << format_number(e.summary.reward_ci_low())
              << ',' << format_number(e.summary.reward_ci_high()) << '\n';
    write_text(std::filesystem::path(cfg.out_dir) / "sweep.csv", table.str());
    return out;
}

std::vector<MetricsRow> run_transfer(const std::string& source_checkpoint, const RunConfig& cfg)
{
    cfg.validate();
    ensure_writable_dir(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    Checkpoint src = load_checkpoint(source_checkpoint);
    const ActionSpace space = action_space_from_string(src.action_space);
    if (src.net.layer_dims() != cfg.layer_dims(space))
        throw std::invalid_argument("source checkpoint shape does not match the target scenario");

    Simulation sim = make_simulation(cfg);
    TrainingResult res = train_dqn(sim, space, &src.net);
    const std::filesystem::path dir(cfg.out_dir);
    save_checkpoint((dir / "checkpoint.json").string(), {res.net, res.adam, fingerprint(cfg.scenario), to_string(space)});
    write_metrics_csv((dir / "metrics.csv").string(), res.metrics);
    write_manifest(cfg, sim.seeds, "transfer",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                   {{"source_checkpoint", source_checkpoint}, {"source_fingerprint", src.fingerprint}});
    return res.metrics;
}

ViCheckReport run_vi_check(const RunConfig& cfg)
{
    cfg.validate();
    ensure_writable_dir(cfg.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig c = cfg;
    if ((1 << std::min(c.scenario.state_size(), 30)) > 4096) c.scenario = reduced_scenario(cfg.scenario.rho.front());

    Simulation sim = make_simulation(c);
    const TabularMdp mdp = build_tabular_mdp(sim.env);
    const ValueFunction vf = value_iteration(mdp, c.gamma);
    const FiniteHorizonValues fh = finite_horizon_values(mdp, c.gamma, c.scenario.steps_per_epoch);
    const int s0 = static_cast<int>(state_code(sim.env.initial_state()));

    ViCheckReport report;
    report.optimal_value = vf.v(s0);
    report.horizon_value = fh.v(s0);
    report.iterations = vf.iterations;

    TrainingResult dqn = train_dqn(sim, ActionSpace::full);
    NetworkPolicy greedy(dqn.net, ActionSpace::full, c.scenario);
    report.dqn_return = evaluate_policy(greedy, sim, c.episodes, sim.seeds.evaluation).mean_discounted_reward;

    QLearningResult ql = train_q_learning(sim);
    QTablePolicy tab(ql.table, c.scenario);
    report.q_learning_return = evaluate_policy(tab, sim, c.episodes, sim.seeds.evaluation).mean_discounted_reward;

    const std::filesystem::path dir(c.out_dir);
    write_value_csv((dir / "vi_values.csv").string(), vf);
    json summary = {{"optimal_value_s0", report.optimal_value},
                    {"epoch_optimal_value_s0", report.horizon_value},
                    {"value_iteration_iterations", report.iterations},
                    {"dqn_mean_discounted_reward", report.dqn_return},
                    {"q_learning_mean_discounted_reward", report.q_learning_return},
                    {"dqn_gap", std::abs(report.dqn_return - report.horizon_value) / std::abs(report.horizon_value)},
                    {"q_learning_gap",
                     std::abs(report.q_learning_return - report.horizon_value) / std::abs(report.horizon_value)}};
    write_text(dir / "vi_summary.json", summary.dump(2) + "\n");
    write_manifest(c, sim.seeds, "vi-check",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return report;
}

} // namespace fran
