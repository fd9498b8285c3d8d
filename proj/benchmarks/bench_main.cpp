#include <benchmark/benchmark.h>

#include "fran/dqn.hpp"
#include "fran/environment.hpp"
#include "fran/harness.hpp"
#include "fran/precoder.hpp"
#include "fran/radio.hpp"
#include "fran/topology.hpp"

using namespace fran;

namespace {

struct Instance {
    ScenarioConfig cfg;
    ChannelSet ch;

    explicit Instance(std::uint64_t seed)
    {
        const Topology topo = generate_topology(cfg, derive_seed(seed, 1));
        ch = sample_channels(topo, cfg, derive_seed(seed, 2));
    }
};

SocpInstance all_users_subproblem(const Instance& in)
{
    SocpInstance inst;
    for (int m = 0; m < in.cfg.num_ue; ++m) {
        inst.ues.push_back(m);
        inst.h.push_back(in.ch.h[m]);
    }
    inst.num_rrh = in.cfg.num_rrh;
    inst.antennas_per_rrh = in.cfg.antennas_per_rrh;
    inst.noise_power = in.cfg.noise_power;
    inst.sinr_target = in.cfg.sinr_target();
    inst.p_max = in.cfg.p_max;
    return inst;
}

void BM_SolveSubproblem(benchmark::State& st)
{
    const Instance in(st.range(0));
    const SocpInstance inst = all_users_subproblem(in);
    for (auto _ : st) benchmark::DoNotOptimize(solve_subproblem(inst));
}
BENCHMARK(BM_SolveSubproblem)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Optimize(benchmark::State& st)
{
    const Instance in(st.range(0));
    const PrecoderOptions opts = precoder_options(in.cfg);
    const std::vector<int> all{0, 1, 2, 3};
    for (auto _ : st) benchmark::DoNotOptimize(optimize(all, in.cfg.total_capacity(), in.ch, in.cfg, opts));
}
BENCHMARK(BM_Optimize)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& st)
{
    Rng rng(7);
    DqnAgent agent(DqnConfig{}, rng);
    std::bernoulli_distribution bit(0.5);
    for (int i = 0; i < 5000; ++i) {
        Transition t;
        t.state = Eigen::VectorXd::NullaryExpr(14, [&] { return bit(rng) ? 1.0 : 0.0; });
        t.next_state = Eigen::VectorXd::NullaryExpr(14, [&] { return bit(rng) ? 1.0 : 0.0; });
        t.action = static_cast<int>(rng() % 96);
        t.reward = -0.5;
        agent.memory().push(std::move(t));
    }
    for (auto _ : st) benchmark::DoNotOptimize(agent.train_step(rng));
}
BENCHMARK(BM_TrainStep);

// Steady-state step cost once every reachable state has been resolved.
void BM_EnvironmentStep(benchmark::State& st)
{
    Simulation sim = make_simulation(RunConfig{});
    Rng rng(11);
    SystemState s = sim.env.initial_state();
    const int actions = 96;
    for (int i = 0; i < 20000; ++i) s = sim.env.step(s, static_cast<int>(rng() % actions), rng).next;
    for (auto _ : st) {
        StepResult r = sim.env.step(s, static_cast<int>(rng() % actions), rng);
        s = r.next;
        benchmark::DoNotOptimize(r.reward);
    }
}
BENCHMARK(BM_EnvironmentStep);

} // namespace

BENCHMARK_MAIN();
