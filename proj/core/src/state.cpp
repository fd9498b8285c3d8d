#include "fran/state.hpp"

#include <stdexcept>
#include <string>

namespace fran {

SystemState make_state(int num_processors, int num_ue)
{
    SystemState s;
    s.processor_on.assign(num_processors, false);
    s.ue_d2d.assign(num_ue, false);
    s.cache.assign(num_ue, false);
    return s;
}

SystemState initial_state(const ScenarioConfig& cfg)
{
    SystemState s = make_state(cfg.num_processors(), cfg.num_ue);
    s.processor_on.assign(cfg.num_processors(), true);
    return s;
}

int encode_action(const ControlAction& a, int num_ue)
{
    const int proc = a.processor_index * 2 + (a.processor_on ? 1 : 0);
    const int ue = a.ue_index * 2 + (a.ue_d2d ? 1 : 0);
    return proc * 2 * num_ue + ue;
}

ControlAction decode_action(int index, int num_processors, int num_ue)
{
    if (index < 0 || index >= 4 * num_processors * num_ue)
        throw std::out_of_range("action index " + std::to_string(index) + " out of range");
    const int proc = index / (2 * num_ue);
    const int ue = index % (2 * num_ue);
    return ControlAction{proc / 2, proc % 2 == 1, ue / 2, ue % 2 == 1};
}

Eigen::VectorXd encode_state(const SystemState& s)
{
    const int N = s.num_processors();
    const int M = s.num_ue();
    Eigen::VectorXd v(N + 2 * M);
    for (int n = 0; n < N; ++n) v(n) = s.processor_on[n] ? 1.0 : 0.0;
    for (int m = 0; m < M; ++m) {
        v(N + m) = s.ue_d2d[m] ? 1.0 : 0.0;
        v(N + M + m) = s.cache[m] ? 1.0 : 0.0;
    }
    return v;
}

SystemState decode_state(const Eigen::VectorXd& v, int num_processors, int num_ue)
{
    if (v.size() != num_processors + 2 * num_ue) throw std::invalid_argument("state vector has wrong length");
    SystemState s = make_state(num_processors, num_ue);
    for (int n = 0; n < num_processors; ++n) s.processor_on[n] = v(n) > 0.5;
    for (int m = 0; m < num_ue; ++m) {
        s.ue_d2d[m] = v(num_processors + m) > 0.5;
        s.cache[m] = v(num_processors + num_ue + m) > 0.5;
    }
    return s;
}

std::uint32_t state_code(const SystemState& s)
{
    const int N = s.num_processors();
    const int M = s.num_ue();
    std::uint32_t code = 0;
    for (int n = 0; n < N; ++n)
        if (s.processor_on[n]) code |= 1u << n;
    for (int m = 0; m < M; ++m) {
        if (s.ue_d2d[m]) code |= 1u << (N + m);
        if (s.cache[m]) code |= 1u << (N + M + m);
    }
    return code;
}

SystemState state_from_code(std::uint32_t code, int num_processors, int num_ue)
{
    SystemState s = make_state(num_processors, num_ue);
    for (int n = 0; n < num_processors; ++n) s.processor_on[n] = (code >> n) & 1u;
    for (int m = 0; m < num_ue; ++m) {
        s.ue_d2d[m] = (code >> (num_processors + m)) & 1u;
        s.cache[m] = (code >> (num_processors + num_ue + m)) & 1u;
    }
    return s;
}

SystemState apply_action(const SystemState& s, const ControlAction& a)
{
    if (a.processor_index < 0 || a.processor_index >= s.num_processors())
        throw std::out_of_range("processor index " + std::to_string(a.processor_index) + " out of range");
    if (a.ue_index < 0 || a.ue_index >= s.num_ue())
        throw std::out_of_range("UE index " + std::to_string(a.ue_index) + " out of range");
    SystemState next = s;
    next.processor_on[a.processor_index] = a.processor_on;
    next.ue_d2d[a.ue_index] = a.ue_d2d;
    return next;
}

SystemState transition_cache(const SystemState& s, std::span<const double> rho, Rng& rng)
{
    if (static_cast<int>(rho.size()) != s.num_ue()) throw std::invalid_argument("rho has wrong length");
    SystemState next = s;
    for (int m = 0; m < s.num_ue(); ++m) next.cache[m] = bernoulli(rng, rho[m]);
    return next;
}

std::uint32_t processor_mask(const SystemState& s)
{
    std::uint32_t mask = 0;
    for (int n = 0; n < s.num_processors(); ++n)
        if (s.processor_on[n]) mask |= 1u << n;
    return mask;
}

std::uint32_t cran_mask(const SystemState& s)
{
    std::uint32_t mask = 0;
    for (int m = 0; m < s.num_ue(); ++m)
        if (!s.ue_d2d[m]) mask |= 1u << m;
    return mask;
}

double active_capacity(const SystemState& s, const ScenarioConfig& cfg)
{
    double cap = 0.0;
    for (int n = 0; n < s.num_processors(); ++n)
        if (s.processor_on[n]) cap += cfg.processor_capacity[n];
    return cap;
}

} // namespace fran
