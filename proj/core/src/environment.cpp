#include "fran/environment.hpp"

#include <stdexcept>

namespace fran {

std::vector<int> check_qos(const SystemState& state, const PrecodingSolution& cran, const ChannelSet& ch,
                           const ScenarioConfig& cfg)
{
    std::vector<int> violators;
    const double target = cfg.sinr_target();
    for (int m = 0; m < state.num_ue(); ++m) {
        if (state.ue_d2d[m]) {
            if (!state.cache[m] || d2d_sinr(m, state, ch, cfg) < target) violators.push_back(m);
        } else if (!cran.feasible()) {
            violators.push_back(m);
        }
    }
    return violators;
}

SystemState protecting_operation(const SystemState& state, const std::vector<int>& violators)
{
    if (violators.empty()) return state;
    SystemState out = state;
    std::fill(out.processor_on.begin(), out.processor_on.end(), true);
    for (int m : violators)
        if (out.ue_d2d.at(m)) out.ue_d2d[m] = false;
    return out;
}

Environment::Environment(ScenarioConfig cfg, ChannelSet ch, std::shared_ptr<PrecodingCache> cache)
    : cfg_(std::move(cfg)), ch_(std::move(ch)), cache_(std::move(cache))
{
    cfg_.validate();
    if (ch_.num_ue() != cfg_.num_ue || ch_.num_rrh != cfg_.num_rrh || ch_.antennas_per_rrh != cfg_.antennas_per_rrh)
        throw std::invalid_argument("channel set does not match the scenario");
    if (!cache_) cache_ = std::make_shared<PrecodingCache>(ch_, cfg_, precoder_options(cfg_));
}

StepResult Environment::step(const SystemState& state, const ControlAction& a, Rng& rng)
{
    SystemState s = transition_cache(apply_action(state, a), cfg_.rho, rng);
    const Resolution& r = resolve(s);
    return {r.next, r.reward, r.energy, r.penalized};
}

StepResult Environment::step(const SystemState& state, int action_index, Rng& rng)
{
    return step(state, decode_action(action_index, cfg_.num_processors(), cfg_.num_ue), rng);
}

const Resolution& Environment::resolve(const SystemState& post_transition)
{
    const std::uint32_t code = state_code(post_transition);
    auto it = memo_.find(code);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(code, compute(post_transition)).first->second;
}

Resolution Environment::compute(const SystemState& s)
{
    Resolution r;
    const PrecodingSolution* V = &cache_->get(cran_mask(s), active_capacity(s, cfg_));
    const std::vector<int> violators = check_qos(s, *V, ch_, cfg_);
    r.next = protecting_operation(s, violators);
    if (!violators.empty()) V = &cache_->get(cran_mask(r.next), active_capacity(r.next, cfg_));

    r.precoding_status = V->status;
    r.energy = system_energy(r.next, *V, cfg_);
    r.energy.protecting_triggered = !violators.empty();
    if (!V->feasible()) {
        r.penalized = true;
        r.reward = -cfg_.penalty_w;
    } else {
        r.reward = -r.energy.total_w;
    }
    return r;
}

void Environment::set_channels(ChannelSet ch)
{
    ch_ = std::move(ch);
    cache_ = std::make_shared<PrecodingCache>(ch_, cfg_, precoder_options(cfg_));
    memo_.clear();
}

void Environment::set_rho(std::vector<double> rho)
{
    cfg_.rho = std::move(rho);
    cfg_.validate();
}

} // namespace fran
