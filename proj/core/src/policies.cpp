#include "fran/policies.hpp"

#include <stdexcept>

namespace fran {

const char* to_string(ActionSpace a) { return a == ActionSpace::full ? "full" : "processor-only"; }

ActionSpace action_space_from_string(const std::string& s)
{
    if (s == "full") return ActionSpace::full;
    if (s == "processor-only") return ActionSpace::processor_only;
    throw std::invalid_argument("unknown action space '" + s + "'");
}

int action_count(ActionSpace space, const ScenarioConfig& cfg)
{
    return space == ActionSpace::full ? cfg.num_actions() : 2 * cfg.num_processors();
}

ControlAction to_control(ActionSpace space, int index, const ScenarioConfig& cfg)
{
    if (space == ActionSpace::full) return decode_action(index, cfg.num_processors(), cfg.num_ue);
    if (index < 0 || index >= 2 * cfg.num_processors()) throw std::out_of_range("processor-only action index");
    return ControlAction{index / 2, index % 2 == 1, 0, false};
}

ControlAction d2d_always_action(long t, const ScenarioConfig& cfg)
{
    if (t < 0) throw std::invalid_argument("negative step index");
    return ControlAction{static_cast<int>(t % cfg.num_processors()), false, static_cast<int>(t % cfg.num_ue), true};
}

ControlAction random_action(Rng& rng, const ScenarioConfig& cfg)
{
    const int a = std::uniform_int_distribution<int>(0, cfg.num_actions() - 1)(rng);
    return decode_action(a, cfg.num_processors(), cfg.num_ue);
}

ControlAction cran_only_action(const QNetwork& net, const Eigen::VectorXd& state_vec, long t,
                               const EpsilonSchedule& sched, Rng& rng, const ScenarioConfig& cfg)
{
    if (net.output_size() != 2 * cfg.num_processors())
        throw std::invalid_argument("C-RAN-only policy needs a processor-only head");
    return to_control(ActionSpace::processor_only, select_action(net, state_vec, t, sched, rng), cfg);
}

const char* to_string(PolicyKind k)
{
    switch (k) {
    case PolicyKind::drl: return "drl";
    case PolicyKind::drl_cran_only: return "drl-cran-only";
    case PolicyKind::q_learning: return "q-learning";
    case PolicyKind::d2d_always: return "d2d-always";
    case PolicyKind::random: return "random";
    }
    return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& s)
{
    for (PolicyKind k : {PolicyKind::drl, PolicyKind::drl_cran_only, PolicyKind::q_learning, PolicyKind::d2d_always,
                         PolicyKind::random})
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown policy '" + s + "'");
}

NetworkPolicy::NetworkPolicy(QNetwork net, ActionSpace space, ScenarioConfig cfg)
    : net_(std::move(net)), space_(space), cfg_(std::move(cfg))
{
    if (net_.input_size() != cfg_.state_size()) throw std::invalid_argument("network input does not match the state");
    if (net_.output_size() != action_count(space_, cfg_))
        throw std::invalid_argument("network head does not match the action space");
}

PolicyKind NetworkPolicy::kind() const
{
    return space_ == ActionSpace::full ? PolicyKind::drl : PolicyKind::drl_cran_only;
}

ControlAction NetworkPolicy::act(const SystemState& s, long, Rng&) const
{
    return to_control(space_, greedy_action(net_.forward(encode_state(s))), cfg_);
}

QTablePolicy::QTablePolicy(QTable table, ScenarioConfig cfg) : table_(std::move(table)), cfg_(std::move(cfg))
{
    if (table_.num_actions() != cfg_.num_actions()) throw std::invalid_argument("Q-table does not match the scenario");
}

ControlAction QTablePolicy::act(const SystemState& s, long, Rng&) const
{
    return decode_action(table_.greedy(state_code(s)), cfg_.num_processors(), cfg_.num_ue);
}

ControlAction D2dAlwaysPolicy::act(const SystemState&, long t, Rng&) const { return d2d_always_action(t, cfg_); }

ControlAction RandomPolicy::act(const SystemState&, long, Rng& rng) const { return random_action(rng, cfg_); }

} // namespace fran
