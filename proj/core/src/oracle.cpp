#include "fran/oracle.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace fran {

ScenarioConfig reduced_scenario(double rho)
{
    ScenarioConfig cfg;
    cfg.num_rrh = 2;
    cfg.num_ue = 2;
    cfg.processor_power = {21.6, 6.4};
    cfg.processor_capacity = {6.0, 4.0};
    cfg.rho = {rho, rho};
    return cfg;
}

TabularMdp build_tabular_mdp(Environment& env, int max_states)
{
    const ScenarioConfig& cfg = env.config();
    const int N = cfg.num_processors();
    const int M = cfg.num_ue;
    const int bits = cfg.state_size();
    if (bits > 30 || (1 << bits) > max_states)
        throw std::invalid_argument("scenario too large to enumerate (" + std::to_string(bits) + " state bits)");

    TabularMdp mdp;
    mdp.num_states = 1 << bits;
    mdp.num_actions = cfg.num_actions();
    mdp.reward.assign(static_cast<std::size_t>(mdp.num_states) * mdp.num_actions, 0.0);
    mdp.outcomes.resize(mdp.reward.size());

    // probability of each joint cache outcome
    std::vector<double> cache_prob(1u << M, 1.0);
    for (std::uint32_t c = 0; c < cache_prob.size(); ++c)
        for (int m = 0; m < M; ++m) cache_prob[c] *= (c >> m & 1U) ? cfg.rho[m] : 1.0 - cfg.rho[m];

    for (int s = 0; s < mdp.num_states; ++s) {
        const SystemState state = state_from_code(static_cast<std::uint32_t>(s), N, M);
        for (int a = 0; a < mdp.num_actions; ++a) {
            SystemState after = apply_action(state, decode_action(a, N, M));
            std::map<int, double> next;
            double r = 0.0;
            for (std::uint32_t c = 0; c < cache_prob.size(); ++c) {
                if (cache_prob[c] == 0.0) continue;
                for (int m = 0; m < M; ++m) after.cache[m] = (c >> m & 1U) != 0;
                const Resolution& res = env.resolve(after);
                r += cache_prob[c] * res.reward;
                next[static_cast<int>(state_code(res.next))] += cache_prob[c];
            }
            const std::size_t idx = static_cast<std::size_t>(s) * mdp.num_actions + a;
            mdp.reward[idx] = r;
            mdp.outcomes[idx].assign(next.begin(), next.end());
        }
    }
    return mdp;
}

namespace {

double q_value(const TabularMdp& mdp, const Eigen::VectorXd& v, int s, int a, double gamma)
{
    double q = mdp.expected_reward(s, a);
    if (gamma != 0.0)
        for (auto [sp, p] : mdp.next(s, a)) q += gamma * p * v(sp);
    return q;
}

} // namespace

ValueFunction value_iteration(const TabularMdp& mdp, double gamma, double tol, int max_iters)
{
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("value iteration needs 0 <= gamma < 1");
    ValueFunction vf;
    vf.v = Eigen::VectorXd::Zero(mdp.num_states);
    vf.policy.assign(mdp.num_states, 0);
    Eigen::VectorXd next(mdp.num_states);
    for (int it = 1; it <= max_iters; ++it) {
        for (int s = 0; s < mdp.num_states; ++s) {
            double best = q_value(mdp, vf.v, s, 0, gamma);
            for (int a = 1; a < mdp.num_actions; ++a) best = std::max(best, q_value(mdp, vf.v, s, a, gamma));
            next(s) = best;
        }
        vf.residual = (next - vf.v).lpNorm<Eigen::Infinity>();
        vf.residual_history.push_back(vf.residual);
        vf.v.swap(next);
        vf.iterations = it;
        if (vf.residual <= tol) break;
    }
    for (int s = 0; s < mdp.num_states; ++s) {
        int best_a = 0;
        double best = q_value(mdp, vf.v, s, 0, gamma);
        for (int a = 1; a < mdp.num_actions; ++a) {
            const double q = q_value(mdp, vf.v, s, a, gamma);
            if (q > best) {
                best = q;
                best_a = a;
            }
        }
        vf.policy[s] = best_a;
    }
    return vf;
}

FiniteHorizonValues finite_horizon_values(const TabularMdp& mdp, double gamma, int horizon)
{
    if (horizon < 0) throw std::invalid_argument("negative horizon");
    FiniteHorizonValues out;
    out.v = Eigen::VectorXd::Zero(mdp.num_states);
    Eigen::VectorXd next(mdp.num_states);
    for (int k = 0; k < horizon; ++k) {
        std::vector<int> pol(mdp.num_states, 0);
        for (int s = 0; s < mdp.num_states; ++s) {
            double best = q_value(mdp, out.v, s, 0, gamma);
            for (int a = 1; a < mdp.num_actions; ++a) {
                const double q = q_value(mdp, out.v, s, a, gamma);
                if (q > best) {
                    best = q;
                    pol[s] = a;
                }
            }
            next(s) = best;
        }
        out.v.swap(next);
        out.policy.push_back(std::move(pol));
    }
    return out;
}

Eigen::VectorXd policy_horizon_value(const TabularMdp& mdp, const std::vector<int>& policy, double gamma, int horizon)
{
    if (static_cast<int>(policy.size()) != mdp.num_states) throw std::invalid_argument("policy has the wrong length");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.num_states);
    Eigen::VectorXd next(mdp.num_states);
    for (int k = 0; k < horizon; ++k) {
        for (int s = 0; s < mdp.num_states; ++s) next(s) = q_value(mdp, v, s, policy[s], gamma);
        v.swap(next);
    }
    return v;
}

double single_link_optimum(double g, double sinr_target, double noise_power)
{
    if (!(g > 0.0)) throw std::invalid_argument("single-link optimum needs a positive channel gain");
    return sinr_target * noise_power / g;
}

void write_value_csv(const std::string& path, const ValueFunction& vf)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.precision(17);
    out << "state,value,action\n";
    for (Eigen::Index s = 0; s < vf.v.size(); ++s) out << s << ',' << vf.v(s) << ',' << vf.policy[s] << '\n';
    if (!out) throw std::runtime_error("failed writing " + path);
}

} // namespace fran
