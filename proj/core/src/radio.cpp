#include "fran/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace fran {

const char* to_string(PrecodingStatus s)
{
    switch (s) {
    case PrecodingStatus::optimal: return "optimal";
    case PrecodingStatus::infeasible: return "infeasible";
    case PrecodingStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

PrecodingSolution zero_precoding(int num_ue, int num_rrh, int antennas_per_rrh)
{
    PrecodingSolution sol;
    sol.v.assign(num_ue, Eigen::VectorXcd::Zero(num_rrh * antennas_per_rrh));
    sol.active.assign(num_ue, false);
    sol.rates = Eigen::VectorXd::Zero(num_ue);
    sol.rrh_power = Eigen::VectorXd::Zero(num_rrh);
    sol.converged = true;
    return sol;
}

double cran_sinr(int m, const SystemState& state, const PrecodingSolution& V, const ChannelSet& ch,
                 const ScenarioConfig& cfg)
{
    if (state.ue_d2d.at(m)) throw std::invalid_argument("cran_sinr called for a D2D-mode UE");
    const Eigen::VectorXcd& hm = ch.h[m];
    const double signal = std::norm(hm.dot(V.v[m])); // dot() conjugates the first argument
    double interference = 0.0;
    for (int mp = 0; mp < state.num_ue(); ++mp) {
        if (mp == m || state.ue_d2d[mp]) continue;
        interference += std::norm(hm.dot(V.v[mp]));
    }
    return signal / (interference + cfg.noise_power);
}

double cran_rate(int m, const SystemState& state, const PrecodingSolution& V, const ChannelSet& ch,
                 const ScenarioConfig& cfg)
{
    return std::log2(1.0 + cran_sinr(m, state, V, ch, cfg));
}

double d2d_sinr(int m, const SystemState& state, const ChannelSet& ch, const ScenarioConfig& cfg)
{
    if (!state.ue_d2d.at(m)) throw std::invalid_argument("d2d_sinr called for a C-RAN-mode UE");
    double interference = 0.0;
    for (int mp = 0; mp < state.num_ue(); ++mp) {
        if (mp == m || !state.ue_d2d[mp]) continue;
        interference += cfg.p_d2d * ch.g_cross(m, mp);
    }
    return cfg.p_d2d * ch.g_d2d(m) / (interference + cfg.noise_power);
}

double d2d_rate(int m, const SystemState& state, const ChannelSet& ch, const ScenarioConfig& cfg)
{
    return std::log2(1.0 + d2d_sinr(m, state, ch, cfg));
}

int count_nonzero(const Eigen::VectorXcd& v, double threshold)
{
    int n = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) >= threshold) ++n;
    return n;
}

double computing_load(const SystemState& state, const PrecodingSolution& V, const ScenarioConfig& cfg)
{
    double rate_sum = 0.0;
    int nnz = 0;
    for (int m = 0; m < state.num_ue(); ++m) {
        if (state.ue_d2d[m]) continue;
        rate_sum += V.rates(m);
        nnz += count_nonzero(V.v[m], cfg.xi);
    }
    return cfg.beta * rate_sum + cfg.alpha * nnz;
}

EnergyBreakdown system_energy(const SystemState& state, const PrecodingSolution& V, const ScenarioConfig& cfg)
{
    EnergyBreakdown e;
    for (int n = 0; n < state.num_processors(); ++n)
        if (state.processor_on[n]) e.processor_w += cfg.processor_power[n];
    for (int m = 0; m < state.num_ue(); ++m) {
        if (state.ue_d2d[m]) {
            e.wireless_w += cfg.p_d2d / cfg.eta_ue;
        } else {
            e.fronthaul_w += cfg.p_fronthaul;
            e.wireless_w += V.v[m].squaredNorm() / cfg.eta_rrh;
        }
    }
    e.total_w = e.processor_w + e.fronthaul_w + e.wireless_w;
    return e;
}

} // namespace fran
