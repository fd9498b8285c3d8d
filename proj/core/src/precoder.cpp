#include "fran/precoder.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fran {

namespace {

// Sparse row accumulator for G x + s = h (and A x = b).
struct RowSet {
    std::vector<std::vector<std::pair<int, double>>> coefs;
    std::vector<double> rhs;

    int add(double value)
    {
        coefs.emplace_back();
        rhs.push_back(value);
        return static_cast<int>(rhs.size()) - 1;
    }
    // slack entry s_r = expr(x) + const means G(r, col) = -coef
    void slack_term(int r, int col, double coef) { coefs[r].emplace_back(col, -coef); }
    void term(int r, int col, double coef) { coefs[r].emplace_back(col, coef); }

    void assemble(int n, Eigen::MatrixXd& M, Eigen::VectorXd& v) const
    {
        M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rhs.size()), n);
        v.resize(static_cast<Eigen::Index>(rhs.size()));
        for (std::size_t r = 0; r < rhs.size(); ++r) {
            v(r) = rhs[r];
            for (auto [c, a] : coefs[r]) M(r, c) += a;
        }
    }
};

// Adds Re or Im of conj(h)^T x over the unmasked coefficients of one UE.
void add_inner(RowSet& rows, int r, const Eigen::VectorXcd& h, const std::vector<int>& var, bool imag, double scale,
               bool as_slack)
{
    for (Eigen::Index j = 0; j < h.size(); ++j) {
        const int col = var[j];
        if (col < 0) continue;
        const double a = h(j).real(), b = h(j).imag();
        // conj(h) (p + i q): real a p + b q, imaginary a q - b p
        const double cp = imag ? -b : a;
        const double cq = imag ? a : b;
        if (as_slack) {
            rows.slack_term(r, col, scale * cp);
            rows.slack_term(r, col + 1, scale * cq);
        } else {
            rows.term(r, col, scale * cp);
            rows.term(r, col + 1, scale * cq);
        }
    }
}

PrecodingStatus to_precoding(SolverStatus s)
{
    switch (s) {
    case SolverStatus::optimal: return PrecodingStatus::optimal;
    case SolverStatus::infeasible: return PrecodingStatus::infeasible;
    default: return PrecodingStatus::numerical_failure;
    }
}

SocpInstance base_instance(std::span<const int> ues, const ChannelSet& ch, const ScenarioConfig& cfg)
{
    SocpInstance inst;
    inst.ues.assign(ues.begin(), ues.end());
    for (int m : ues) inst.h.push_back(ch.h.at(m));
    inst.num_rrh = ch.num_rrh;
    inst.antennas_per_rrh = ch.antennas_per_rrh;
    inst.noise_power = cfg.noise_power;
    inst.sinr_target = cfg.sinr_target();
    inst.p_max = cfg.p_max;
    return inst;
}

PrecodingSolution from_subproblem(const SocpSolution& sub, const SocpInstance& inst, const ChannelSet& ch,
                                  const ScenarioConfig& cfg)
{
    PrecodingSolution sol = zero_precoding(ch.num_ue(), ch.num_rrh, ch.antennas_per_rrh);
    sol.converged = false;
    for (std::size_t i = 0; i < inst.ues.size(); ++i) sol.active[inst.ues[i]] = true;
    sol.status = to_precoding(sub.status);
    if (sub.status == SolverStatus::optimal)
        for (std::size_t i = 0; i < inst.ues.size(); ++i) sol.v[inst.ues[i]] = sub.v[i];
    evaluate_precoding(sol, ch, cfg);
    return sol;
}

double sinr_of(int m, const PrecodingSolution& sol, const ChannelSet& ch, double noise)
{
    const Eigen::VectorXcd& hm = ch.h[m];
    const double signal = std::norm(hm.dot(sol.v[m]));
    double interference = 0.0;
    for (int mp = 0; mp < ch.num_ue(); ++mp)
        if (mp != m && sol.active[mp]) interference += std::norm(hm.dot(sol.v[mp]));
    return signal / (interference + noise);
}

bool satisfies_constraints(const PrecodingSolution& sol, double capacity, const ChannelSet& ch,
                           const ScenarioConfig& cfg)
{
    const double gamma = cfg.sinr_target();
    for (int m = 0; m < ch.num_ue(); ++m)
        if (sol.active[m] && sinr_of(m, sol, ch, cfg.noise_power) < gamma * (1.0 - 1e-6)) return false;
    for (Eigen::Index k = 0; k < sol.rrh_power.size(); ++k)
        if (sol.rrh_power(k) > cfg.p_max + 1e-9) return false;
    return sol.computing_load <= capacity + 1e-6;
}

void dump_instance(const SocpInstance& inst, const std::string& dir, std::uint32_t mask, double capacity, int iter)
{
    std::filesystem::create_directories(dir);
    char name[96];
    std::snprintf(name, sizeof name, "socp_u%u_c%g_i%02d.json", mask, capacity, iter);
    std::ofstream out(std::filesystem::path(dir) / name);
    if (!out) throw std::runtime_error("cannot write subproblem dump in " + dir);
    out << inst.to_json() << '\n';
}

} // namespace

PrecoderOptions precoder_options(const ScenarioConfig& cfg)
{
    PrecoderOptions o;
    o.xi = cfg.xi;
    o.max_iters = cfg.max_precoder_iters;
    return o;
}

std::string SocpInstance::to_json() const
{
    using nlohmann::json;
    json j;
    j["ues"] = ues;
    json hs = json::array();
    for (const auto& hv : h) {
        json re = json::array(), im = json::array();
        for (Eigen::Index k = 0; k < hv.size(); ++k) {
            re.push_back(hv(k).real());
            im.push_back(hv(k).imag());
        }
        hs.push_back({{"re", re}, {"im", im}});
    }
    j["h"] = hs;
    j["num_rrh"] = num_rrh;
    j["antennas_per_rrh"] = antennas_per_rrh;
    j["noise_power"] = noise_power;
    j["sinr_target"] = sinr_target;
    j["p_max"] = p_max;
    j["has_budget"] = has_budget;
    if (has_budget) {
        json th = json::array();
        for (const auto& t : theta) th.push_back(std::vector<double>(t.data(), t.data() + t.size()));
        j["theta"] = th;
        j["budget"] = budget;
    }
    json mask = json::array();
    for (const auto& row : zero_mask) mask.push_back(std::vector<bool>(row.begin(), row.end()));
    j["zero_mask"] = mask;
    return j.dump(1);
}

SocpSolution solve_subproblem(const SocpInstance& inst, const SolverSettings& settings)
{
    const int U = static_cast<int>(inst.ues.size());
    const int KL = inst.num_antennas();
    const int L = inst.antennas_per_rrh;
    if (static_cast<int>(inst.h.size()) != U) throw std::invalid_argument("subproblem: one channel per served UE");
    if (inst.has_budget && static_cast<int>(inst.theta.size()) != U)
        throw std::invalid_argument("subproblem: one weight vector per served UE");
    if (!inst.zero_mask.empty() && static_cast<int>(inst.zero_mask.size()) != U)
        throw std::invalid_argument("subproblem: one zero mask per served UE");

    SocpSolution out;
    out.v.assign(U, Eigen::VectorXcd::Zero(KL));
    if (U == 0) {
        out.status = SolverStatus::optimal;
        return out;
    }
    if (inst.has_budget && inst.budget < 0.0) {
        out.status = SolverStatus::infeasible;
        out.message = "negative computing budget";
        return out;
    }

    // work in x = v / sqrt(p0) with noise-normalised channels so that the
    // SINR rows and the power cones are O(1)
    double mean_gain = 0.0;
    for (const auto& hv : inst.h) mean_gain += hv.squaredNorm();
    mean_gain /= U;
    if (!(mean_gain > 0.0)) {
        out.status = SolverStatus::infeasible;
        out.message = "all channels are zero";
        return out;
    }
    const double p0 = inst.noise_power / mean_gain;
    const double sp0 = std::sqrt(p0);
    std::vector<Eigen::VectorXcd> hn(U);
    for (int i = 0; i < U; ++i) hn[i] = inst.h[i] / std::sqrt(mean_gain);

    // variable layout: (re, im) per unmasked coefficient, then t, then |x| bounds
    std::vector<std::vector<int>> var(U, std::vector<int>(KL, -1));
    int n = 0;
    for (int i = 0; i < U; ++i)
        for (int j = 0; j < KL; ++j)
            if (!inst.pinned(i, j)) {
                var[i][j] = n;
                n += 2;
            }
    const int num_coef = n / 2;
    for (int i = 0; i < U; ++i) {
        bool any = false;
        for (int j = 0; j < KL; ++j) any = any || var[i][j] >= 0;
        if (!any) {
            out.status = SolverStatus::infeasible;
            out.message = "served UE has every coefficient pinned to zero";
            return out;
        }
    }
    const int t_col = n++;
    std::vector<std::vector<int>> mag(U, std::vector<int>(KL, -1));
    if (inst.has_budget)
        for (int i = 0; i < U; ++i)
            for (int j = 0; j < KL; ++j)
                if (var[i][j] >= 0) mag[i][j] = n++;

    ConicProgram prog;
    prog.c = Eigen::VectorXd::Zero(n);
    prog.c(t_col) = 1.0;

    RowSet g;
    if (inst.has_budget) {
        prog.cones.linear = 1;
        const int r = g.add(inst.budget);
        for (int i = 0; i < U; ++i)
            for (int j = 0; j < KL; ++j)
                if (mag[i][j] >= 0) g.term(r, mag[i][j], inst.theta[i](j) * sp0);
    }

    // ||x|| <= t
    {
        const int r0 = g.add(0.0);
        g.slack_term(r0, t_col, 1.0);
        for (int i = 0; i < U; ++i)
            for (int j = 0; j < KL; ++j)
                if (var[i][j] >= 0)
                    for (int c = 0; c < 2; ++c) g.slack_term(g.add(0.0), var[i][j] + c, 1.0);
        prog.cones.soc.push_back(1 + 2 * num_coef);
    }

    // Re(h_i^H x_i) / sqrt(gamma) >= ||(h_i^H x_m for m != i, 1)||
    const double inv_sqrt_gamma = 1.0 / std::sqrt(inst.sinr_target);
    for (int i = 0; i < U; ++i) {
        const int r0 = g.add(0.0);
        add_inner(g, r0, hn[i], var[i], false, inv_sqrt_gamma, true);
        for (int m = 0; m < U; ++m) {
            if (m == i) continue;
            add_inner(g, g.add(0.0), hn[i], var[m], false, 1.0, true);
            add_inner(g, g.add(0.0), hn[i], var[m], true, 1.0, true);
        }
        g.add(1.0);
        prog.cones.soc.push_back(2 + 2 * (U - 1));
    }

    // per-RRH power
    const double radius = std::sqrt(inst.p_max / p0);
    for (int k = 0; k < inst.num_rrh; ++k) {
        g.add(radius);
        int size = 1;
        for (int i = 0; i < U; ++i)
            for (int l = 0; l < L; ++l) {
                const int col = var[i][k * L + l];
                if (col < 0) continue;
                for (int c = 0; c < 2; ++c) g.slack_term(g.add(0.0), col + c, 1.0);
                size += 2;
            }
        prog.cones.soc.push_back(size);
    }

    // |x_j| <= u_j
    if (inst.has_budget)
        for (int i = 0; i < U; ++i)
            for (int j = 0; j < KL; ++j) {
                if (mag[i][j] < 0) continue;
                g.slack_term(g.add(0.0), mag[i][j], 1.0);
                g.slack_term(g.add(0.0), var[i][j], 1.0);
                g.slack_term(g.add(0.0), var[i][j] + 1, 1.0);
                prog.cones.soc.push_back(3);
            }
    g.assemble(n, prog.G, prog.h);

    // Im(h_i^H x_i) = 0 fixes the phase of the desired signal
    RowSet a;
    for (int i = 0; i < U; ++i) add_inner(a, a.add(0.0), hn[i], var[i], true, 1.0, false);
    a.assemble(n, prog.A, prog.b);

    ConicSolution cs = solve_conic(prog, settings);
    out.status = cs.status;
    out.iterations = cs.iterations;
    out.message = cs.message;
    if (cs.status != SolverStatus::optimal) return out;
    for (int i = 0; i < U; ++i)
        for (int j = 0; j < KL; ++j)
            if (var[i][j] >= 0) out.v[i](j) = sp0 * std::complex<double>(cs.x(var[i][j]), cs.x(var[i][j] + 1));
    for (const auto& v : out.v) out.power += v.squaredNorm();
    return out;
}

std::vector<int> ues_in_mask(std::uint32_t mask, int num_ue)
{
    std::vector<int> ues;
    for (int m = 0; m < num_ue; ++m)
        if (mask >> m & 1U) ues.push_back(m);
    return ues;
}

void evaluate_precoding(PrecodingSolution& sol, const ChannelSet& ch, const ScenarioConfig& cfg)
{
    const int M = ch.num_ue();
    const int L = ch.antennas_per_rrh;
    sol.rates = Eigen::VectorXd::Zero(M);
    sol.rrh_power = Eigen::VectorXd::Zero(ch.num_rrh);
    sol.total_tx_power = 0.0;
    sol.nnz = 0;
    double rate_sum = 0.0;
    for (int m = 0; m < M; ++m) {
        if (!sol.active[m]) continue;
        sol.rates(m) = std::log2(1.0 + sinr_of(m, sol, ch, cfg.noise_power));
        rate_sum += sol.rates(m);
        for (int k = 0; k < ch.num_rrh; ++k) sol.rrh_power(k) += sol.v[m].segment(k * L, L).squaredNorm();
        sol.total_tx_power += sol.v[m].squaredNorm();
        for (Eigen::Index j = 0; j < sol.v[m].size(); ++j)
            if (std::abs(sol.v[m](j)) >= cfg.xi) ++sol.nnz;
    }
    sol.computing_load = cfg.beta * rate_sum + cfg.alpha * sol.nnz;
}

PrecodingSolution init_precoding(std::span<const int> cran_set, const ChannelSet& ch, const ScenarioConfig& cfg,
                                 const PrecoderOptions& opts)
{
    if (cran_set.empty()) return zero_precoding(ch.num_ue(), ch.num_rrh, ch.antennas_per_rrh);
    SocpInstance inst = base_instance(cran_set, ch, cfg);
    SocpSolution sub = solve_subproblem(inst, opts.solver);
    return from_subproblem(sub, inst, ch, cfg);
}

ReweightState update_weights(const PrecodingSolution& prev, double xi)
{
    if (!(xi > 0.0)) throw std::invalid_argument("reweighting offset xi must be positive");
    ReweightState w;
    w.xi = xi;
    for (const auto& v : prev.v) w.theta.push_back((v.array().abs() + xi).inverse().matrix());
    return w;
}

int threshold_zeros(PrecodingSolution& sol, ZeroMask& mask, double xi)
{
    if (mask.size() != sol.v.size()) throw std::invalid_argument("zero mask does not match the solution");
    int added = 0;
    for (std::size_t m = 0; m < sol.v.size(); ++m)
        for (Eigen::Index j = 0; j < sol.v[m].size(); ++j) {
            if (mask[m][j]) {
                sol.v[m](j) = 0.0;
            } else if (std::abs(sol.v[m](j)) < xi) {
                sol.v[m](j) = 0.0;
                mask[m][j] = true;
                ++added;
            }
        }
    return added;
}

PrecodingSolution optimize(std::span<const int> cran_set, double capacity, const ChannelSet& ch,
                           const ScenarioConfig& cfg, const PrecoderOptions& opts)
{
    const int M = ch.num_ue();
    const int KL = ch.num_rrh * ch.antennas_per_rrh;
    if (cran_set.empty()) return zero_precoding(M, ch.num_rrh, ch.antennas_per_rrh);

    PrecodingSolution sol = init_precoding(cran_set, ch, cfg, opts);
    if (!sol.feasible()) return sol;

    std::uint32_t served_mask = 0;
    for (int m : cran_set) served_mask |= 1U << m;

    ZeroMask mask(M, std::vector<bool>(KL, false));
    threshold_zeros(sol, mask, opts.xi);
    evaluate_precoding(sol, ch, cfg);
    double prev_power = sol.total_tx_power;

    std::vector<double> history;
    bool valid = false;
    for (int it = 1; it <= opts.max_iters; ++it) {
        ReweightState w = update_weights(sol, opts.xi);
        double rate_sum = 0.0;
        for (int m : cran_set) rate_sum += sol.rates(m);

        SocpInstance inst = base_instance(cran_set, ch, cfg);
        inst.has_budget = true;
        inst.budget = (capacity - cfg.beta * rate_sum) / cfg.alpha;
        for (int m : cran_set) {
            inst.theta.push_back(w.theta[m]);
            inst.zero_mask.push_back(mask[m]);
        }
        if (!opts.dump_dir.empty()) dump_instance(inst, opts.dump_dir, served_mask, capacity, it);

        SocpSolution sub = solve_subproblem(inst, opts.solver);
        PrecodingSolution next = from_subproblem(sub, inst, ch, cfg);
        if (!next.feasible()) {
            next.iterations = it;
            next.power_history = std::move(history);
            return next;
        }
        const int added = threshold_zeros(next, mask, opts.xi);
        evaluate_precoding(next, ch, cfg);
        history.push_back(next.total_tx_power);

        const double power = next.total_tx_power;
        const bool settled = std::abs(power - prev_power) <= opts.power_rtol * std::max(power, 1e-12);
        valid = satisfies_constraints(next, capacity, ch, cfg);
        sol = std::move(next);
        sol.iterations = it;
        prev_power = power;
        if (settled && added == 0 && valid) {
            sol.converged = true;
            break;
        }
    }
    sol.power_history = std::move(history);
    if (!sol.converged && !valid) sol.status = PrecodingStatus::infeasible;
    return sol;
}

PrecodingSolution optimize(const SystemState& state, const ChannelSet& ch, const ScenarioConfig& cfg,
                           const PrecoderOptions& opts)
{
    return optimize(ues_in_mask(cran_mask(state), state.num_ue()), active_capacity(state, cfg), ch, cfg, opts);
}

PrecodingCache::PrecodingCache(const ChannelSet& ch, const ScenarioConfig& cfg, PrecoderOptions opts)
    : ch_(ch), cfg_(cfg), opts_(std::move(opts))
{
}

const PrecodingSolution& PrecodingCache::get(std::uint32_t cran_mask, double capacity)
{
    std::lock_guard lock(mu_);
    auto key = std::make_pair(cran_mask, capacity);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    PrecodingSolution sol = optimize(ues_in_mask(cran_mask, cfg_.num_ue), capacity, ch_, cfg_, opts_);
    return memo_.emplace(key, std::move(sol)).first->second;
}

std::size_t PrecodingCache::size() const
{
    std::lock_guard lock(mu_);
    return memo_.size();
}

void PrecodingCache::clear()
{
    std::lock_guard lock(mu_);
    memo_.clear();
}

} // namespace fran
