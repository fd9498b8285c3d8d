#include "fran/socp.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace fran {

int ConeDims::total() const { return linear + std::accumulate(soc.begin(), soc.end(), 0); }

void ConicProgram::check() const
{
    const Eigen::Index n = c.size();
    if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != n))
        throw std::invalid_argument("conic program: A/b dimensions disagree");
    if (G.rows() != h.size() || (G.rows() > 0 && G.cols() != n))
        throw std::invalid_argument("conic program: G/h dimensions disagree");
    if (cones.total() != G.rows()) throw std::invalid_argument("conic program: cone sizes do not cover G");
    for (int q : cones.soc)
        if (q < 1) throw std::invalid_argument("conic program: empty second-order cone");
}

const char* to_string(SolverStatus s)
{
    switch (s) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::infeasible: return "infeasible";
    case SolverStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nesterov-Todd scaling W with W z = W^{-1} s = lambda.
class NtScaling {
public:
    NtScaling(const ConeDims& cones, const VectorXd& s, const VectorXd& z) : cones_(cones)
    {
        lp_.resize(cones.linear);
        for (int i = 0; i < cones.linear; ++i) lp_(i) = std::sqrt(s(i) / z(i));
        int off = cones.linear;
        for (int q : cones.soc) {
            SocBlock blk;
            const double s0 = s(off), z0 = z(off);
            const double s_res = soc_residual(s.segment(off, q));
            const double z_res = soc_residual(z.segment(off, q));
            const double s_j = std::sqrt(s_res);
            const double z_j = std::sqrt(z_res);
            VectorXd sbar = s.segment(off, q) / s_j;
            VectorXd zbar = z.segment(off, q) / z_j;
            const double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
            blk.w0 = (sbar(0) + zbar(0)) / (2.0 * gamma);
            blk.w1 = (sbar.tail(q - 1) - zbar.tail(q - 1)) / (2.0 * gamma);
            blk.eta = std::sqrt(s_j / z_j);
            (void)s0;
            (void)z0;
            soc_.push_back(std::move(blk));
            off += q;
        }
    }

    // s0^2 - ||s1||^2 computed as a product to limit cancellation
    static double soc_residual(const VectorXd& u)
    {
        const double n1 = u.size() > 1 ? u.tail(u.size() - 1).norm() : 0.0;
        return (u(0) - n1) * (u(0) + n1);
    }

    VectorXd apply(const VectorXd& u, bool inverse) const
    {
        VectorXd out(u.size());
        for (int i = 0; i < cones_.linear; ++i) out(i) = inverse ? u(i) / lp_(i) : u(i) * lp_(i);
        int off = cones_.linear;
        for (std::size_t k = 0; k < soc_.size(); ++k) {
            const int q = cones_.soc[k];
            const SocBlock& blk = soc_[k];
            const double sign = inverse ? -1.0 : 1.0;
            const double scale = inverse ? 1.0 / blk.eta : blk.eta;
            const double u0 = u(off);
            const double w1u1 = q > 1 ? blk.w1.dot(u.segment(off + 1, q - 1)) : 0.0;
            out(off) = scale * (blk.w0 * u0 + sign * w1u1);
            if (q > 1) {
                const double coef = sign * u0 + w1u1 / (1.0 + blk.w0);
                out.segment(off + 1, q - 1) = scale * (u.segment(off + 1, q - 1) + coef * blk.w1);
            }
            off += q;
        }
        return out;
    }

    // W^{-1} M, column by column on each cone block
    MatrixXd apply_inverse_rows(const MatrixXd& M) const
    {
        MatrixXd out(M.rows(), M.cols());
        for (int i = 0; i < cones_.linear; ++i) out.row(i) = M.row(i) / lp_(i);
        int off = cones_.linear;
        for (std::size_t k = 0; k < soc_.size(); ++k) {
            const int q = cones_.soc[k];
            const SocBlock& blk = soc_[k];
            const double scale = 1.0 / blk.eta;
            auto top = M.row(off);
            if (q > 1) {
                auto rest = M.middleRows(off + 1, q - 1);
                Eigen::RowVectorXd w1r = blk.w1.transpose() * rest;
                out.row(off) = scale * (blk.w0 * top - w1r);
                Eigen::RowVectorXd coef = -top + w1r / (1.0 + blk.w0);
                out.middleRows(off + 1, q - 1) = scale * (rest + blk.w1 * coef);
            } else {
                out.row(off) = scale * blk.w0 * top;
            }
            off += q;
        }
        return out;
    }

private:
    struct SocBlock {
        double eta = 1.0;
        double w0 = 1.0;
        VectorXd w1;
    };
    const ConeDims& cones_;
    VectorXd lp_;
    std::vector<SocBlock> soc_;
};

// Jordan product u o v.
VectorXd jordan_product(const ConeDims& cones, const VectorXd& u, const VectorXd& v)
{
    VectorXd out(u.size());
    for (int i = 0; i < cones.linear; ++i) out(i) = u(i) * v(i);
    int off = cones.linear;
    for (int q : cones.soc) {
        out(off) = u.segment(off, q).dot(v.segment(off, q));
        if (q > 1)
            out.segment(off + 1, q - 1) = u(off) * v.segment(off + 1, q - 1) + v(off) * u.segment(off + 1, q - 1);
        off += q;
    }
    return out;
}

// Solves lambda o u = r for u.
VectorXd jordan_divide(const ConeDims& cones, const VectorXd& lambda, const VectorXd& r)
{
    VectorXd out(r.size());
    for (int i = 0; i < cones.linear; ++i) out(i) = r(i) / lambda(i);
    int off = cones.linear;
    for (int q : cones.soc) {
        const double l0 = lambda(off);
        if (q == 1) {
            out(off) = r(off) / l0;
        } else {
            auto l1 = lambda.segment(off + 1, q - 1);
            auto r1 = r.segment(off + 1, q - 1);
            const double rho = NtScaling::soc_residual(lambda.segment(off, q));
            const double u0 = (l0 * r(off) - l1.dot(r1)) / rho;
            out(off) = u0;
            out.segment(off + 1, q - 1) = (r1 - u0 * l1) / l0;
        }
        off += q;
    }
    return out;
}

VectorXd cone_identity(const ConeDims& cones)
{
    VectorXd e = VectorXd::Zero(cones.total());
    for (int i = 0; i < cones.linear; ++i) e(i) = 1.0;
    int off = cones.linear;
    for (int q : cones.soc) {
        e(off) = 1.0;
        off += q;
    }
    return e;
}

// Smallest t with r + t e on the cone boundary; negative when r is interior.
double cone_depth(const ConeDims& cones, const VectorXd& r)
{
    double alpha = -kInf;
    for (int i = 0; i < cones.linear; ++i) alpha = std::max(alpha, -r(i));
    int off = cones.linear;
    for (int q : cones.soc) {
        const double n1 = q > 1 ? r.segment(off + 1, q - 1).norm() : 0.0;
        alpha = std::max(alpha, n1 - r(off));
        off += q;
    }
    return alpha;
}

VectorXd bring_to_cone(const ConeDims& cones, const VectorXd& r)
{
    const double alpha = cone_depth(cones, r);
    if (alpha < 0.0) return r;
    return r + (1.0 + alpha) * cone_identity(cones);
}

// Largest step t with u + t du inside the cone (may be +inf).
double max_step(const ConeDims& cones, const VectorXd& u, const VectorXd& du)
{
    double t = kInf;
    for (int i = 0; i < cones.linear; ++i)
        if (du(i) < 0.0) t = std::min(t, -u(i) / du(i));
    int off = cones.linear;
    for (int q : cones.soc) {
        const double u0 = u(off), d0 = du(off);
        if (q == 1) {
            if (d0 < 0.0) t = std::min(t, -u0 / d0);
            off += q;
            continue;
        }
        auto u1 = u.segment(off + 1, q - 1);
        auto d1 = du.segment(off + 1, q - 1);
        // phi(t) = a t^2 + 2 b t + c, c > 0; first positive root bounds the step
        const double a = d0 * d0 - d1.squaredNorm();
        const double b = u0 * d0 - u1.dot(d1);
        const double c = std::max(NtScaling::soc_residual(u.segment(off, q)), 0.0);
        const double disc = b * b - a * c;
        double root = kInf;
        if (a < 0.0) {
            root = c / (-b + std::sqrt(std::max(disc, 0.0)));
        } else if (b < 0.0) {
            if (a == 0.0) root = -c / (2.0 * b);
            else if (disc >= 0.0) root = c / (-b + std::sqrt(disc));
        }
        if (root < 0.0 || std::isnan(root)) root = 0.0;
        t = std::min(t, root);
        off += q;
    }
    return t;
}

struct Direction {
    VectorXd x, y, z, s;
    double tau = 0.0, kappa = 0.0;
};

class KktSystem {
public:
    KktSystem(const ConicProgram& prog, const NtScaling& W) : prog_(prog), W_(W)
    {
        const int n = prog.num_vars();
        MatrixXd WinvG = W.apply_inverse_rows(prog.G);
        MatrixXd H = MatrixXd::Zero(n, n);
        H.selfadjointView<Eigen::Lower>().rankUpdate(WinvG.transpose());
        H = H.selfadjointView<Eigen::Lower>();
        const double reg = 1e-14 * std::max(1.0, H.diagonal().maxCoeff());
        H.diagonal().array() += reg;
        H_ldlt_.compute(H);
        if (prog.A.rows() > 0) {
            MatrixXd HinvAt = H_ldlt_.solve(prog.A.transpose());
            MatrixXd S = prog.A * HinvAt;
            const double sreg = 1e-14 * std::max(1.0, S.diagonal().maxCoeff());
            S.diagonal().array() += sreg;
            S_ldlt_.compute(S);
        }
    }

    // [0 A' G'; A 0 0; G 0 -W^2] [x; y; z] = [r1; r2; r3], with refinement
    void solve(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& x, VectorXd& y,
               VectorXd& z) const
    {
        solve_once(r1, r2, r3, x, y, z);
        for (int it = 0; it < 2; ++it) {
            VectorXd e1 = r1 - prog_.G.transpose() * z;
            if (prog_.A.rows() > 0) e1 -= prog_.A.transpose() * y;
            VectorXd e2 = r2 - (prog_.A.rows() > 0 ? VectorXd(prog_.A * x) : VectorXd(0));
            VectorXd e3 = r3 - (prog_.G * x - W_.apply(W_.apply(z, false), false));
            const double err = std::max({e1.lpNorm<Eigen::Infinity>(), e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0,
                                         e3.lpNorm<Eigen::Infinity>()});
            if (!(err > 1e-15)) break;
            VectorXd dx, dy, dz;
            solve_once(e1, e2, e3, dx, dy, dz);
            x += dx;
            y += dy;
            z += dz;
        }
    }

private:
    void solve_once(const VectorXd& r1, const VectorXd& r2, const VectorXd& r3, VectorXd& x, VectorXd& y,
                    VectorXd& z) const
    {
        // dz = W^{-2} (G x - r3); H x + A' y = r1 + G' W^{-2} r3; A x = r2
        VectorXd w2r3 = W_.apply(W_.apply(r3, true), true);
        VectorXd u = r1 + prog_.G.transpose() * w2r3;
        if (prog_.A.rows() > 0) {
            VectorXd Hu = H_ldlt_.solve(u);
            y = S_ldlt_.solve(prog_.A * Hu - r2);
            x = H_ldlt_.solve(u - prog_.A.transpose() * y);
        } else {
            y.resize(0);
            x = H_ldlt_.solve(u);
        }
        z = W_.apply(W_.apply(prog_.G * x - r3, true), true);
    }

    const ConicProgram& prog_;
    const NtScaling& W_;
    Eigen::LDLT<MatrixXd> H_ldlt_;
    Eigen::LDLT<MatrixXd> S_ldlt_;
};

struct Residuals {
    VectorXd rx, ry, rz;
    double rt = 0.0;
};

} // namespace

ConicSolution solve_conic(const ConicProgram& prog, const SolverSettings& st)
{
    prog.check();
    const ConeDims& cones = prog.cones;
    const int n = prog.num_vars();
    const int p = static_cast<int>(prog.A.rows());
    const int m = static_cast<int>(prog.G.rows());
    const bool has_eq = p > 0;

    ConicSolution out;

    auto At_times = [&](const VectorXd& y) -> VectorXd {
        return has_eq ? VectorXd(prog.A.transpose() * y) : VectorXd::Zero(n);
    };
    auto A_times = [&](const VectorXd& x) -> VectorXd { return has_eq ? VectorXd(prog.A * x) : VectorXd(0); };
    auto safe_norm = [](const VectorXd& v) { return v.size() ? v.norm() : 0.0; };

    // initial point from two least-squares problems with W = I
    VectorXd x, y, z, s;
    {
        VectorXd ones_s = cone_identity(cones), ones_z = cone_identity(cones);
        NtScaling I(cones, ones_s, ones_z);
        KktSystem kkt(prog, I);
        VectorXd xp, yp, zp;
        kkt.solve(VectorXd::Zero(n), prog.b, prog.h, xp, yp, zp);
        x = xp;
        s = bring_to_cone(cones, -zp);
        VectorXd xd, yd, zd;
        kkt.solve(-prog.c, VectorXd::Zero(p), VectorXd::Zero(m), xd, yd, zd);
        y = yd;
        z = bring_to_cone(cones, zd);
    }
    double tau = 1.0, kappa = 1.0;

    const double bnorm = std::max(1.0, safe_norm(prog.b));
    const double hnorm = std::max(1.0, safe_norm(prog.h));
    const double cnorm = std::max(1.0, safe_norm(prog.c));
    const int degree = cones.degree();
    const VectorXd e = cone_identity(cones);

    enum class Verdict { none, optimal, infeasible, unbounded };
    auto assess = [&](double ftol, double atol, double rtol, Residuals& r) -> Verdict {
        r.rx = At_times(y) + prog.G.transpose() * z + tau * prog.c;
        r.ry = A_times(x) - tau * prog.b;
        r.rz = prog.G * x + s - tau * prog.h;
        const double cx = prog.c.dot(x);
        const double by_hz = (has_eq ? prog.b.dot(y) : 0.0) + prog.h.dot(z);
        r.rt = kappa + cx + by_hz;

        const double pcost = cx / tau;
        const double dcost = -by_hz / tau;
        const double pres = std::max(safe_norm(r.ry) / bnorm, safe_norm(r.rz) / hnorm) / tau;
        const double dres = safe_norm(r.rx) / cnorm / tau;
        const double gap = s.dot(z) / (tau * tau);
        out.primal_objective = pcost;
        out.dual_objective = dcost;
        out.primal_residual = pres;
        out.dual_residual = dres;
        out.gap = gap;

        double relgap = kInf;
        if (pcost < 0.0) relgap = gap / -pcost;
        else if (dcost > 0.0) relgap = gap / dcost;
        if (pres < ftol && dres < ftol && (gap < atol || relgap < rtol)) return Verdict::optimal;

        if (by_hz < 0.0) {
            const double pinf = safe_norm(At_times(y) + prog.G.transpose() * z) / -by_hz;
            if (pinf < ftol && tau < kappa) return Verdict::infeasible;
        }
        if (cx < 0.0) {
            const double dinf = std::max(safe_norm(A_times(x)), safe_norm(prog.G * x + s)) / -cx;
            if (dinf < ftol && tau < kappa) return Verdict::unbounded;
        }
        return Verdict::none;
    };

    auto finish = [&](Verdict v, std::string msg) {
        out.message = std::move(msg);
        switch (v) {
        case Verdict::optimal:
            out.status = SolverStatus::optimal;
            out.x = x / tau;
            out.y = y / tau;
            out.z = z / tau;
            out.s = s / tau;
            break;
        case Verdict::infeasible: {
            out.status = SolverStatus::infeasible;
            const double by_hz = (has_eq ? prog.b.dot(y) : 0.0) + prog.h.dot(z);
            out.y = y / -by_hz;
            out.z = z / -by_hz;
            break;
        }
        case Verdict::unbounded:
            out.status = SolverStatus::numerical_failure;
            out.message = "dual infeasible (problem unbounded below)";
            break;
        case Verdict::none:
            out.status = SolverStatus::numerical_failure;
            break;
        }
        return out;
    };

    // best iterate so far; late iterations can lose accuracy once the
    // scaling becomes badly conditioned
    struct Snapshot {
        VectorXd x, y, z, s;
        double tau = 1.0, kappa = 1.0;
        double score = kInf;
    } best;
    auto score_now = [&] {
        double gap_term = out.gap;
        if (out.primal_objective < 0.0) gap_term = std::min(gap_term, out.gap / -out.primal_objective);
        else if (out.dual_objective > 0.0) gap_term = std::min(gap_term, out.gap / out.dual_objective);
        return std::max({out.primal_residual, out.dual_residual, gap_term});
    };

    Residuals r;
    for (int iter = 0; iter <= st.max_iters; ++iter) {
        out.iterations = iter;
        Verdict v = assess(st.feastol, st.abstol, st.reltol, r);
        const double score = score_now();
        if (score < best.score) best = {x, y, z, s, tau, kappa, score};
#ifdef FRAN_SOCP_TRACE
        std::fprintf(stderr, "it %2d pcost %.6e dcost %.6e pres %.2e dres %.2e gap %.2e tau %.2e kap %.2e\n", iter,
                     out.primal_objective, out.dual_objective, out.primal_residual, out.dual_residual, out.gap, tau,
                     kappa);
#endif
        if (v != Verdict::none) return finish(v, "converged");
        if (iter == st.max_iters) break;
        if (best.score < st.feastol_inaccurate && score > 1e4 * best.score) {
            out.message = "lost accuracy";
            break;
        }

        const double mu = (s.dot(z) + tau * kappa) / (degree + 1);
        NtScaling W(cones, s, z);
        VectorXd lambda = W.apply(z, false);
        KktSystem kkt(prog, W);

        VectorXd x1, y1, z1;
        kkt.solve(-prog.c, prog.b, prog.h, x1, y1, z1);
        const double denom_base = prog.c.dot(x1) + (has_eq ? prog.b.dot(y1) : 0.0) + prog.h.dot(z1);

        auto direction = [&](double sigma, const VectorXd& rs, double rk) {
            Direction d;
            VectorXd lr = jordan_divide(cones, lambda, rs);
            VectorXd x2, y2, z2;
            kkt.solve(-(1.0 - sigma) * r.rx, -(1.0 - sigma) * r.ry, -(1.0 - sigma) * r.rz - W.apply(lr, false), x2,
                      y2, z2);
            const double num = -(1.0 - sigma) * r.rt - rk / tau -
                               (prog.c.dot(x2) + (has_eq ? prog.b.dot(y2) : 0.0) + prog.h.dot(z2));
            d.tau = num / (denom_base - kappa / tau);
            d.x = x2 + d.tau * x1;
            d.y = has_eq ? VectorXd(y2 + d.tau * y1) : VectorXd(0);
            d.z = z2 + d.tau * z1;
            d.s = W.apply(lr - W.apply(d.z, false), false);
            d.kappa = (rk - kappa * d.tau) / tau;
            return d;
        };

        auto step_length = [&](const Direction& d) {
            double t = std::min(max_step(cones, s, d.s), max_step(cones, z, d.z));
            if (d.tau < 0.0) t = std::min(t, -tau / d.tau);
            if (d.kappa < 0.0) t = std::min(t, -kappa / d.kappa);
            return t;
        };

        // predictor
        VectorXd rs_aff = -jordan_product(cones, lambda, lambda);
        Direction aff = direction(0.0, rs_aff, -tau * kappa);
        const double alpha_aff = std::min(1.0, step_length(aff));
        const double sigma = std::pow(std::clamp(1.0 - alpha_aff, 0.0, 1.0), 3);

        // corrector
        VectorXd ds_scaled = W.apply(aff.s, true);
        VectorXd dz_scaled = W.apply(aff.z, false);
        VectorXd rs = rs_aff - jordan_product(cones, ds_scaled, dz_scaled) + sigma * mu * e;
        const double rk = -tau * kappa - aff.tau * aff.kappa + sigma * mu;
        Direction d = direction(sigma, rs, rk);
        const double alpha = std::min(1.0, st.step_fraction * step_length(d));

        if (!std::isfinite(alpha) || !d.x.allFinite() || !d.z.allFinite() || !d.s.allFinite()) {
            out.message = "non-finite search direction";
            break;
        }
        x += alpha * d.x;
        if (has_eq) y += alpha * d.y;
        z += alpha * d.z;
        s += alpha * d.s;
        tau += alpha * d.tau;
        kappa += alpha * d.kappa;
        if (alpha < 1e-10) {
            out.message = "step size stalled";
            break;
        }
    }

    Verdict v = assess(st.feastol_inaccurate, st.abstol_inaccurate, st.reltol_inaccurate, r);
    if (v != Verdict::none) return finish(v, "reduced accuracy");
    if (best.score < kInf) {
        x = best.x;
        y = best.y;
        z = best.z;
        s = best.s;
        tau = best.tau;
        kappa = best.kappa;
        v = assess(st.feastol_inaccurate, st.abstol_inaccurate, st.reltol_inaccurate, r);
        if (v != Verdict::none) return finish(v, "reduced accuracy");
    }
    if (out.message.empty()) out.message = "iteration limit reached";
    return finish(Verdict::none, std::string(out.message));
}

} // namespace fran
