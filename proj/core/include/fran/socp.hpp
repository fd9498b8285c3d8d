#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace fran {

/// Cone layout of the slack vector s: `linear` nonnegative entries first,
/// then one second-order cone per entry of `soc` (s0 >= ||s1..||).
struct ConeDims {
    int linear = 0;
    std::vector<int> soc;

    int total() const;
    int degree() const { return linear + static_cast<int>(soc.size()); }
};

/// minimize c'x  subject to  A x = b,  G x + s = h,  s in K.
struct ConicProgram {
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::MatrixXd G;
    Eigen::VectorXd h;
    ConeDims cones;

    int num_vars() const { return static_cast<int>(c.size()); }
    /// Throws std::invalid_argument on inconsistent dimensions.
    void check() const;
};

enum class SolverStatus { optimal, infeasible, numerical_failure };

const char* to_string(SolverStatus s);

struct SolverSettings {
    double feastol = 1e-10;
    double abstol = 1e-10;
    double reltol = 1e-10;
    // accepted as optimal when the iteration stalls before reaching the tight tolerances
    double feastol_inaccurate = 1e-7;
    double abstol_inaccurate = 1e-7;
    double reltol_inaccurate = 1e-7;
    int max_iters = 100;
    double step_fraction = 0.99;
};

struct ConicSolution {
    SolverStatus status = SolverStatus::numerical_failure;
    Eigen::VectorXd x, y, z, s;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    int iterations = 0;
    std::string message;
};

/// Homogeneous self-dual primal-dual interior-point method with
/// Nesterov-Todd scaling and Mehrotra predictor-corrector steps. Dense
/// linear algebra; intended for problems with a few hundred rows. Reentrant.
ConicSolution solve_conic(const ConicProgram& prog, const SolverSettings& settings = {});

} // namespace fran
