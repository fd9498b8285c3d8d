#pragma once

#include <vector>

#include <Eigen/Core>

namespace fran {

enum class PrecodingStatus { optimal, infeasible, numerical_failure };

const char* to_string(PrecodingStatus s);

/// Network-wide precoders for the C-RAN UEs of one decision step.
///
/// Vectors are indexed by UE; UEs outside the served set carry a zero
/// vector and zero rate. Coefficients removed by thresholding are exactly 0.
struct PrecodingSolution {
    PrecodingStatus status = PrecodingStatus::optimal;
    std::vector<Eigen::VectorXcd> v;
    std::vector<bool> active;
    Eigen::VectorXd rates;     // bit/s/Hz
    Eigen::VectorXd rrh_power; // W
    double total_tx_power = 0.0;
    double computing_load = 0.0; // MOPTS
    int nnz = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> power_history; // total power after each reweighting iteration

    bool feasible() const { return status == PrecodingStatus::optimal; }
};

PrecodingSolution zero_precoding(int num_ue, int num_rrh, int antennas_per_rrh);

} // namespace fran
