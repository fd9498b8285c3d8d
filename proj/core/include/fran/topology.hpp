#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "fran/scenario.hpp"

namespace fran {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Topology {
    std::vector<Point> rrh_positions;
    std::vector<Point> ue_positions;
    std::vector<Point> d2d_tx_positions; // one paired transmitter per UE
};

/// Channel realisation held fixed for a run.
///
/// `h[m]` is UE m's network-wide channel, RRH-major: entry k * L + l is the
/// gain from antenna l of RRH k.
struct ChannelSet {
    int num_rrh = 0;
    int antennas_per_rrh = 0;
    std::vector<Eigen::VectorXcd> h;
    Eigen::VectorXd g_d2d;   // |h_m|^2 from UE m's own transmitter
    Eigen::MatrixXd g_cross; // (m, m'): gain from UE m''s transmitter to UE m

    int num_ue() const { return static_cast<int>(h.size()); }
    std::complex<double> gain(int m, int k, int l) const { return h[m](k * antennas_per_rrh + l); }
};

/// RRHs on a regular polygon with side `rrh_spacing` centred at the origin;
/// UEs uniform in the disk around the centroid; each D2D transmitter uniform
/// within `d2d_max_distance` of its UE. Deterministic in `seed`.
Topology generate_topology(const ScenarioConfig& cfg, std::uint64_t seed);

/// Complex gain for one antenna: sqrt(d^-2 * 10^(shadow_db/10)) * r.
std::complex<double> antenna_gain(double distance_m, double shadow_db, std::complex<double> r);

/// Draws per-pair log-normal shadowing and per-antenna CN(0,1) fading.
/// Throws std::invalid_argument when any transceiver pair is co-located.
ChannelSet sample_channels(const Topology& topo, const ScenarioConfig& cfg, std::uint64_t seed);

} // namespace fran
