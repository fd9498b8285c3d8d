#include "fran/topology.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fran/rng.hpp"

namespace fran {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {

Point uniform_in_disk(Rng& rng, const Point& centre, double radius)
{
    if (radius <= 0.0) return centre;
    std::uniform_real_distribution<double> u(-radius, radius);
    for (;;) {
        double dx = u(rng);
        double dy = u(rng);
        if (dx * dx + dy * dy <= radius * radius) return {centre.x + dx, centre.y + dy};
    }
}

std::vector<Point> regular_polygon(int count, double side)
{
    std::vector<Point> pts;
    if (count == 1) {
        pts.push_back({0.0, 0.0});
        return pts;
    }
    const double circumradius = side / (2.0 * std::sin(std::numbers::pi / count));
    for (int k = 0; k < count; ++k) {
        double angle = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / count;
        pts.push_back({circumradius * std::cos(angle), circumradius * std::sin(angle)});
    }
    return pts;
}

} // namespace

Topology generate_topology(const ScenarioConfig& cfg, std::uint64_t seed)
{
    Rng rng(seed);
    Topology topo;
    topo.rrh_positions = regular_polygon(cfg.num_rrh, cfg.rrh_spacing);
    const Point centre{0.0, 0.0};
    for (int m = 0; m < cfg.num_ue; ++m) {
        Point ue = uniform_in_disk(rng, centre, cfg.ue_disk_radius);
        topo.ue_positions.push_back(ue);
        topo.d2d_tx_positions.push_back(uniform_in_disk(rng, ue, cfg.d2d_max_distance));
    }
    return topo;
}

std::complex<double> antenna_gain(double distance_m, double shadow_db, std::complex<double> r)
{
    if (!(distance_m > 0.0)) throw std::invalid_argument("co-located transceivers (zero distance)");
    const double power = std::pow(10.0, shadow_db / 10.0) / (distance_m * distance_m);
    return std::sqrt(power) * r;
}

ChannelSet sample_channels(const Topology& topo, const ScenarioConfig& cfg, std::uint64_t seed)
{
    const int M = static_cast<int>(topo.ue_positions.size());
    const int K = static_cast<int>(topo.rrh_positions.size());
    const int L = cfg.antennas_per_rrh;
    if (static_cast<int>(topo.d2d_tx_positions.size()) != M)
        throw std::invalid_argument("topology needs one D2D transmitter per UE");

    Rng rng(seed);
    std::normal_distribution<double> shadow(0.0, 1.0);
    std::normal_distribution<double> fading(0.0, std::sqrt(0.5));

    ChannelSet ch;
    ch.num_rrh = K;
    ch.antennas_per_rrh = L;
    ch.h.assign(M, Eigen::VectorXcd::Zero(K * L));
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            const double d = distance(topo.ue_positions[m], topo.rrh_positions[k]);
            const double x_db = cfg.shadow_std_db * shadow(rng);
            for (int l = 0; l < L; ++l) {
                std::complex<double> r(fading(rng), fading(rng));
                ch.h[m](k * L + l) = antenna_gain(d, x_db, r);
            }
        }
    }

    ch.g_d2d.resize(M);
    ch.g_cross.resize(M, M);
    for (int m = 0; m < M; ++m) {
        const double d = distance(topo.ue_positions[m], topo.d2d_tx_positions[m]);
        if (!(d > 0.0)) throw std::invalid_argument("co-located D2D transceiver (zero distance)");
        ch.g_d2d(m) = 1.0 / (d * d);
        for (int mp = 0; mp < M; ++mp) {
            if (mp == m) {
                ch.g_cross(m, mp) = 0.0;
                continue;
            }
            const double dc = distance(topo.ue_positions[m], topo.d2d_tx_positions[mp]);
            if (!(dc > 0.0)) throw std::invalid_argument("co-located D2D transmitter and UE (zero distance)");
            ch.g_cross(m, mp) = 1.0 / (dc * dc);
        }
    }
    return ch;
}

} // namespace fran
