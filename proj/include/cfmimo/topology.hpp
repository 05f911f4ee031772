#pragma once

#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// AP and UE positions on a square area, in kilometres.
struct NetworkLayout {
    double area_side_km = 1.0;
    std::vector<Point2> ap_positions;
    std::vector<Point2> ue_positions;
    bool wrap_around = true;

    std::size_t n_aps() const { return ap_positions.size(); }
    std::size_t n_users() const { return ue_positions.size(); }
};

/// Three-slope path loss parameters. `loss_constant_db` is derived from the
/// carrier frequency and antenna heights; build through make_path_loss_params
/// so it stays consistent.
struct PathLossParams {
    double d0_km = 0.01;
    double d1_km = 0.05;
    double carrier_freq_mhz = 1900.0;
    double h_ap_m = 15.0;
    double h_ue_m = 1.65;
    double loss_constant_db = 0.0;
};

struct LargeScaleFading {
    RMat beta;      // L x K linear power gains
    RMat pl_db;     // L x K path loss (dB, negative)
    RMat shadow_db; // L x K shadowing realizations (dB)
    double sigma_sh_db = 0.0;
};

std::vector<Point2> place_uniform(std::size_t count, double area_side_km, Rng& rng);

/// Minimum-image distance on the torus obtained by tiling the square.
double wrap_distance(Point2 p, Point2 q, double area_side_km);

double euclidean_distance(Point2 p, Point2 q);

/// COST-231 Hata style constant; f in MHz, heights in metres.
double path_loss_constant(double f_mhz, double h_ap_m, double h_ue_m);

PathLossParams make_path_loss_params(double d0_km, double d1_km, double carrier_freq_mhz, double h_ap_m, double h_ue_m);

/// Three-slope path loss in dB (a gain, so normally negative).
double path_loss_db(double d_km, const PathLossParams& params);

/// Path loss plus i.i.d. log-normal shadowing for every (AP, user) link.
/// With `shadow_inside_d1 == false` links at distance <= d1 are not shadowed;
/// the normal draw is still consumed so the stream stays aligned.
LargeScaleFading large_scale_fading(const NetworkLayout& layout, const PathLossParams& params, double sigma_sh_db,
                                    Rng& rng, bool shadow_inside_d1 = true);

} // namespace cfmimo
