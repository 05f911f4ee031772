#include "cfmimo/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfmimo {

std::vector<Point2> place_uniform(std::size_t count, double area_side_km, Rng& rng)
{
    if (count == 0)
        throw std::invalid_argument("place_uniform: count must be >= 1");
    if (!(area_side_km > 0.0))
        throw std::invalid_argument("place_uniform: area side must be positive");

    std::vector<Point2> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.uniform(0.0, area_side_km);
        const double y = rng.uniform(0.0, area_side_km);
        points.push_back({x, y});
    }
    return points;
}

double euclidean_distance(Point2 p, Point2 q)
{
    return std::hypot(p.x - q.x, p.y - q.y);
}

double wrap_distance(Point2 p, Point2 q, double area_side_km)
{
    // minimum over the 9 shifted images, separable per axis; |p - q| keeps it
    // exactly symmetric
    auto axis = [area_side_km](double u, double v) {
        const double d = std::abs(u - v);
        return std::min({d, std::abs(d - area_side_km), d + area_side_km});
    };
    return std::hypot(axis(p.x, q.x), axis(p.y, q.y));
}

double path_loss_constant(double f_mhz, double h_ap_m, double h_ue_m)
{
    if (!(f_mhz > 0.0) || !(h_ap_m > 0.0) || !(h_ue_m > 0.0))
        throw std::invalid_argument("path_loss_constant: arguments must be positive");
    const double lf = std::log10(f_mhz);
    return 46.3 + 33.9 * lf - 13.83 * std::log10(h_ap_m) - (1.1 * lf - 0.7) * h_ue_m + (1.56 * lf - 0.8);
}

PathLossParams make_path_loss_params(double d0_km, double d1_km, double carrier_freq_mhz, double h_ap_m, double h_ue_m)
{
    if (!(d0_km > 0.0) || !(d1_km > d0_km))
        throw std::invalid_argument("path loss breakpoints must satisfy 0 < d0 < d1");
    PathLossParams p;
    p.d0_km = d0_km;
    p.d1_km = d1_km;
    p.carrier_freq_mhz = carrier_freq_mhz;
    p.h_ap_m = h_ap_m;
    p.h_ue_m = h_ue_m;
    p.loss_constant_db = path_loss_constant(carrier_freq_mhz, h_ap_m, h_ue_m);
    return p;
}

double path_loss_db(double d_km, const PathLossParams& params)
{
    const double l = params.loss_constant_db;
    if (d_km > params.d1_km)
        return -l - 35.0 * std::log10(d_km);
    if (d_km > params.d0_km)
        return -l - 15.0 * std::log10(params.d1_km) - 20.0 * std::log10(d_km);
    return -l - 15.0 * std::log10(params.d1_km) - 20.0 * std::log10(params.d0_km);
}

LargeScaleFading large_scale_fading(const NetworkLayout& layout, const PathLossParams& params, double sigma_sh_db,
                                    Rng& rng, bool shadow_inside_d1)
{
    const auto n_aps = static_cast<Eigen::Index>(layout.n_aps());
    const auto n_users = static_cast<Eigen::Index>(layout.n_users());

    LargeScaleFading out;
    out.sigma_sh_db = sigma_sh_db;
    out.beta.resize(n_aps, n_users);
    out.pl_db.resize(n_aps, n_users);
    out.shadow_db.resize(n_aps, n_users);

    for (Eigen::Index l = 0; l < n_aps; ++l) {
        for (Eigen::Index k = 0; k < n_users; ++k) {
            const Point2 ap = layout.ap_positions[static_cast<std::size_t>(l)];
            const Point2 ue = layout.ue_positions[static_cast<std::size_t>(k)];
            const double d = layout.wrap_around ? wrap_distance(ap, ue, layout.area_side_km)
                                                : euclidean_distance(ap, ue);
            const double z = rng.normal();
            const bool shadowed = shadow_inside_d1 || d > params.d1_km;
            out.pl_db(l, k) = path_loss_db(d, params);
            out.shadow_db(l, k) = shadowed ? sigma_sh_db * z : 0.0;
            out.beta(l, k) = db_to_linear(out.pl_db(l, k) + out.shadow_db(l, k));
        }
    }
    return out;
}

} // namespace cfmimo
