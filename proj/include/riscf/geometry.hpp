#pragma once

#include "riscf/rng.hpp"
#include "riscf/units.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace riscf {

/// Horizontal coordinates in km, height in m.
struct Point3 {
    double x_km = 0.0;
    double y_km = 0.0;
    double z_m = 0.0;
};

inline double distance_km(const Point3& a, const Point3& b)
{
    const double dx = a.x_km - b.x_km;
    const double dy = a.y_km - b.y_km;
    const double dz = (a.z_m - b.z_m) / 1000.0;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct RadioConstants {
    double carrier_mhz = 1900.0;
    double noise_dbm = -91.0;
    double d0_m = 10.0;
    double d1_m = 50.0;
    double shadow_db = 8.0;
    int tau_c = 200;
    double ap_height_m = 15.0;
    double user_height_m = 1.65;
    double ris_height_m = 30.0;

    double wavelength_m() const { return kSpeedOfLight / (carrier_mhz * 1e6); }
    double noise_watt() const { return dbm_to_watt(noise_dbm); }

    void validate() const
    {
        if (!(carrier_mhz > 0.0))
            throw std::invalid_argument("carrier frequency must be positive");
        if (!(d0_m > 0.0 && d0_m < d1_m))
            throw std::invalid_argument("path-loss knees must satisfy 0 < d0 < d1");
        if (shadow_db < 0.0)
            throw std::invalid_argument("shadowing deviation must be non-negative");
        if (tau_c < 1)
            throw std::invalid_argument("coherence interval must hold at least one symbol");
    }
};

struct NetworkLayout {
    double region_km = 0.0;
    std::vector<Point3> aps;
    std::vector<Point3> users;
    std::vector<Point3> ris;
};

/// Large-scale fading in linear scale: direct (M x K), AP-RIS (M x J), user-RIS (K x J).
struct LargeScaleFading {
    Eigen::MatrixXd direct;
    Eigen::MatrixXd ap_ris;
    Eigen::MatrixXd user_ris;

    Eigen::Index aps() const { return direct.rows(); }
    Eigen::Index users() const { return direct.cols(); }
    Eigen::Index panels() const { return ap_ris.cols(); }
};

enum class LinkKind { ap_user, ap_ris, user_ris };

/// Heights entering the COST-231 constant. The base is the AP for AP links and
/// the RIS for user-RIS links; the receiver height is always the user height.
struct LinkHeights {
    double base_m;
    double receiver_m;
};

inline LinkHeights link_heights(LinkKind kind, const RadioConstants& rc)
{
    switch (kind) {
    case LinkKind::ap_user:
        return {rc.ap_height_m, rc.user_height_m};
    case LinkKind::ap_ris:
        // The mobile-height correction is kept at user height; 30 m is far outside its fitted range.
        return {rc.ap_height_m, rc.user_height_m};
    case LinkKind::user_ris:
        return {rc.ris_height_m, rc.user_height_m};
    }
    throw std::invalid_argument("unknown link kind");
}

/// COST-231 Hata constant L in dB (frequency in MHz, heights in m).
inline double cost231_constant(double carrier_mhz, double base_height_m, double receiver_height_m)
{
    const double lf = std::log10(carrier_mhz);
    return 46.3 + 33.9 * lf - 13.82 * std::log10(base_height_m) - (1.1 * lf - 0.7) * receiver_height_m
        + (1.56 * lf - 0.8);
}

/// Three-slope path loss as a gain in dB (always negative for practical distances).
inline double path_loss_db(double distance_km_3d, double cost231_db, const RadioConstants& rc)
{
    if (!(distance_km_3d > 0.0))
        throw std::invalid_argument("path_loss: distance must be positive");
    const double d0 = rc.d0_m / 1000.0;
    const double d1 = rc.d1_m / 1000.0;
    if (distance_km_3d > d1)
        return -cost231_db - 35.0 * std::log10(distance_km_3d);
    if (distance_km_3d > d0)
        return -cost231_db - 15.0 * std::log10(d1) - 20.0 * std::log10(distance_km_3d);
    return -cost231_db - 15.0 * std::log10(d1) - 20.0 * std::log10(d0);
}

inline double path_loss_db(double distance_km_3d, LinkKind kind, const RadioConstants& rc)
{
    const LinkHeights h = link_heights(kind, rc);
    return path_loss_db(distance_km_3d, cost231_constant(rc.carrier_mhz, h.base_m, h.receiver_m), rc);
}

/// Uniform drop: APs in [-D/2, 0]^2, users and RISs in [0, D/2]^2.
///
/// Every node draws from its own stream, so a layout with more APs (or RISs)
/// extends a smaller one with the same seed instead of reshuffling it.
inline NetworkLayout generate_layout(int aps, int users, int panels, double region_km, std::uint64_t seed,
                                     const RadioConstants& rc = {})
{
    if (aps < 1 || users < 1)
        throw std::invalid_argument("generate_layout: need at least one AP and one user");
    if (panels < 0)
        throw std::invalid_argument("generate_layout: negative RIS count");
    if (!(region_km > 0.0))
        throw std::invalid_argument("generate_layout: region size must be positive");

    const double half = region_km / 2.0;
    auto place = [&](StreamTag tag, int index, double lo, double height) {
        Stream s(seed, tag, {static_cast<std::uint64_t>(index)});
        Point3 p;
        p.x_km = s.uniform(lo, lo + half);
        p.y_km = s.uniform(lo, lo + half);
        p.z_m = height;
        return p;
    };

    NetworkLayout layout;
    layout.region_km = region_km;
    for (int m = 0; m < aps; ++m)
        layout.aps.push_back(place(StreamTag::ap_position, m, -half, rc.ap_height_m));
    for (int k = 0; k < users; ++k)
        layout.users.push_back(place(StreamTag::user_position, k, 0.0, rc.user_height_m));
    for (int j = 0; j < panels; ++j)
        layout.ris.push_back(place(StreamTag::ris_position, j, 0.0, rc.ris_height_m));
    return layout;
}

/// beta = 10^((PL + shadowing)/10) per link; shadowing only beyond d1.
inline LargeScaleFading large_scale_fading(const NetworkLayout& layout, const RadioConstants& rc,
                                           std::uint64_t seed)
{
    rc.validate();
    const auto M = static_cast<Eigen::Index>(layout.aps.size());
    const auto K = static_cast<Eigen::Index>(layout.users.size());
    const auto J = static_cast<Eigen::Index>(layout.ris.size());
    if (M == 0 || K == 0)
        throw std::invalid_argument("large_scale_fading: empty layout");

    const double d1 = rc.d1_m / 1000.0;
    auto beta = [&](const Point3& a, const Point3& b, LinkKind kind, StreamTag tag, Eigen::Index i,
                    Eigen::Index j) {
        const double d = distance_km(a, b);
        double db = path_loss_db(d, kind, rc);
        if (d > d1 && rc.shadow_db > 0.0) {
            Stream s(seed, tag, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
            db += rc.shadow_db * s.normal();
        }
        return db_to_linear(db);
    };

    LargeScaleFading f;
    f.direct.resize(M, K);
    f.ap_ris.resize(M, J);
    f.user_ris.resize(K, J);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index k = 0; k < K; ++k)
            f.direct(m, k) = beta(layout.aps[m], layout.users[k], LinkKind::ap_user, StreamTag::shadow_direct, m, k);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index j = 0; j < J; ++j)
            f.ap_ris(m, j) = beta(layout.aps[m], layout.ris[j], LinkKind::ap_ris, StreamTag::shadow_ap_ris, m, j);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index j = 0; j < J; ++j)
            f.user_ris(k, j) =
                beta(layout.users[k], layout.ris[j], LinkKind::user_ris, StreamTag::shadow_user_ris, k, j);
    return f;
}

/// CSV with columns node_type,index,x_km,y_km,z_m.
inline void write_layout_csv(std::ostream& os, const NetworkLayout& layout)
{
    os << "node_type,index,x_km,y_km,z_m\n";
    auto rows = [&](const char* type, const std::vector<Point3>& pts) {
        for (std::size_t i = 0; i < pts.size(); ++i)
            os << type << ',' << i << ',' << pts[i].x_km << ',' << pts[i].y_km << ',' << pts[i].z_m << '\n';
    };
    rows("ap", layout.aps);
    rows("user", layout.users);
    rows("ris", layout.ris);
}

} // namespace riscf
