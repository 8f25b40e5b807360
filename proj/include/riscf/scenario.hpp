#pragma once

#include "riscf/geometry.hpp"
#include "riscf/ris.hpp"
#include "riscf/units.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace riscf {

/// Everything that defines a network before a drop is drawn.
struct ScenarioConfig {
    int m_aps = 40;
    int k_users = 10;
    int j_ris = 3;
    int n_antennas = 4;
    int tau_p = 3;
    double d_km = 1.5;
    RadioConstants radio;
    PanelSpec panel;
    double pilot_dbm = 20.0;
    double downlink_dbm = 23.0;
    /// Extra gain applied to both RIS-side large-scale coefficients (0 dB = physical model).
    double ris_link_gain_db = 0.0;
    std::uint64_t seed = 1;

    void validate() const
    {
        radio.validate();
        if (m_aps < 1 || k_users < 1)
            throw std::invalid_argument("scenario: need at least one AP and one user");
        if (j_ris < 0)
            throw std::invalid_argument("scenario: negative RIS count");
        if (n_antennas < 1)
            throw std::invalid_argument("scenario: need at least one antenna per AP");
        if (tau_p < 1)
            throw std::invalid_argument("scenario: pilot length must be at least 1");
        if (2 * tau_p >= radio.tau_c)
            throw std::invalid_argument("scenario: two pilot sub-phases must fit in the coherence interval");
        if (!(d_km > 0.0))
            throw std::invalid_argument("scenario: region size must be positive");
        if (panel.l_v < 1 || panel.l_h < 1 || !(panel.spacing_over_lambda > 0.0))
            throw std::invalid_argument("scenario: invalid RIS panel");
        if (panel.amplitude < 0.0 || panel.amplitude > 1.0)
            throw std::invalid_argument("scenario: RIS amplitude must lie in [0, 1]");
    }
};

/// One network drop: large-scale statistics, panels and radio constants.
struct Scenario {
    Eigen::Index M = 0, K = 0, J = 0, N = 0;
    int tau_p = 1;
    int tau_c = 200;
    LargeScaleFading lsf;
    std::vector<RisPanel> panels;
    double pilot_power_w = 0.1;
    double noise_w = dbm_to_watt(-91.0);
    double downlink_power_w = dbm_to_watt(23.0);

    double pilot_snr() const { return pilot_power_w / noise_w; }
    double downlink_snr() const { return downlink_power_w / noise_w; }

    /// delta^d_mk = beta^d_mk.
    const Eigen::MatrixXd& direct_gain() const { return lsf.direct; }

    /// delta^c_mk = sum_j beta_mj beta_kj tr(T_j).
    Eigen::MatrixXd cascade_gain() const
    {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(M, K);
        for (Eigen::Index j = 0; j < J; ++j)
            d += panels[j].trace_t() * lsf.ap_ris.col(j) * lsf.user_ris.col(j).transpose();
        return d;
    }

    /// sum_j beta_mj sigma_j^2 tr(T_j): EMI power reaching AP m through the RISs.
    double emi_at_ap(Eigen::Index m) const
    {
        double s = 0.0;
        for (Eigen::Index j = 0; j < J; ++j)
            s += lsf.ap_ris(m, j) * panels[j].emi_power() * panels[j].trace_t();
        return s;
    }

    Scenario without_emi() const
    {
        Scenario s = *this;
        for (auto& p : s.panels)
            p = p.with_emi_power(0.0);
        return s;
    }

    Scenario without_ris() const
    {
        Scenario s = *this;
        s.J = 0;
        s.panels.clear();
        s.lsf.ap_ris.resize(M, 0);
        s.lsf.user_ris.resize(K, 0);
        return s;
    }

    void validate() const
    {
        if (lsf.direct.rows() != M || lsf.direct.cols() != K || lsf.ap_ris.rows() != M || lsf.ap_ris.cols() != J
            || lsf.user_ris.rows() != K || lsf.user_ris.cols() != J
            || static_cast<Eigen::Index>(panels.size()) != J)
            throw std::invalid_argument("scenario: inconsistent dimensions");
        if (M < 1 || K < 1 || N < 1 || tau_p < 1 || tau_c <= 2 * tau_p)
            throw std::invalid_argument("scenario: invalid sizes");
        auto finite_positive = [](const Eigen::MatrixXd& a) {
            return a.size() == 0 || ((a.array() > 0.0).all() && a.allFinite());
        };
        if (!finite_positive(lsf.direct) || !finite_positive(lsf.ap_ris) || !finite_positive(lsf.user_ris))
            throw std::invalid_argument("scenario: large-scale coefficients must be positive and finite");
    }
};

/// Seed for drop d of a master seed.
inline std::uint64_t drop_seed(std::uint64_t master, std::uint64_t drop)
{
    return Stream(master, StreamTag::drop, {drop}).bits();
}

/// Uniform phase/amplitude panels sharing one spec, with per-panel EMI power.
inline std::vector<RisPanel> build_panels(const PanelSpec& spec, double wavelength_m, const Eigen::MatrixXd& beta_ap_ris,
                                          double pilot_power_w, double noise_w)
{
    std::vector<RisPanel> out;
    if (beta_ap_ris.cols() == 0)
        return out;
    const RisPanel base = RisPanel::uniform(spec, wavelength_m);
    const double rho = db_to_linear(spec.rho_db);
    for (Eigen::Index j = 0; j < beta_ap_ris.cols(); ++j)
        out.push_back(base.with_emi_power(emi_power(j, beta_ap_ris, pilot_power_w, rho, noise_w)));
    return out;
}

/// Draws layout and shadowing for drop `drop` of the config's master seed.
inline Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t drop)
{
    cfg.validate();
    const std::uint64_t seed = drop_seed(cfg.seed, drop);
    const NetworkLayout layout = generate_layout(cfg.m_aps, cfg.k_users, cfg.j_ris, cfg.d_km, seed, cfg.radio);

    Scenario s;
    s.M = cfg.m_aps;
    s.K = cfg.k_users;
    s.J = cfg.j_ris;
    s.N = cfg.n_antennas;
    s.tau_p = cfg.tau_p;
    s.tau_c = cfg.radio.tau_c;
    s.lsf = large_scale_fading(layout, cfg.radio, seed);
    if (cfg.ris_link_gain_db != 0.0) {
        const double g = db_to_linear(cfg.ris_link_gain_db);
        s.lsf.ap_ris *= g;
        s.lsf.user_ris *= g;
    }
    s.pilot_power_w = dbm_to_watt(cfg.pilot_dbm);
    s.noise_w = cfg.radio.noise_watt();
    s.downlink_power_w = dbm_to_watt(cfg.downlink_dbm);
    s.panels = build_panels(cfg.panel, cfg.radio.wavelength_m(), s.lsf.ap_ris, s.pilot_power_w, s.noise_w);
    s.validate();
    return s;
}

} // namespace riscf
