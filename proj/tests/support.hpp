#pragma once

// Small hand-built scenarios with noise power 1, so pilot and downlink powers are SNRs.

#include "riscf/scenario.hpp"

namespace riscf::test {

inline std::vector<RisPanel> square_panels(int J, int side, double emi = 0.0)
{
    PanelSpec spec;
    spec.l_v = spec.l_h = side;
    std::vector<RisPanel> p;
    for (int j = 0; j < J; ++j)
        p.push_back(RisPanel::uniform(spec, RadioConstants{}.wavelength_m(), emi));
    return p;
}

inline Scenario toy_scenario(Eigen::MatrixXd direct, Eigen::MatrixXd ap_ris, Eigen::MatrixXd user_ris,
                             std::vector<RisPanel> panels, int N, int tau_p, double pilot_snr, double downlink_snr)
{
    Scenario s;
    s.M = direct.rows();
    s.K = direct.cols();
    s.J = ap_ris.cols();
    s.N = N;
    s.tau_p = tau_p;
    s.lsf.direct = std::move(direct);
    s.lsf.ap_ris = std::move(ap_ris);
    s.lsf.user_ris = std::move(user_ris);
    s.panels = std::move(panels);
    s.noise_w = 1.0;
    s.pilot_power_w = pilot_snr;
    s.downlink_power_w = downlink_snr;
    s.validate();
    return s;
}

inline Scenario direct_only(Eigen::MatrixXd direct, int N, int tau_p, double pilot_snr, double downlink_snr)
{
    const auto M = direct.rows(), K = direct.cols();
    return toy_scenario(std::move(direct), Eigen::MatrixXd(M, 0), Eigen::MatrixXd(K, 0), {}, N, tau_p, pilot_snr,
                        downlink_snr);
}

/// M APs, K users, J 2x2 panels; RIS links strong enough that the cascade is
/// comparable to the direct path. `emi` sets the EMI-to-noise ratio at a
/// typical AP or user, per panel.
inline Scenario mixed_scenario(int M, int K, int J, int N, int tau_p, double emi = 0.0)
{
    const double A2 = square_panels(1, 2)[0].trace_t();
    Eigen::MatrixXd direct(M, K), ap_ris(M, J), user_ris(K, J);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k)
            direct(m, k) = 0.2 + 0.3 * ((m * 7 + k * 3) % 5);
    for (int m = 0; m < M; ++m)
        for (int j = 0; j < J; ++j)
            ap_ris(m, j) = (0.5 + 0.5 * ((m + 2 * j) % 3)) / std::sqrt(A2);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < J; ++j)
            user_ris(k, j) = (0.4 + 0.3 * ((k + j) % 4)) / std::sqrt(A2);
    return toy_scenario(direct, ap_ris, user_ris, square_panels(J, 2, emi / std::sqrt(A2)), N, tau_p, 3.0, 5.0);
}

} // namespace riscf::test
