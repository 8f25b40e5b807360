#pragma once

#include "riscf/geometry.hpp"
#include "riscf/parallel.hpp"
#include "riscf/ris.hpp"
#include "riscf/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace riscf {

/// AP-RIS channel kept in factored form: G = scale * white * R^{1/2}.
///
/// The engines only ever need G applied to a handful of vectors, so the
/// N x L product is formed on demand.
struct ApRisChannel {
    double scale = 0.0; // sqrt(beta_mj A_j)
    Eigen::MatrixXcd white; // N x L, i.i.d. CN(0, 1)

    Eigen::MatrixXcd dense(const RisPanel& panel) const
    {
        return scale * (white * panel.correlation_sqrt().cast<cplx>());
    }

    /// G x given x' = R^{1/2} x.
    Eigen::VectorXcd apply_presqrt(const Eigen::VectorXcd& presqrt) const { return scale * (white * presqrt); }
};

/// Index helpers for flattened (row, col) blocks.
struct BlockIndex {
    Eigen::Index cols;
    Eigen::Index operator()(Eigen::Index r, Eigen::Index c) const { return r * cols + c; }
};

/// One draw of all small-scale fading.
struct ChannelRealization {
    Eigen::Index M = 0, K = 0, J = 0, N = 0;
    std::vector<Eigen::VectorXcd> direct;    // [m*K + k], N
    std::vector<ApRisChannel> ap_ris;        // [m*J + j]
    std::vector<Eigen::VectorXcd> user_ris;  // [k*J + j], L_j
    std::vector<Eigen::VectorXcd> cascaded;  // [m*K + k], sum_j G_mj Theta_j g_kj
    std::vector<Eigen::VectorXcd> aggregate; // [m*K + k], direct + cascaded

    const Eigen::VectorXcd& g(Eigen::Index m, Eigen::Index k) const { return aggregate[m * K + k]; }
    const Eigen::VectorXcd& g_direct(Eigen::Index m, Eigen::Index k) const { return direct[m * K + k]; }
    const Eigen::VectorXcd& g_cascaded(Eigen::Index m, Eigen::Index k) const { return cascaded[m * K + k]; }
    const ApRisChannel& g_ap_ris(Eigen::Index m, Eigen::Index j) const { return ap_ris[m * J + j]; }
    const Eigen::VectorXcd& g_user_ris(Eigen::Index k, Eigen::Index j) const { return user_ris[k * J + j]; }
};

/// g_mk^d = sqrt(beta_mk) v, v ~ CN(0, I_N); returned flattened [m*K + k].
inline std::vector<Eigen::VectorXcd> sample_direct(const Eigen::MatrixXd& beta_direct, Eigen::Index N, Stream& rng)
{
    std::vector<Eigen::VectorXcd> out;
    out.reserve(static_cast<std::size_t>(beta_direct.size()));
    for (Eigen::Index m = 0; m < beta_direct.rows(); ++m)
        for (Eigen::Index k = 0; k < beta_direct.cols(); ++k) {
            if (beta_direct(m, k) < 0.0)
                throw std::invalid_argument("sample_direct: negative large-scale coefficient");
            out.push_back(std::sqrt(beta_direct(m, k)) * rng.cnormal_vector(N));
        }
    return out;
}

/// g_mj^c = sqrt(beta) V (A R)^{1/2}.
inline ApRisChannel sample_ap_ris(double beta, const RisPanel& panel, Eigen::Index N, Stream& rng)
{
    if (beta < 0.0)
        throw std::invalid_argument("sample_ap_ris: negative large-scale coefficient");
    return {std::sqrt(beta * panel.area()), rng.cnormal_matrix(N, panel.elements())};
}

/// g_kj^c = sqrt(beta) (A R)^{1/2} v.
inline Eigen::VectorXcd sample_user_ris(double beta, const RisPanel& panel, Stream& rng)
{
    if (beta < 0.0)
        throw std::invalid_argument("sample_user_ris: negative large-scale coefficient");
    const Eigen::VectorXcd v = rng.cnormal_vector(panel.elements());
    return std::sqrt(beta * panel.area()) * (panel.correlation_sqrt().cast<cplx>() * v);
}

/// g_mk = g_mk^d + sum_j g_mj^c Theta_j g_kj^c.
inline ChannelRealization assemble_aggregate(std::vector<Eigen::VectorXcd> direct, std::vector<ApRisChannel> ap_ris,
                                             std::vector<Eigen::VectorXcd> user_ris,
                                             const std::vector<RisPanel>& panels, Eigen::Index M, Eigen::Index K,
                                             Eigen::Index N)
{
    const auto J = static_cast<Eigen::Index>(panels.size());
    if (static_cast<Eigen::Index>(direct.size()) != M * K || static_cast<Eigen::Index>(ap_ris.size()) != M * J
        || static_cast<Eigen::Index>(user_ris.size()) != K * J)
        throw std::invalid_argument("assemble_aggregate: block counts do not match M, K, J");
    for (const auto& v : direct)
        if (v.size() != N)
            throw std::invalid_argument("assemble_aggregate: direct channel length != N");
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index j = 0; j < J; ++j) {
            const auto& G = ap_ris[m * J + j].white;
            if (G.rows() != N || G.cols() != panels[j].elements())
                throw std::invalid_argument("assemble_aggregate: AP-RIS channel has wrong shape");
        }
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index j = 0; j < J; ++j)
            if (user_ris[k * J + j].size() != panels[j].elements())
                throw std::invalid_argument("assemble_aggregate: user-RIS channel has wrong length");

    ChannelRealization r;
    r.M = M;
    r.K = K;
    r.J = J;
    r.N = N;
    r.direct = std::move(direct);
    r.ap_ris = std::move(ap_ris);
    r.user_ris = std::move(user_ris);
    r.cascaded.assign(static_cast<std::size_t>(M * K), Eigen::VectorXcd::Zero(N));

    // R^{1/2} Theta g_kj is shared by every AP.
    std::vector<Eigen::VectorXcd> reflected(static_cast<std::size_t>(K * J));
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index j = 0; j < J; ++j)
            reflected[k * J + j] = panels[j].correlation_sqrt().cast<cplx>()
                * (panels[j].reflection().asDiagonal() * r.user_ris[k * J + j]);

    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index j = 0; j < J; ++j) {
            const auto& G = r.ap_ris[m * J + j];
            for (Eigen::Index k = 0; k < K; ++k)
                r.cascaded[m * K + k] += G.apply_presqrt(reflected[k * J + j]);
        }

    r.aggregate.resize(static_cast<std::size_t>(M * K));
    for (Eigen::Index i = 0; i < M * K; ++i)
        r.aggregate[i] = r.direct[i] + r.cascaded[i];
    return r;
}

/// Full draw. Direct and RIS links use separate streams, so the direct
/// channels of a trial do not change when RISs are added or removed.
inline ChannelRealization sample_realization(const LargeScaleFading& lsf, const std::vector<RisPanel>& panels,
                                             Eigen::Index N, std::uint64_t seed, std::uint64_t drop,
                                             std::uint64_t trial)
{
    const Eigen::Index M = lsf.aps(), K = lsf.users();
    const auto J = static_cast<Eigen::Index>(panels.size());
    if (lsf.panels() != J || lsf.user_ris.cols() != J)
        throw std::invalid_argument("sample_realization: large-scale fading and panel count disagree");

    Stream direct_rng(seed, StreamTag::direct_channel, {drop, trial});
    auto direct = sample_direct(lsf.direct, N, direct_rng);

    Stream ris_rng(seed, StreamTag::ris_channel, {drop, trial});
    std::vector<ApRisChannel> ap_ris;
    ap_ris.reserve(static_cast<std::size_t>(M * J));
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index j = 0; j < J; ++j)
            ap_ris.push_back(sample_ap_ris(lsf.ap_ris(m, j), panels[j], N, ris_rng));
    std::vector<Eigen::VectorXcd> user_ris;
    user_ris.reserve(static_cast<std::size_t>(K * J));
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index j = 0; j < J; ++j)
            user_ris.push_back(sample_user_ris(lsf.user_ris(k, j), panels[j], ris_rng));

    return assemble_aggregate(std::move(direct), std::move(ap_ris), std::move(user_ris), panels, M, K, N);
}

/// Sample mean of ||g_mk||^2 / N over `trials` realizations (M x K).
inline Eigen::MatrixXd channel_energy(const LargeScaleFading& lsf, const std::vector<RisPanel>& panels, Eigen::Index N,
                                      std::uint64_t trials, std::uint64_t seed, std::uint64_t drop = 0,
                                      const RunOptions& opts = {})
{
    if (trials < 1)
        throw std::invalid_argument("channel_energy: need at least one trial");
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(lsf.aps(), lsf.users());
    const auto parts = run_batches<Eigen::MatrixXd>(trials, opts, zero, [&](std::uint64_t t, Eigen::MatrixXd& acc) {
        const auto r = sample_realization(lsf, panels, N, seed, drop, t);
        for (Eigen::Index m = 0; m < r.M; ++m)
            for (Eigen::Index k = 0; k < r.K; ++k)
                acc(m, k) += r.g(m, k).squaredNorm();
    });
    Eigen::MatrixXd tot = zero;
    for (const auto& p : parts)
        tot += p;
    return tot / (static_cast<double>(trials) * static_cast<double>(N));
}

} // namespace riscf
