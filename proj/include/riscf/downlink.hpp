#pragma once

#include "riscf/channel.hpp"
#include "riscf/estimation.hpp"
#include "riscf/parallel.hpp"
#include "riscf/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace riscf {

/// Conjugate-beamforming power coefficients and the normalized downlink SNR.
struct PowerAllocation {
    Eigen::MatrixXd eta; // M x K
    double rho_d = 0.0;
};

/// eta_mk = 1 / (K N lambda_mk): every AP transmits at full power.
inline PowerAllocation power_coefficients(const EstimatorState& st, Eigen::Index N, double rho_d)
{
    if (!(st.lambda.array() > 0.0).all())
        throw std::domain_error("power_coefficients: every lambda_mk must be positive");
    const double K = static_cast<double>(st.lambda.cols());
    PowerAllocation a;
    a.rho_d = rho_d;
    a.eta = (K * static_cast<double>(N) * st.lambda.array()).inverse().matrix();
    return a;
}

/// E{|DS_k|^2} = rho_d N^2 (sum_m sqrt(eta_mk) lambda_mk)^2.
inline double ds_power(Eigen::Index k, const PowerAllocation& alloc, const EstimatorState& st, Eigen::Index N)
{
    const double s = (alloc.eta.col(k).array().sqrt() * st.lambda.col(k).array()).sum();
    const double n = static_cast<double>(N);
    return alloc.rho_d * n * n * s * s;
}

/// Which closed form to use for the beamformed interference.
///
/// `gaussian_cascade` treats the cascaded channel as if it were Gaussian and
/// independent across APs; `exact` adds the fourth-order terms that come from
/// every AP seeing the same user-RIS channel and the same pilot-phase EMI.
enum class UiExpansion { exact, gaussian_cascade };

/// E{|sum_m sqrt(eta_mk') g_mk^T conj(g_hat_mk')|^2} scaled by rho_d.
///
/// For k' = k this is the total received power of user k's own stream
/// (desired signal plus beamforming uncertainty). Terms gated on pilot
/// sharing appear only when k and k' share a pilot in that sub-phase.
inline double ui_power(Eigen::Index k, Eigen::Index kp, const PowerAllocation& alloc, const Estimator& est,
                       const Scenario& s, UiExpansion expansion = UiExpansion::exact)
{
    const auto& st = est.state;
    const auto& pd = est.plan.direct;
    const auto& pc = est.plan.cascaded;
    const double tau = est.plan.tau_p;
    const double N = static_cast<double>(s.N);
    const bool exact = expansion == UiExpansion::exact;
    const bool share_d = pd.shares(k, kp);
    const bool share_c = pc.shares(k, kp);
    const double gain_d = std::sqrt(tau * pd.snr[k]);
    const double gain_c = std::sqrt(tau * pc.snr[k]);

    double incoherent = 0.0;
    double coherent = 0.0;
    for (Eigen::Index m = 0; m < s.M; ++m) {
        const double eta = alloc.eta(m, kp);
        double mean = 0.0; // E{g_hat_mk'^H g_mk} / N
        if (share_d)
            mean += st.c_d(m, kp) * gain_d * st.delta_d(m, k);
        if (share_c)
            mean += st.c_c(m, kp) * gain_c * st.delta_c(m, k);
        coherent += std::sqrt(eta) * mean;

        incoherent += eta * st.lambda(m, kp) * st.delta(m, k);
        if (exact && share_c) {
            double q = 0.0;
            for (Eigen::Index j = 0; j < s.J; ++j) {
                const double b = s.lsf.ap_ris(m, j) * s.lsf.user_ris(k, j);
                q += b * b * s.panels[j].trace_t2();
            }
            incoherent += eta * st.c_c(m, kp) * st.c_c(m, kp) * gain_c * gain_c * q;
        }
    }

    double shared_ris = 0.0;
    if (exact) {
        for (Eigen::Index j = 0; j < s.J; ++j) {
            double w = 0.0;
            for (Eigen::Index m = 0; m < s.M; ++m)
                w += std::sqrt(alloc.eta(m, kp)) * st.c_c(m, kp) * s.lsf.ap_ris(m, j);
            double load = s.panels[j].emi_power();
            for (int a : pc.copilots[kp])
                load += tau * pc.snr[a] * s.lsf.user_ris(a, j);
            shared_ris += s.lsf.user_ris(k, j) * s.panels[j].trace_t2() * load * w * w;
        }
    }

    return alloc.rho_d * (N * incoherent + N * N * (coherent * coherent + shared_ris));
}

/// E{|EMI_k|^2} = sum_j beta_kj sigma_j^2 tr(T_j).
inline double emi_received_power(Eigen::Index k, const std::vector<RisPanel>& panels,
                                 const Eigen::MatrixXd& beta_user_ris)
{
    double s = 0.0;
    for (std::size_t j = 0; j < panels.size(); ++j)
        s += beta_user_ris(k, static_cast<Eigen::Index>(j)) * panels[j].emi_power() * panels[j].trace_t();
    return s;
}

/// Per-user decomposition of the use-and-then-forget bound.
struct UserSe {
    double ds = 0.0;           // E{|DS_k|^2}
    double interference = 0.0; // sum_k' E{|UI_kk'|^2} - E{|DS_k|^2}
    double emi = 0.0;          // E{|EMI_k|^2}
    double sinr = 0.0;
    double se = 0.0;
    double sinr_stderr = std::numeric_limits<double>::quiet_NaN();
    /// Monte Carlo only: rho_d |mean z_kk|^2 from the noisy estimates.
    double ds_sample = std::numeric_limits<double>::quiet_NaN();
};

/// How the Monte Carlo engine estimates E{g_mk^T g_hat_mk^*}.
///
/// `sample_mean` averages the per-trial inner products. `noise_conditioned`
/// averages E{. | channels}, computed exactly by re-running the estimator
/// without pilot noise and EMI; it is unbiased and removes the noise-driven
/// variance that swamps weak users.
enum class DsEstimator { noise_conditioned, sample_mean };

enum class SeMode { closed_form, monte_carlo };

struct SeReport {
    SeMode mode = SeMode::closed_form;
    double prelog = 1.0;
    std::vector<UserSe> users;
    double sum_se = 0.0;
    double sum_se_stderr = std::numeric_limits<double>::quiet_NaN();
    /// Monte Carlo only: E{||x_m||^2} / rho_d per AP.
    std::vector<double> full_power;
};

inline double se_sum(const SeReport& report)
{
    return std::accumulate(report.users.begin(), report.users.end(), 0.0,
                           [](double acc, const UserSe& u) { return acc + u.se; });
}

inline double sinr_from_terms(double ds, double interference, double emi)
{
    const double den = interference + emi + 1.0;
    if (!(den > 0.0))
        throw std::logic_error("sinr: non-positive denominator");
    return ds / den;
}

inline double sinr_closed_form(Eigen::Index k, const PowerAllocation& alloc, const Estimator& est, const Scenario& s,
                               UiExpansion expansion = UiExpansion::exact)
{
    const double ds = ds_power(k, alloc, est.state, s.N);
    double total = 0.0;
    for (Eigen::Index kp = 0; kp < s.K; ++kp)
        total += ui_power(k, kp, alloc, est, s, expansion);
    return sinr_from_terms(ds, total - ds, emi_received_power(k, s.panels, s.lsf.user_ris));
}

inline SeReport se_closed_form(const Scenario& s, const Estimator& est, UiExpansion expansion = UiExpansion::exact)
{
    const PowerAllocation alloc = power_coefficients(est.state, s.N, s.downlink_snr());
    SeReport rep;
    rep.mode = SeMode::closed_form;
    rep.prelog = est.prelog(s.tau_c);
    for (Eigen::Index k = 0; k < s.K; ++k) {
        UserSe u;
        u.ds = ds_power(k, alloc, est.state, s.N);
        double total = 0.0;
        for (Eigen::Index kp = 0; kp < s.K; ++kp)
            total += ui_power(k, kp, alloc, est, s, expansion);
        u.interference = total - u.ds;
        u.emi = emi_received_power(k, s.panels, s.lsf.user_ris);
        u.sinr = sinr_from_terms(u.ds, u.interference, u.emi);
        u.se = rep.prelog * std::log2(1.0 + u.sinr);
        rep.users.push_back(u);
    }
    rep.sum_se = se_sum(rep);
    return rep;
}

/// Sample-mean estimate of every expectation in the SINR bound.
///
/// Per trial: channels, pilot-phase estimation, fresh downlink EMI and data
/// symbols. Standard errors come from a jackknife over the fixed batches.
inline SeReport se_monte_carlo(const Scenario& s, const Estimator& est, std::uint64_t trials, std::uint64_t seed,
                               std::uint64_t drop = 0, const RunOptions& opts = {},
                               DsEstimator ds_mode = DsEstimator::noise_conditioned)
{
    if (trials < 1)
        throw std::invalid_argument("se_monte_carlo: need at least one trial");
    const PowerAllocation alloc = power_coefficients(est.state, s.N, s.downlink_snr());
    const Eigen::Index M = s.M, K = s.K;
    const Eigen::MatrixXd sqrt_eta = alloc.eta.array().sqrt().matrix();

    struct Acc {
        double n = 0;
        Eigen::VectorXcd z_own;   // sum z_kk
        Eigen::VectorXcd z_mean;  // sum E{z_kk | channels}
        Eigen::MatrixXd z_abs2;   // sum |z_kk'|^2
        Eigen::VectorXd emi_abs2; // sum |EMI_k|^2
        Eigen::VectorXd power;    // sum ||x_m||^2 / rho_d
    };
    Acc init;
    init.z_own = Eigen::VectorXcd::Zero(K);
    init.z_mean = Eigen::VectorXcd::Zero(K);
    init.z_abs2 = Eigen::MatrixXd::Zero(K, K);
    init.emi_abs2 = Eigen::VectorXd::Zero(K);
    init.power = Eigen::VectorXd::Zero(M);

    const auto parts = run_batches<Acc>(trials, opts, init, [&](std::uint64_t t, Acc& acc) {
        const auto r = sample_realization(s.lsf, s.panels, s.N, seed, drop, t);
        const auto e = estimate(r, est, s, seed, drop, t);

        for (Eigen::Index k = 0; k < K; ++k)
            for (Eigen::Index kp = 0; kp < K; ++kp) {
                cplx z = 0.0;
                for (Eigen::Index m = 0; m < M; ++m)
                    z += sqrt_eta(m, kp) * e.at(m, kp).dot(r.g(m, k));
                acc.z_abs2(k, kp) += std::norm(z);
                if (kp == k)
                    acc.z_own(k) += z;
            }
        if (ds_mode == DsEstimator::noise_conditioned) {
            const auto e0 = estimate(r, est, s, seed, drop, t, true);
            for (Eigen::Index k = 0; k < K; ++k)
                for (Eigen::Index m = 0; m < M; ++m)
                    acc.z_mean(k) += sqrt_eta(m, k) * e0.at(m, k).dot(r.g(m, k));
        }

        Stream emi_rng(seed, StreamTag::downlink_emi, {drop, t});
        Eigen::VectorXcd emi = Eigen::VectorXcd::Zero(K);
        for (Eigen::Index j = 0; j < s.J; ++j) {
            const RisPanel& p = s.panels[j];
            const Eigen::VectorXcd n = sample_emi(p, emi_rng);
            const Eigen::VectorXcd reflected = p.reflection().cwiseProduct(n);
            for (Eigen::Index k = 0; k < K; ++k)
                emi(k) += r.g_user_ris(k, j).cwiseProduct(reflected).sum();
        }
        acc.emi_abs2 += emi.cwiseAbs2();

        Stream sym(seed, StreamTag::downlink_symbols, {drop, t});
        const Eigen::VectorXcd q = sym.cnormal_vector(K);
        for (Eigen::Index m = 0; m < M; ++m) {
            Eigen::VectorXcd x = Eigen::VectorXcd::Zero(s.N);
            for (Eigen::Index k = 0; k < K; ++k)
                x += (sqrt_eta(m, k) * q(k)) * e.at(m, k).conjugate();
            acc.power(m) += x.squaredNorm();
        }
        acc.n += 1;
    });

    const double pl = est.prelog(s.tau_c);
    auto assemble = [&](const Acc& a) {
        SeReport rep;
        rep.mode = SeMode::monte_carlo;
        rep.prelog = pl;
        for (Eigen::Index k = 0; k < K; ++k) {
            UserSe u;
            u.ds_sample = alloc.rho_d * std::norm(a.z_own(k) / a.n);
            u.ds = ds_mode == DsEstimator::noise_conditioned ? alloc.rho_d * std::norm(a.z_mean(k) / a.n) : u.ds_sample;
            u.interference = alloc.rho_d * a.z_abs2.row(k).sum() / a.n - u.ds;
            u.emi = a.emi_abs2(k) / a.n;
            u.sinr = sinr_from_terms(u.ds, u.interference, u.emi);
            u.se = pl * std::log2(1.0 + u.sinr);
            rep.users.push_back(u);
        }
        rep.sum_se = se_sum(rep);
        rep.full_power.resize(static_cast<std::size_t>(M));
        for (Eigen::Index m = 0; m < M; ++m)
            rep.full_power[m] = a.power(m) / a.n;
        return rep;
    };

    auto combine = [](Acc& into, const Acc& p, double sign) {
        into.n += sign * p.n;
        into.z_own += sign * p.z_own;
        into.z_mean += sign * p.z_mean;
        into.z_abs2 += sign * p.z_abs2;
        into.emi_abs2 += sign * p.emi_abs2;
        into.power += sign * p.power;
    };
    Acc tot = init;
    for (const auto& p : parts)
        combine(tot, p, 1.0);
    SeReport rep = assemble(tot);

    // Delete-one-batch jackknife; each replicate is evaluated near full sample size.
    if (parts.size() > 1) {
        const double B = static_cast<double>(parts.size());
        std::vector<SeReport> reps;
        reps.reserve(parts.size());
        for (const auto& p : parts) {
            Acc rest = tot;
            combine(rest, p, -1.0);
            reps.push_back(assemble(rest));
        }
        auto jackknife = [&](auto&& get) {
            double mean = 0.0;
            for (const auto& r : reps)
                mean += get(r);
            mean /= B;
            double var = 0.0;
            for (const auto& r : reps)
                var += (get(r) - mean) * (get(r) - mean);
            return std::sqrt(var * (B - 1.0) / B);
        };
        rep.sum_se_stderr = jackknife([](const SeReport& r) { return r.sum_se; });
        for (Eigen::Index k = 0; k < K; ++k)
            rep.users[k].sinr_stderr = jackknife([k](const SeReport& r) { return r.users[k].sinr; });
    }
    return rep;
}

} // namespace riscf
