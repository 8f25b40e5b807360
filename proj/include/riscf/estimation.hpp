#pragma once

#include "riscf/channel.hpp"
#include "riscf/parallel.hpp"
#include "riscf/rng.hpp"
#include "riscf/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <optional>
#include <vector>

namespace riscf {

enum class Scheme { two_phase, benchmark };
enum class PowerControl { fractional, equal };
/// How the direct-channel pilot contribution is removed before the cascaded sub-phase.
enum class Subtraction { ideal, estimated };

inline const char* to_string(Scheme s) { return s == Scheme::two_phase ? "two_phase" : "benchmark"; }
inline const char* to_string(PowerControl p) { return p == PowerControl::fractional ? "fractional" : "equal"; }
inline const char* to_string(Subtraction s) { return s == Subtraction::ideal ? "ideal" : "estimated"; }

/// Data-phase fraction of the coherence interval.
inline double prelog(Scheme scheme, int tau_c, int tau_p)
{
    const int overhead = scheme == Scheme::two_phase ? 2 * tau_p : tau_p;
    if (tau_p < 1 || overhead >= tau_c)
        throw std::invalid_argument("prelog: pilots must leave room for data");
    return static_cast<double>(tau_c - overhead) / static_cast<double>(tau_c);
}

/// Pilot assignment and powers of one sub-phase.
struct SubPhasePlan {
    std::vector<int> pilot;                 // t_k in [0, tau_p)
    std::vector<double> power_w;            // p_k
    std::vector<double> snr;                // rho_k = p_k / sigma^2
    std::vector<std::vector<int>> copilots; // P_k, always contains k

    bool shares(Eigen::Index k, Eigen::Index kp) const { return pilot[k] == pilot[kp]; }
};

struct PilotPlan {
    int tau_p = 1;
    SubPhasePlan direct;
    SubPhasePlan cascaded;
};

/// p_k = (sum_m delta_mk) / (sum_k' sum_m delta_mk') * K p_p.
inline std::vector<double> fractional_pilot_power(const Eigen::MatrixXd& delta, double pilot_power_w)
{
    const Eigen::VectorXd col = delta.colwise().sum().transpose();
    const double total = col.sum();
    for (Eigen::Index k = 0; k < col.size(); ++k)
        if (!(col(k) > 0.0) || !std::isfinite(col(k)))
            throw std::invalid_argument("fractional_pilot_power: user " + std::to_string(k)
                                        + " has no positive large-scale gain");
    const double budget = static_cast<double>(delta.cols()) * pilot_power_w;
    std::vector<double> p(static_cast<std::size_t>(col.size()));
    for (Eigen::Index k = 0; k < col.size(); ++k)
        p[k] = col(k) / total * budget;
    return p;
}

/// Greedy pilot assignment in user-index order.
///
/// Users k < tau_p take pilot k. Each later user picks the pilot whose
/// current holders put the least rho_i delta_{m_k, i} on the user's prime AP
/// (the AP with the largest delta_mk); ties go to the lowest pilot index.
inline std::vector<int> assign_pilots(const Eigen::MatrixXd& delta, const std::vector<double>& snr, int tau_p)
{
    if (tau_p < 1)
        throw std::invalid_argument("assign_pilots: tau_p must be at least 1");
    const Eigen::Index K = delta.cols();
    if (static_cast<Eigen::Index>(snr.size()) != K)
        throw std::invalid_argument("assign_pilots: one SNR per user required");

    std::vector<int> pilot(static_cast<std::size_t>(K), 0);
    std::vector<std::vector<int>> pool(static_cast<std::size_t>(tau_p));
    for (Eigen::Index k = 0; k < K; ++k) {
        if (k < tau_p) {
            pilot[k] = static_cast<int>(k);
            pool[k].push_back(static_cast<int>(k));
            continue;
        }
        Eigen::Index prime = 0;
        delta.col(k).maxCoeff(&prime);
        int best = 0;
        double best_load = std::numeric_limits<double>::infinity();
        for (int t = 0; t < tau_p; ++t) {
            double load = 0.0;
            for (int i : pool[t])
                load += snr[i] * delta(prime, i);
            if (load < best_load) {
                best_load = load;
                best = t;
            }
        }
        pilot[k] = best;
        pool[best].push_back(static_cast<int>(k));
    }
    return pilot;
}

inline std::vector<std::vector<int>> copilot_sets(const std::vector<int>& pilot)
{
    std::vector<std::vector<int>> sets(pilot.size());
    for (std::size_t k = 0; k < pilot.size(); ++k)
        for (std::size_t a = 0; a < pilot.size(); ++a)
            if (pilot[a] == pilot[k])
                sets[k].push_back(static_cast<int>(a));
    return sets;
}

inline SubPhasePlan make_sub_phase(std::vector<int> pilot, std::vector<double> power_w, double noise_w)
{
    SubPhasePlan p;
    p.copilots = copilot_sets(pilot);
    p.pilot = std::move(pilot);
    p.power_w = std::move(power_w);
    for (double w : p.power_w)
        p.snr.push_back(w / noise_w);
    return p;
}

/// Sub-phase plan: powers (fractional or equal) then greedy assignment on delta.
inline SubPhasePlan plan_sub_phase(const Eigen::MatrixXd& delta, double pilot_power_w, double noise_w, int tau_p,
                                   PowerControl pc)
{
    std::vector<double> power = pc == PowerControl::fractional
        ? fractional_pilot_power(delta, pilot_power_w)
        : std::vector<double>(static_cast<std::size_t>(delta.cols()), pilot_power_w);
    std::vector<double> snr;
    for (double w : power)
        snr.push_back(w / noise_w);
    return make_sub_phase(assign_pilots(delta, snr, tau_p), std::move(power), noise_w);
}

/// Two-phase plan. Without any cascaded gain (no RIS, or dark RISs) the second
/// sub-phase carries no information; it then reuses the first sub-phase
/// assignment at equal power and its LMMSE weights are zero.
inline PilotPlan plan_two_phase(const Scenario& s, PowerControl pc = PowerControl::fractional)
{
    PilotPlan plan;
    plan.tau_p = s.tau_p;
    plan.direct = plan_sub_phase(s.direct_gain(), s.pilot_power_w, s.noise_w, s.tau_p, pc);
    const Eigen::MatrixXd dc = s.cascade_gain();
    if (dc.size() > 0 && (dc.colwise().sum().array() > 0.0).all())
        plan.cascaded = plan_sub_phase(dc, s.pilot_power_w, s.noise_w, s.tau_p, pc);
    else
        plan.cascaded = make_sub_phase(plan.direct.pilot,
                                       std::vector<double>(static_cast<std::size_t>(s.K), s.pilot_power_w), s.noise_w);
    return plan;
}

/// Single-phase plan: equal power, greedy assignment on the aggregate delta.
/// Both sub-phase slots hold the same plan.
inline PilotPlan plan_benchmark(const Scenario& s)
{
    PilotPlan plan;
    plan.tau_p = s.tau_p;
    const Eigen::MatrixXd delta = s.direct_gain() + s.cascade_gain();
    plan.direct = plan_sub_phase(delta, s.pilot_power_w, s.noise_w, s.tau_p, PowerControl::equal);
    plan.cascaded = plan.direct;
    return plan;
}

/// LMMSE weights and the second-order statistics they imply.
struct EstimatorState {
    Eigen::MatrixXd c_d;     // first sub-phase weight (benchmark: the single weight)
    Eigen::MatrixXd c_c;     // second sub-phase weight (benchmark: same as c_d)
    Eigen::MatrixXd delta_d; // beta^d
    Eigen::MatrixXd delta_c; // sum_j beta_mj beta_kj tr(T_j)
    Eigen::MatrixXd delta;   // E||g_mk||^2 / N
    Eigen::MatrixXd lambda;  // E||g_hat_mk||^2 / N
};

/// Two-phase LMMSE weights.
inline EstimatorState lmmse_coefficients(const PilotPlan& plan, const Scenario& s)
{
    const double tau = plan.tau_p;
    EstimatorState st;
    st.delta_d = s.direct_gain();
    st.delta_c = s.cascade_gain();
    st.delta = st.delta_d + st.delta_c;
    st.c_d.resize(s.M, s.K);
    st.c_c.resize(s.M, s.K);
    st.lambda.resize(s.M, s.K);
    for (Eigen::Index m = 0; m < s.M; ++m) {
        const double emi = s.emi_at_ap(m);
        for (Eigen::Index k = 0; k < s.K; ++k) {
            double den_d = 1.0;
            for (int a : plan.direct.copilots[k])
                den_d += tau * plan.direct.snr[a] * st.delta_d(m, a);
            double den_c = emi + 1.0;
            for (int a : plan.cascaded.copilots[k])
                den_c += tau * plan.cascaded.snr[a] * st.delta_c(m, a);
            const double gd = std::sqrt(tau * plan.direct.snr[k]);
            const double gc = std::sqrt(tau * plan.cascaded.snr[k]);
            st.c_d(m, k) = gd * st.delta_d(m, k) / den_d;
            st.c_c(m, k) = gc * st.delta_c(m, k) / den_c;
            st.lambda(m, k) = gd * st.c_d(m, k) * st.delta_d(m, k) + gc * st.c_c(m, k) * st.delta_c(m, k);
        }
    }
    return st;
}

/// Single-phase LMMSE on the aggregate channel with the RISs on.
inline EstimatorState benchmark_coefficients(const PilotPlan& plan, const Scenario& s)
{
    const double tau = plan.tau_p;
    EstimatorState st;
    st.delta_d = s.direct_gain();
    st.delta_c = s.cascade_gain();
    st.delta = st.delta_d + st.delta_c;
    st.c_d.resize(s.M, s.K);
    st.lambda.resize(s.M, s.K);
    for (Eigen::Index m = 0; m < s.M; ++m) {
        const double emi = s.emi_at_ap(m);
        for (Eigen::Index k = 0; k < s.K; ++k) {
            double den = emi + 1.0;
            for (int a : plan.direct.copilots[k])
                den += tau * plan.direct.snr[a] * st.delta(m, a);
            const double g = std::sqrt(tau * plan.direct.snr[k]);
            st.c_d(m, k) = g * st.delta(m, k) / den;
            st.lambda(m, k) = g * st.c_d(m, k) * st.delta(m, k);
        }
    }
    st.c_c = st.c_d;
    return st;
}

/// A configured estimator for one drop.
struct Estimator {
    Scheme scheme = Scheme::two_phase;
    Subtraction subtraction = Subtraction::ideal;
    PilotPlan plan;
    EstimatorState state;

    double prelog(int tau_c) const { return riscf::prelog(scheme, tau_c, plan.tau_p); }
};

inline Estimator make_estimator(const Scenario& s, Scheme scheme, PowerControl pc = PowerControl::fractional,
                                Subtraction sub = Subtraction::ideal)
{
    s.validate();
    Estimator e;
    e.scheme = scheme;
    e.subtraction = sub;
    if (scheme == Scheme::two_phase) {
        e.plan = plan_two_phase(s, pc);
        e.state = lmmse_coefficients(e.plan, s);
    } else {
        e.plan = plan_benchmark(s);
        e.state = benchmark_coefficients(e.plan, s);
    }
    return e;
}

/// (sum delta - sum lambda) / sum delta.
inline double nmse_closed_form(const EstimatorState& st)
{
    const double tol = 1e-12;
    if (((st.lambda.array() - st.delta.array()) > tol * st.delta.array().abs()).any())
        throw std::logic_error("nmse_closed_form: lambda exceeds delta; estimator statistics are inconsistent");
    const double total = st.delta.sum();
    if (!(total > 0.0))
        throw std::invalid_argument("nmse_closed_form: zero channel energy");
    return (total - st.lambda.sum()) / total;
}

/// Estimates plus the pilot projections they came from, flattened [m*K + k].
struct EstimateSet {
    Eigen::Index M = 0, K = 0;
    std::vector<Eigen::VectorXcd> g_hat;
    std::vector<Eigen::VectorXcd> y_d;
    std::vector<Eigen::VectorXcd> y_c; // empty for the benchmark

    const Eigen::VectorXcd& at(Eigen::Index m, Eigen::Index k) const { return g_hat[m * K + k]; }
};

namespace detail {

/// Per-pilot EMI as seen by each AP: sum_j G_mj Theta_j N_j phi_t, flattened [m*tau_p + t].
inline std::vector<Eigen::VectorXcd> pilot_emi(const ChannelRealization& r, const Scenario& s, int tau_p,
                                               std::optional<Stream>& rng)
{
    std::vector<Eigen::VectorXcd> out(static_cast<std::size_t>(s.M * tau_p), Eigen::VectorXcd::Zero(s.N));
    if (!rng)
        return out;
    for (Eigen::Index j = 0; j < s.J; ++j) {
        const RisPanel& p = s.panels[j];
        const double scale = std::sqrt(p.area() * p.emi_power());
        for (int t = 0; t < tau_p; ++t) {
            const Eigen::VectorXcd w = rng->cnormal_vector(p.elements());
            if (scale == 0.0)
                continue;
            // R^{1/2} Theta n with n = scale R^{1/2} w.
            const Eigen::VectorXcd pre = scale * (p.mixing() * w);
            for (Eigen::Index m = 0; m < s.M; ++m)
                out[m * tau_p + t] += r.g_ap_ris(m, j).apply_presqrt(pre);
        }
    }
    return out;
}

/// sqrt(tau) sum_{a on pilot t} sqrt(rho_a) x_ma + noise, flattened [m*tau_p + t].
template <class Channel>
std::vector<Eigen::VectorXcd> received_pilots(const Scenario& s, const SubPhasePlan& plan, int tau_p, Channel&& channel,
                                              std::optional<Stream>& noise)
{
    const double st = std::sqrt(static_cast<double>(tau_p));
    std::vector<Eigen::VectorXcd> Y(static_cast<std::size_t>(s.M * tau_p));
    for (Eigen::Index m = 0; m < s.M; ++m)
        for (int t = 0; t < tau_p; ++t)
            Y[m * tau_p + t] = noise ? noise->cnormal_vector(s.N) : Eigen::VectorXcd::Zero(s.N);
    for (Eigen::Index m = 0; m < s.M; ++m)
        for (Eigen::Index a = 0; a < s.K; ++a)
            Y[m * tau_p + plan.pilot[a]] += (st * std::sqrt(plan.snr[a])) * channel(m, a);
    return Y;
}

/// Pilot noise and EMI streams for one trial; none when estimating noise-free.
inline std::optional<Stream> pilot_stream(std::uint64_t seed, StreamTag tag, std::uint64_t drop, std::uint64_t trial,
                                          bool noiseless)
{
    if (noiseless)
        return std::nullopt;
    return Stream(seed, tag, {drop, trial});
}

} // namespace detail

/// Two-phase estimation for one realization: RIS off (direct sub-phase), then
/// RIS on with EMI and the direct contribution removed (cascaded sub-phase).
inline EstimateSet estimate_two_phase(const ChannelRealization& r, const Estimator& est, const Scenario& s,
                                      std::uint64_t seed, std::uint64_t drop, std::uint64_t trial,
                                      bool noiseless = false)
{
    if (r.M != s.M || r.K != s.K || r.N != s.N || r.J != s.J)
        throw std::invalid_argument("estimate_two_phase: realization does not match scenario");
    const int tau_p = est.plan.tau_p;
    const auto& pd = est.plan.direct;
    const auto& pc = est.plan.cascaded;
    const auto& st = est.state;

    auto noise = detail::pilot_stream(seed, StreamTag::pilot_noise, drop, trial, noiseless);
    auto emi = detail::pilot_stream(seed, StreamTag::pilot_emi, drop, trial, noiseless);

    const auto Yd = detail::received_pilots(s, pd, tau_p, [&](Eigen::Index m, Eigen::Index a) -> const Eigen::VectorXcd& {
        return r.g_direct(m, a);
    }, noise);

    EstimateSet out;
    out.M = s.M;
    out.K = s.K;
    out.y_d.resize(static_cast<std::size_t>(s.M * s.K));
    out.y_c.resize(static_cast<std::size_t>(s.M * s.K));
    out.g_hat.resize(static_cast<std::size_t>(s.M * s.K));
    for (Eigen::Index m = 0; m < s.M; ++m)
        for (Eigen::Index k = 0; k < s.K; ++k)
            out.y_d[m * s.K + k] = Yd[m * tau_p + pd.pilot[k]];

    std::vector<Eigen::VectorXcd> residual; // g^d - g_hat^d, estimated-subtraction mode only
    if (est.subtraction == Subtraction::estimated) {
        residual.resize(static_cast<std::size_t>(s.M * s.K));
        for (Eigen::Index m = 0; m < s.M; ++m)
            for (Eigen::Index k = 0; k < s.K; ++k)
                residual[m * s.K + k] = r.g_direct(m, k) - st.c_d(m, k) * out.y_d[m * s.K + k];
    }

    auto Yc = detail::received_pilots(s, pc, tau_p, [&](Eigen::Index m, Eigen::Index a) -> Eigen::VectorXcd {
        if (est.subtraction == Subtraction::estimated)
            return r.g_cascaded(m, a) + residual[m * s.K + a];
        return r.g_cascaded(m, a);
    }, noise);
    const auto E = detail::pilot_emi(r, s, tau_p, emi);
    for (std::size_t i = 0; i < Yc.size(); ++i)
        Yc[i] += E[i];

    for (Eigen::Index m = 0; m < s.M; ++m)
        for (Eigen::Index k = 0; k < s.K; ++k) {
            const auto i = m * s.K + k;
            out.y_c[i] = Yc[m * tau_p + pc.pilot[k]];
            out.g_hat[i] = st.c_d(m, k) * out.y_d[i] + st.c_c(m, k) * out.y_c[i];
        }
    return out;
}

/// Single-phase LMMSE: one pilot block with the RISs on and EMI present.
inline EstimateSet estimate_benchmark(const ChannelRealization& r, const Estimator& est, const Scenario& s,
                                      std::uint64_t seed, std::uint64_t drop, std::uint64_t trial,
                                      bool noiseless = false)
{
    if (r.M != s.M || r.K != s.K || r.N != s.N || r.J != s.J)
        throw std::invalid_argument("estimate_benchmark: realization does not match scenario");
    const int tau_p = est.plan.tau_p;
    const auto& plan = est.plan.direct;

    auto noise = detail::pilot_stream(seed, StreamTag::pilot_noise, drop, trial, noiseless);
    auto emi = detail::pilot_stream(seed, StreamTag::pilot_emi, drop, trial, noiseless);
    auto Y = detail::received_pilots(s, plan, tau_p, [&](Eigen::Index m, Eigen::Index a) -> const Eigen::VectorXcd& {
        return r.g(m, a);
    }, noise);
    const auto E = detail::pilot_emi(r, s, tau_p, emi);
    for (std::size_t i = 0; i < Y.size(); ++i)
        Y[i] += E[i];

    EstimateSet out;
    out.M = s.M;
    out.K = s.K;
    out.y_d.resize(static_cast<std::size_t>(s.M * s.K));
    out.g_hat.resize(static_cast<std::size_t>(s.M * s.K));
    for (Eigen::Index m = 0; m < s.M; ++m)
        for (Eigen::Index k = 0; k < s.K; ++k) {
            const auto i = m * s.K + k;
            out.y_d[i] = Y[m * tau_p + plan.pilot[k]];
            out.g_hat[i] = est.state.c_d(m, k) * out.y_d[i];
        }
    return out;
}

/// `noiseless` drops pilot noise and EMI. Every estimate is linear in both,
/// so this gives E{g_hat | channels}.
inline EstimateSet estimate(const ChannelRealization& r, const Estimator& est, const Scenario& s, std::uint64_t seed,
                            std::uint64_t drop, std::uint64_t trial, bool noiseless = false)
{
    return est.scheme == Scheme::two_phase ? estimate_two_phase(r, est, s, seed, drop, trial, noiseless)
                                           : estimate_benchmark(r, est, s, seed, drop, trial, noiseless);
}

/// Monte Carlo value with its standard error.
struct McEstimate {
    double value = std::numeric_limits<double>::quiet_NaN();
    double stderr_ = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t trials = 0;
};

/// Ratio estimator sum ||g - g_hat||^2 / sum ||g||^2 over independent trials.
inline McEstimate nmse_empirical(const Scenario& s, const Estimator& est, std::uint64_t trials, std::uint64_t seed,
                                 std::uint64_t drop = 0, const RunOptions& opts = {})
{
    if (trials < 1)
        throw std::invalid_argument("nmse_empirical: need at least one trial");
    struct Acc {
        double n = 0, se = 0, sg = 0, see = 0, sgg = 0, seg = 0;
    };
    const auto parts = run_batches<Acc>(trials, opts, Acc{}, [&](std::uint64_t t, Acc& acc) {
        const auto r = sample_realization(s.lsf, s.panels, s.N, seed, drop, t);
        const auto e = estimate(r, est, s, seed, drop, t);
        double err = 0.0, energy = 0.0;
        for (std::size_t i = 0; i < e.g_hat.size(); ++i) {
            err += (r.aggregate[i] - e.g_hat[i]).squaredNorm();
            energy += r.aggregate[i].squaredNorm();
        }
        acc.n += 1;
        acc.se += err;
        acc.sg += energy;
        acc.see += err * err;
        acc.sgg += energy * energy;
        acc.seg += err * energy;
    });
    Acc tot;
    for (const auto& p : parts) {
        tot.n += p.n;
        tot.se += p.se;
        tot.sg += p.sg;
        tot.see += p.see;
        tot.sgg += p.sgg;
        tot.seg += p.seg;
    }
    McEstimate out;
    out.trials = trials;
    out.value = tot.se / tot.sg;
    const double n = tot.n;
    const double me = tot.se / n, mg = tot.sg / n;
    if (n > 1) {
        const double ve = (tot.see - n * me * me) / (n - 1);
        const double vg = (tot.sgg - n * mg * mg) / (n - 1);
        const double ceg = (tot.seg - n * me * mg) / (n - 1);
        const double R = out.value;
        const double var = (ve - 2.0 * R * ceg + R * R * vg) / (mg * mg * n);
        out.stderr_ = std::sqrt(std::max(var, 0.0));
    }
    return out;
}

/// Per-link sample moments of the estimator, each normalized by N.
struct EstimatorMoments {
    Eigen::MatrixXd estimate_energy;     // mean ||g_hat||^2 / N
    Eigen::MatrixXd cross;               // mean Re{g_hat^H g} / N
    Eigen::MatrixXd orthogonality;       // mean Re{g_hat^H (g - g_hat)} / N
    Eigen::MatrixXd orthogonality_stderr;
    std::uint64_t trials = 0;
};

inline EstimatorMoments estimator_moments(const Scenario& s, const Estimator& est, std::uint64_t trials,
                                          std::uint64_t seed, std::uint64_t drop = 0, const RunOptions& opts = {})
{
    if (trials < 2)
        throw std::invalid_argument("estimator_moments: need at least two trials");
    struct Acc {
        Eigen::MatrixXd energy, cross, orth, orth2;
    };
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(s.M, s.K);
    const auto parts = run_batches<Acc>(trials, opts, Acc{zero, zero, zero, zero}, [&](std::uint64_t t, Acc& acc) {
        const auto r = sample_realization(s.lsf, s.panels, s.N, seed, drop, t);
        const auto e = estimate(r, est, s, seed, drop, t);
        for (Eigen::Index m = 0; m < s.M; ++m)
            for (Eigen::Index k = 0; k < s.K; ++k) {
                const auto& gh = e.at(m, k);
                const auto& g = r.g(m, k);
                const double energy = gh.squaredNorm();
                const double cross = gh.dot(g).real();
                acc.energy(m, k) += energy;
                acc.cross(m, k) += cross;
                acc.orth(m, k) += cross - energy;
                acc.orth2(m, k) += (cross - energy) * (cross - energy);
            }
    });
    Acc tot{zero, zero, zero, zero};
    for (const auto& p : parts) {
        tot.energy += p.energy;
        tot.cross += p.cross;
        tot.orth += p.orth;
        tot.orth2 += p.orth2;
    }
    const double n = static_cast<double>(trials);
    const double N = static_cast<double>(s.N);
    EstimatorMoments out;
    out.trials = trials;
    out.estimate_energy = tot.energy / (n * N);
    out.cross = tot.cross / (n * N);
    out.orthogonality = tot.orth / (n * N);
    const Eigen::ArrayXXd mean = (tot.orth / n).array();
    const Eigen::ArrayXXd var = ((tot.orth2 / n).array() - mean.square()).max(0.0) * (n / (n - 1.0));
    out.orthogonality_stderr = ((var / n).sqrt() / N).matrix();
    return out;
}

} // namespace riscf
