#pragma once

#include "riscf/channel.hpp"
#include "riscf/downlink.hpp"
#include "riscf/estimation.hpp"
#include "riscf/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace riscf {

/// Scheme as plotted: estimator plus which impairments are present.
enum class Variant { two_phase, benchmark, two_phase_no_emi, benchmark_no_emi, ris_free };

inline const char* to_string(Variant v)
{
    switch (v) {
    case Variant::two_phase: return "two_phase";
    case Variant::benchmark: return "benchmark";
    case Variant::two_phase_no_emi: return "two_phase_no_emi";
    case Variant::benchmark_no_emi: return "benchmark_no_emi";
    case Variant::ris_free: return "ris_free";
    }
    return "?";
}

inline const std::vector<Variant>& all_variants()
{
    static const std::vector<Variant> v{Variant::two_phase, Variant::benchmark, Variant::two_phase_no_emi,
                                        Variant::benchmark_no_emi, Variant::ris_free};
    return v;
}

/// Accepts a variant name or "all".
inline std::vector<Variant> parse_variants(const std::string& name)
{
    if (name == "all")
        return all_variants();
    for (Variant v : all_variants())
        if (name == to_string(v))
            return {v};
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

inline PowerControl parse_power_control(const std::string& s)
{
    if (s == "fractional")
        return PowerControl::fractional;
    if (s == "equal")
        return PowerControl::equal;
    throw std::invalid_argument("unknown power_control '" + s + "'");
}

inline Subtraction parse_subtraction(const std::string& s)
{
    if (s == "ideal")
        return Subtraction::ideal;
    if (s == "estimated")
        return Subtraction::estimated;
    throw std::invalid_argument("unknown subtraction '" + s + "'");
}

inline UiExpansion parse_ui_expansion(const std::string& s)
{
    if (s == "exact")
        return UiExpansion::exact;
    if (s == "gaussian_cascade")
        return UiExpansion::gaussian_cascade;
    throw std::invalid_argument("unknown ui_expansion '" + s + "'");
}

inline Scheme variant_scheme(Variant v)
{
    return v == Variant::two_phase || v == Variant::two_phase_no_emi ? Scheme::two_phase : Scheme::benchmark;
}

inline Scenario variant_scenario(const Scenario& s, Variant v)
{
    switch (v) {
    case Variant::two_phase_no_emi:
    case Variant::benchmark_no_emi: return s.without_emi();
    case Variant::ris_free: return s.without_ris();
    default: return s;
    }
}

enum class Metric { nmse, sum_se };

inline const char* to_string(Metric m) { return m == Metric::nmse ? "nmse" : "sum_se"; }

inline Metric parse_metric(const std::string& s)
{
    if (s == "nmse")
        return Metric::nmse;
    if (s == "sum_se")
        return Metric::sum_se;
    throw std::invalid_argument("unknown metric '" + s + "'");
}

/// Full run description. `sweep_param` empty means a single point.
struct ExperimentConfig {
    ScenarioConfig scenario;
    std::vector<Variant> variants = all_variants();
    PowerControl power_control = PowerControl::fractional;
    Subtraction subtraction = Subtraction::ideal;
    UiExpansion ui_expansion = UiExpansion::exact;
    std::uint64_t trials = 500;
    std::uint64_t drops = 20;
    RunOptions run;
    std::string sweep_param;
    std::vector<double> sweep_values;
    std::vector<Metric> metrics{Metric::nmse, Metric::sum_se};
};

inline const std::vector<std::string>& sweep_parameters()
{
    static const std::vector<std::string> p{"p_p_dbm", "m_aps", "j_ris", "n_antennas", "k_users", "rho_db", "l_side"};
    return p;
}

/// Sets one swept parameter. Integer parameters must be given as whole numbers.
inline void apply_sweep_value(ScenarioConfig& cfg, const std::string& param, double value)
{
    auto whole = [&] {
        if (value != std::floor(value))
            throw std::invalid_argument("sweep value for " + param + " must be an integer");
        return static_cast<int>(value);
    };
    if (param == "p_p_dbm")
        cfg.pilot_dbm = value;
    else if (param == "m_aps")
        cfg.m_aps = whole();
    else if (param == "j_ris")
        cfg.j_ris = whole();
    else if (param == "n_antennas")
        cfg.n_antennas = whole();
    else if (param == "k_users")
        cfg.k_users = whole();
    else if (param == "rho_db")
        cfg.panel.rho_db = value;
    else if (param == "l_side")
        cfg.panel.l_v = cfg.panel.l_h = whole();
    else
        throw std::invalid_argument("unknown sweep parameter '" + param + "'");
}

namespace detail {

template <class T>
T json_get(const nlohmann::json& j, const std::string& key)
{
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
}

} // namespace detail

/// Reads a JSON object; unknown keys are rejected so typos do not pass silently.
inline ExperimentConfig parse_config(const nlohmann::json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("config must be a JSON object");
    ExperimentConfig c;
    auto& s = c.scenario;
    for (const auto& [key, v] : j.items()) {
        using detail::json_get;
        if (key == "m_aps") s.m_aps = json_get<int>(v, key);
        else if (key == "k_users") s.k_users = json_get<int>(v, key);
        else if (key == "j_ris") s.j_ris = json_get<int>(v, key);
        else if (key == "n_antennas") s.n_antennas = json_get<int>(v, key);
        else if (key == "tau_p") s.tau_p = json_get<int>(v, key);
        else if (key == "d_km") s.d_km = json_get<double>(v, key);
        else if (key == "carrier_mhz") s.radio.carrier_mhz = json_get<double>(v, key);
        else if (key == "noise_dbm") s.radio.noise_dbm = json_get<double>(v, key);
        else if (key == "d0_m") s.radio.d0_m = json_get<double>(v, key);
        else if (key == "d1_m") s.radio.d1_m = json_get<double>(v, key);
        else if (key == "shadow_db") s.radio.shadow_db = json_get<double>(v, key);
        else if (key == "tau_c") s.radio.tau_c = json_get<int>(v, key);
        else if (key == "seed") s.seed = json_get<std::uint64_t>(v, key);
        else if (key == "l_v") s.panel.l_v = json_get<int>(v, key);
        else if (key == "l_h") s.panel.l_h = json_get<int>(v, key);
        else if (key == "spacing_over_lambda") s.panel.spacing_over_lambda = json_get<double>(v, key);
        else if (key == "phase_rad") s.panel.phase_rad = json_get<double>(v, key);
        else if (key == "amplitude") s.panel.amplitude = json_get<double>(v, key);
        else if (key == "rho_db") s.panel.rho_db = json_get<double>(v, key);
        else if (key == "pilot_dbm") s.pilot_dbm = json_get<double>(v, key);
        else if (key == "downlink_dbm") s.downlink_dbm = json_get<double>(v, key);
        else if (key == "ris_link_gain_db") s.ris_link_gain_db = json_get<double>(v, key);
        else if (key == "scheme") {
            if (v.is_array()) {
                c.variants.clear();
                for (const auto& e : v)
                    for (Variant x : parse_variants(json_get<std::string>(e, key)))
                        c.variants.push_back(x);
            } else {
                c.variants = parse_variants(json_get<std::string>(v, key));
            }
        }
        else if (key == "power_control") c.power_control = parse_power_control(json_get<std::string>(v, key));
        else if (key == "subtraction") c.subtraction = parse_subtraction(json_get<std::string>(v, key));
        else if (key == "ui_expansion") c.ui_expansion = parse_ui_expansion(json_get<std::string>(v, key));
        else if (key == "trials") c.trials = json_get<std::uint64_t>(v, key);
        else if (key == "drops") c.drops = json_get<std::uint64_t>(v, key);
        else if (key == "threads") c.run.threads = json_get<unsigned>(v, key);
        else if (key == "sweep_param") c.sweep_param = json_get<std::string>(v, key);
        else if (key == "sweep_values") c.sweep_values = json_get<std::vector<double>>(v, key);
        else if (key == "metric") {
            c.metrics.clear();
            if (v.is_array()) {
                for (const auto& e : v)
                    c.metrics.push_back(parse_metric(json_get<std::string>(e, key)));
            } else {
                c.metrics.push_back(parse_metric(json_get<std::string>(v, key)));
            }
        }
        else
            throw std::invalid_argument("unknown config key '" + key + "'");
    }
    if (c.variants.empty())
        throw std::invalid_argument("config: no scheme selected");
    if (c.metrics.empty())
        throw std::invalid_argument("config: no metric selected");
    if (c.drops < 1)
        throw std::invalid_argument("config: drops must be at least 1");
    if (!c.sweep_param.empty() && c.sweep_values.empty())
        throw std::invalid_argument("config: sweep_param given without sweep_values");
    if (c.sweep_param.empty() && !c.sweep_values.empty())
        throw std::invalid_argument("config: sweep_values given without sweep_param");
    c.scenario.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config '" + path + "': " + e.what());
    }
    return parse_config(j);
}

/// One (value, variant, metric) cell of a sweep, averaged over drops.
struct PointResult {
    std::string sweep_param;
    double value = 0.0;
    Variant variant = Variant::two_phase;
    Metric metric = Metric::nmse;
    double closed_form = 0.0;
    double closed_form_drop_stderr = std::numeric_limits<double>::quiet_NaN(); // spread across drops
    double monte_carlo = std::numeric_limits<double>::quiet_NaN();
    double mc_stderr = std::numeric_limits<double>::quiet_NaN();                // trial-level sampling error
    std::uint64_t trials = 0;
    std::uint64_t drops = 0;
    std::uint64_t seed = 0;
    double wall_s = 0.0;
    bool under_sampled = false;
    std::vector<double> per_drop_closed_form;
};

struct SweepResult {
    std::vector<PointResult> points;

    const PointResult& at(double value, Variant v, Metric m) const
    {
        for (const auto& p : points)
            if (p.value == value && p.variant == v && p.metric == m)
                return p;
        throw std::out_of_range("sweep result has no such point");
    }
};

struct DropMetrics {
    double nmse_cf = 0.0, nmse_mc = 0.0, nmse_se = 0.0;
    double se_cf = 0.0, se_mc = 0.0, se_se = 0.0;
};

/// Closed form and (if trials > 0) Monte Carlo metrics of one variant on one drop.
inline DropMetrics evaluate_drop(const Scenario& base, Variant v, const ExperimentConfig& cfg, std::uint64_t drop,
                                 bool want_nmse, bool want_se)
{
    const Scenario s = variant_scenario(base, v);
    const Estimator est = make_estimator(s, variant_scheme(v), cfg.power_control, cfg.subtraction);
    DropMetrics out;
    const std::uint64_t seed = cfg.scenario.seed;
    if (want_nmse) {
        out.nmse_cf = nmse_closed_form(est.state);
        if (cfg.trials > 0) {
            const McEstimate mc = nmse_empirical(s, est, cfg.trials, seed, drop, cfg.run);
            out.nmse_mc = mc.value;
            out.nmse_se = mc.stderr_;
        }
    }
    if (want_se) {
        out.se_cf = se_closed_form(s, est, cfg.ui_expansion).sum_se;
        if (cfg.trials > 0) {
            const SeReport mc = se_monte_carlo(s, est, cfg.trials, seed, drop, cfg.run);
            out.se_mc = mc.sum_se;
            out.se_se = mc.sum_se_stderr;
        }
    }
    return out;
}

/// Flags points whose Monte Carlo error exceeds a third of the step to either neighbour.
inline void flag_under_sampled(SweepResult& r)
{
    for (auto& p : r.points) {
        if (std::isnan(p.monte_carlo))
            continue;
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& q : r.points) {
            if (&q == &p || q.variant != p.variant || q.metric != p.metric || std::isnan(q.monte_carlo))
                continue;
            gap = std::min(gap, std::abs(q.monte_carlo - p.monte_carlo));
        }
        if (std::isfinite(gap))
            p.under_sampled = !(p.mc_stderr <= gap / 3.0);
    }
}

/// Runs every (value, variant) over all drops. Layouts depend only on the
/// master seed and drop index, so every variant and sweep value sees the
/// same networks and channel draws.
inline SweepResult run_sweep(const ExperimentConfig& cfg)
{
    std::vector<double> values = cfg.sweep_values;
    const std::string param = cfg.sweep_param.empty() ? "none" : cfg.sweep_param;
    if (cfg.sweep_param.empty())
        values = {0.0};
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw std::invalid_argument("sweep values must be strictly increasing");

    const bool want_nmse = std::find(cfg.metrics.begin(), cfg.metrics.end(), Metric::nmse) != cfg.metrics.end();
    const bool want_se = std::find(cfg.metrics.begin(), cfg.metrics.end(), Metric::sum_se) != cfg.metrics.end();

    SweepResult result;
    for (double value : values) {
        ScenarioConfig sc = cfg.scenario;
        if (!cfg.sweep_param.empty())
            apply_sweep_value(sc, cfg.sweep_param, value);
        sc.validate();

        const std::size_t nv = cfg.variants.size();
        std::vector<std::vector<DropMetrics>> per(nv);
        std::vector<double> wall(nv, 0.0);
        for (std::uint64_t d = 0; d < cfg.drops; ++d) {
            const Scenario base = build_scenario(sc, d);
            for (std::size_t i = 0; i < nv; ++i) {
                const auto t0 = std::chrono::steady_clock::now();
                per[i].push_back(evaluate_drop(base, cfg.variants[i], cfg, d, want_nmse, want_se));
                wall[i] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
        }

        for (std::size_t i = 0; i < nv; ++i)
            for (Metric m : cfg.metrics) {
                PointResult p;
                p.sweep_param = param;
                p.value = value;
                p.variant = cfg.variants[i];
                p.metric = m;
                p.trials = cfg.trials;
                p.drops = cfg.drops;
                p.seed = cfg.scenario.seed;
                p.wall_s = wall[i];
                const double D = static_cast<double>(cfg.drops);
                double cf = 0.0, mc = 0.0, var = 0.0;
                for (const auto& dm : per[i]) {
                    const double x = m == Metric::nmse ? dm.nmse_cf : dm.se_cf;
                    p.per_drop_closed_form.push_back(x);
                    cf += x;
                    mc += m == Metric::nmse ? dm.nmse_mc : dm.se_mc;
                    const double se = m == Metric::nmse ? dm.nmse_se : dm.se_se;
                    var += se * se;
                }
                p.closed_form = cf / D;
                if (cfg.drops > 1) {
                    double ss = 0.0;
                    for (double x : p.per_drop_closed_form)
                        ss += (x - p.closed_form) * (x - p.closed_form);
                    p.closed_form_drop_stderr = std::sqrt(ss / (D - 1.0) / D);
                }
                if (cfg.trials > 0) {
                    p.monte_carlo = mc / D;
                    p.mc_stderr = std::sqrt(var) / D;
                }
                result.points.push_back(std::move(p));
            }
    }
    flag_under_sampled(result);
    return result;
}

inline std::vector<double> grid(double lo, double hi, double step)
{
    std::vector<double> v;
    for (int i = 0;; ++i) {
        const double x = lo + step * i;
        if (x > hi + 1e-9 * std::abs(step))
            break;
        v.push_back(x);
    }
    return v;
}

/// NMSE vs pilot power.
inline SweepResult run_fig1(ExperimentConfig cfg)
{
    cfg.sweep_param = "p_p_dbm";
    if (cfg.sweep_values.empty())
        cfg.sweep_values = grid(0.0, 30.0, 5.0);
    cfg.metrics = {Metric::nmse};
    return run_sweep(cfg);
}

/// Sum SE vs number of APs.
inline SweepResult run_fig2(ExperimentConfig cfg)
{
    cfg.sweep_param = "m_aps";
    if (cfg.sweep_values.empty())
        cfg.sweep_values = grid(10.0, 60.0, 10.0);
    cfg.metrics = {Metric::sum_se};
    return run_sweep(cfg);
}

/// Sum SE vs number of RISs.
inline SweepResult run_fig3(ExperimentConfig cfg)
{
    cfg.sweep_param = "j_ris";
    if (cfg.sweep_values.empty())
        cfg.sweep_values = grid(1.0, 15.0, 1.0);
    cfg.metrics = {Metric::sum_se};
    return run_sweep(cfg);
}

inline std::string format_number(double x)
{
    if (std::isnan(x))
        return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline const char* csv_header()
{
    return "sweep_param,value,scheme,metric_name,closed_form,monte_carlo,mc_stderr,trials,drops,seed";
}

inline void write_csv(std::ostream& os, const SweepResult& r)
{
    os << csv_header() << '\n';
    for (const auto& p : r.points)
        os << p.sweep_param << ',' << format_number(p.value) << ',' << to_string(p.variant) << ','
           << to_string(p.metric) << ',' << format_number(p.closed_form) << ',' << format_number(p.monte_carlo) << ','
           << format_number(p.mc_stderr) << ',' << p.trials << ',' << p.drops << ',' << p.seed << '\n';
}

// ---------------------------------------------------------------------------
// Validation

/// M=8, K=4, N=2, 4x4 panels, J=2, tau_p=2, other values at their defaults.
inline ScenarioConfig desk_config()
{
    ScenarioConfig c;
    c.m_aps = 8;
    c.k_users = 4;
    c.j_ris = 2;
    c.n_antennas = 2;
    c.tau_p = 2;
    c.panel.l_v = 4;
    c.panel.l_h = 4;
    return c;
}

/// Desk scenario with both RIS links boosted until the cascaded channel is
/// comparable to or stronger than the direct one.
inline ScenarioConfig strong_ris_config(double gain_db = 80.0)
{
    ScenarioConfig c = desk_config();
    c.ris_link_gain_db = gain_db;
    return c;
}

struct Check {
    std::string name;
    double measured = 0.0;
    double limit = 0.0;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<Check> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }

    void add(std::string name, double measured, double limit, bool passed, std::string detail = {})
    {
        checks.push_back({std::move(name), measured, limit, passed, std::move(detail)});
    }

    void write(std::ostream& os) const
    {
        for (const auto& c : checks)
            os << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << format_number(c.measured)
               << " limit=" << format_number(c.limit) << (c.detail.empty() ? "" : " " + c.detail) << '\n';
    }
};

struct ValidationOptions {
    std::uint64_t trials = 100000;
    std::uint64_t nmse_trials = 10000;
    std::uint64_t drops = 2;
    std::uint64_t seed = 1;
    RunOptions run;
    std::vector<Scheme> schemes{Scheme::two_phase, Scheme::benchmark};
    /// Scale applied to c^c before the closed forms are evaluated (1 = intact).
    double corrupt_cc = 1.0;
};

/// Recomputes lambda from (possibly altered) weights.
inline void refresh_lambda(EstimatorState& st, const PilotPlan& plan)
{
    const double tau = plan.tau_p;
    for (Eigen::Index m = 0; m < st.lambda.rows(); ++m)
        for (Eigen::Index k = 0; k < st.lambda.cols(); ++k)
            st.lambda(m, k) = std::sqrt(tau * plan.direct.snr[k]) * st.c_d(m, k) * st.delta_d(m, k)
                + std::sqrt(tau * plan.cascaded.snr[k]) * st.c_c(m, k) * st.delta_c(m, k);
}

/// Closed forms against their Monte Carlo counterparts on one scenario.
inline void validate_scenario(ValidationReport& rep, const std::string& label, const ScenarioConfig& sc,
                              const ValidationOptions& opt)
{
    ScenarioConfig cfg = sc;
    cfg.seed = opt.seed;
    for (std::uint64_t d = 0; d < opt.drops; ++d) {
        const Scenario s = build_scenario(cfg, d);
        const std::string where = label + "/drop" + std::to_string(d);

        const Eigen::MatrixXd energy = channel_energy(s.lsf, s.panels, s.N, opt.trials, opt.seed, d, opt.run);
        const Eigen::MatrixXd delta = s.direct_gain() + s.cascade_gain();
        const Eigen::ArrayXXd ratio = energy.array() / delta.array();
        rep.add(where + "/channel_energy_min", ratio.minCoeff(), 0.98, ratio.minCoeff() >= 0.98);
        rep.add(where + "/channel_energy_max", ratio.maxCoeff(), 1.02, ratio.maxCoeff() <= 1.02);

        for (Scheme scheme : opt.schemes) {
            const std::string w = where + "/" + to_string(scheme);
            Estimator est = make_estimator(s, scheme);
            if (opt.corrupt_cc != 1.0 && scheme == Scheme::two_phase) {
                est.state.c_c *= opt.corrupt_cc;
                refresh_lambda(est.state, est.plan);
            }

            // A corrupted weight can push lambda past delta; that is a failed check, not an error.
            double nmse_cf = 0.0;
            try {
                nmse_cf = nmse_closed_form(est.state);
            } catch (const std::logic_error& e) {
                rep.add(w + "/nmse_rel_err", std::numeric_limits<double>::infinity(), 0.03, false, e.what());
                continue;
            }
            const McEstimate nmse_mc = nmse_empirical(s, est, opt.nmse_trials, opt.seed, d, opt.run);
            const double nmse_err = std::abs(nmse_mc.value - nmse_cf) / nmse_cf;
            rep.add(w + "/nmse_rel_err", nmse_err, 0.03, nmse_err <= 0.03,
                    "cf=" + format_number(nmse_cf) + " mc=" + format_number(nmse_mc.value));

            const EstimatorMoments mom = estimator_moments(s, est, opt.nmse_trials, opt.seed, d, opt.run);
            const Eigen::ArrayXXd er = mom.estimate_energy.array() / est.state.lambda.array() - 1.0;
            const double er_max = er.abs().maxCoeff();
            rep.add(w + "/estimate_energy_rel_err", er_max, 0.03, er_max <= 0.03);
            const double z = (mom.orthogonality.array() / mom.orthogonality_stderr.array()).abs().maxCoeff();
            rep.add(w + "/orthogonality_max_z", z, 4.0, z <= 4.0);

            SeReport cf;
            try {
                cf = se_closed_form(s, est);
            } catch (const std::logic_error& e) {
                rep.add(w + "/sinr_max_rel_err", std::numeric_limits<double>::infinity(), 0.05, false, e.what());
                continue;
            }
            const SeReport mc = se_monte_carlo(s, est, opt.trials, opt.seed, d, opt.run);
            double worst = 0.0;
            for (Eigen::Index k = 0; k < s.K; ++k)
                worst = std::max(worst, std::abs(mc.users[k].sinr - cf.users[k].sinr) / cf.users[k].sinr);
            rep.add(w + "/sinr_max_rel_err", worst, 0.05, worst <= 0.05);
            const auto [lo, hi] = std::minmax_element(mc.full_power.begin(), mc.full_power.end());
            rep.add(w + "/full_power_min", *lo, 0.99, *lo >= 0.99);
            rep.add(w + "/full_power_max", *hi, 1.01, *hi <= 1.01);
        }

        // EMI-free limit: every EMI term must vanish exactly.
        const Scenario quiet = s.without_emi();
        const Estimator qe = make_estimator(quiet, Scheme::two_phase);
        const SeReport qcf = se_closed_form(quiet, qe);
        double emi_sum = 0.0;
        for (const auto& u : qcf.users)
            emi_sum += std::abs(u.emi);
        for (Eigen::Index m = 0; m < quiet.M; ++m)
            emi_sum += std::abs(quiet.emi_at_ap(m));
        rep.add(where + "/emi_free_terms", emi_sum, 0.0, emi_sum == 0.0);
    }
}

/// Desk scenario at physical path loss plus the strong-RIS variant.
inline ValidationReport validate(const ValidationOptions& opt = {}, const ScenarioConfig& desk = desk_config(),
                                 double strong_gain_db = 80.0)
{
    ValidationReport rep;
    validate_scenario(rep, "desk", desk, opt);
    ScenarioConfig strong = desk;
    strong.ris_link_gain_db = strong_gain_db;
    validate_scenario(rep, "strong_ris", strong, opt);
    return rep;
}

} // namespace riscf
