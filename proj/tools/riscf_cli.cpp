// Command-line front end: figure sweeps, validation, config runs, layout export.

#include "riscf/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> drops;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string scheme;
    std::string out;
    std::string config;
};

void add_common(CLI::App* app, CommonFlags& f, bool config_required)
{
    app->add_option("--trials", f.trials, "Monte Carlo trials per drop (0 = closed form only)");
    app->add_option("--drops", f.drops, "network drops per point");
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    app->add_option("--scheme", f.scheme, "two_phase|benchmark|two_phase_no_emi|benchmark_no_emi|ris_free|all");
    app->add_option("--out", f.out, "CSV output path (default stdout)");
    auto* c = app->add_option("--config", f.config, "JSON config file");
    if (config_required)
        c->required();
}

riscf::ExperimentConfig resolve(const CommonFlags& f)
{
    riscf::ExperimentConfig cfg = f.config.empty() ? riscf::ExperimentConfig{} : riscf::load_config(f.config);
    if (f.trials)
        cfg.trials = *f.trials;
    if (f.drops)
        cfg.drops = *f.drops;
    if (f.seed)
        cfg.scenario.seed = *f.seed;
    if (f.threads)
        cfg.run.threads = *f.threads;
    if (!f.scheme.empty())
        cfg.variants = riscf::parse_variants(f.scheme);
    if (cfg.drops < 1)
        throw std::invalid_argument("--drops must be at least 1");
    return cfg;
}

void emit(const riscf::SweepResult& r, const std::string& out)
{
    if (out.empty()) {
        riscf::write_csv(std::cout, r);
    } else {
        std::ofstream os(out);
        if (!os)
            throw std::runtime_error("cannot write " + out);
        riscf::write_csv(os, r);
    }
    double wall = 0.0;
    for (const auto& p : r.points) {
        wall += p.wall_s;
        if (p.under_sampled)
            std::cerr << "warning: under-sampled point " << p.sweep_param << '=' << p.value << ' '
                      << riscf::to_string(p.variant) << ' ' << riscf::to_string(p.metric)
                      << " (mc_stderr=" << p.mc_stderr << ")\n";
    }
    std::cerr << "evaluated " << r.points.size() << " points in " << wall << " s\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RIS-aided cell-free massive MIMO downlink simulator"};
    app.require_subcommand(1);

    CommonFlags fig1f, fig2f, fig3f, runf, layoutf;
    auto* fig1 = app.add_subcommand("fig1", "NMSE vs pilot power");
    auto* fig2 = app.add_subcommand("fig2", "sum SE vs number of APs");
    auto* fig3 = app.add_subcommand("fig3", "sum SE vs number of RISs");
    auto* run = app.add_subcommand("run", "run the sweep or single point described by a config");
    add_common(fig1, fig1f, false);
    add_common(fig2, fig2f, false);
    add_common(fig3, fig3f, false);
    add_common(run, runf, true);

    auto* layout = app.add_subcommand("layout", "export one drop's node positions as CSV");
    std::uint64_t layout_drop = 0;
    layout->add_option("--config", layoutf.config, "JSON config file");
    layout->add_option("--seed", layoutf.seed, "master seed");
    layout->add_option("--drop", layout_drop, "drop index");
    layout->add_option("--out", layoutf.out, "CSV output path (default stdout)");

    auto* val = app.add_subcommand("validate", "closed forms against Monte Carlo; exit 2 on any failure");
    riscf::ValidationOptions vopt;
    double strong_gain = 80.0;
    std::string vconfig;
    std::optional<unsigned> vthreads;
    bool desk_only = false;
    val->add_option("--trials", vopt.trials, "Monte Carlo trials for SINR and moment checks");
    val->add_option("--nmse-trials", vopt.nmse_trials, "Monte Carlo trials for NMSE checks");
    val->add_option("--drops", vopt.drops, "drops per scenario");
    val->add_option("--seed", vopt.seed, "master seed");
    val->add_option("--threads", vthreads, "worker threads (0 = all cores)");
    val->add_option("--config", vconfig, "JSON config replacing the desk scenario");
    val->add_option("--strong-gain-db", strong_gain, "RIS link gain of the strong-RIS scenario");
    val->add_option("--corrupt-cc", vopt.corrupt_cc, "scale c^c before evaluating closed forms (harness check)");
    val->add_flag("--desk-only", desk_only, "skip the strong-RIS scenario");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fig1->parsed())
            emit(riscf::run_fig1(resolve(fig1f)), fig1f.out);
        else if (fig2->parsed())
            emit(riscf::run_fig2(resolve(fig2f)), fig2f.out);
        else if (fig3->parsed())
            emit(riscf::run_fig3(resolve(fig3f)), fig3f.out);
        else if (run->parsed())
            emit(riscf::run_sweep(resolve(runf)), runf.out);
        else if (layout->parsed()) {
            riscf::ScenarioConfig sc = layoutf.config.empty() ? riscf::ScenarioConfig{}
                                                              : riscf::load_config(layoutf.config).scenario;
            if (layoutf.seed)
                sc.seed = *layoutf.seed;
            sc.validate();
            const auto lay = riscf::generate_layout(sc.m_aps, sc.k_users, sc.j_ris, sc.d_km,
                                                    riscf::drop_seed(sc.seed, layout_drop), sc.radio);
            if (layoutf.out.empty()) {
                riscf::write_layout_csv(std::cout, lay);
            } else {
                std::ofstream os(layoutf.out);
                if (!os)
                    throw std::runtime_error("cannot write " + layoutf.out);
                riscf::write_layout_csv(os, lay);
            }
        } else if (val->parsed()) {
            if (vthreads)
                vopt.run.threads = *vthreads;
            const riscf::ScenarioConfig desk
                = vconfig.empty() ? riscf::desk_config() : riscf::load_config(vconfig).scenario;
            riscf::ValidationReport rep;
            riscf::validate_scenario(rep, "desk", desk, vopt);
            if (!desk_only) {
                riscf::ScenarioConfig strong = desk;
                strong.ris_link_gain_db = strong_gain;
                riscf::validate_scenario(rep, "strong_ris", strong, vopt);
            }
            rep.write(std::cout);
            if (!rep.passed()) {
                std::cerr << "validation failed\n";
                return 2;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
