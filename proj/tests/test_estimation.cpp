#include "riscf/estimation.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace riscf;
using namespace riscf::test;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("prelog factors")
{
    CHECK_THAT(prelog(Scheme::two_phase, 200, 3), WithinRel(194.0 / 200.0, 1e-15));
    CHECK_THAT(prelog(Scheme::benchmark, 200, 3), WithinRel(197.0 / 200.0, 1e-15));
    CHECK_THROWS_AS(prelog(Scheme::two_phase, 10, 5), std::invalid_argument);
    CHECK_NOTHROW(prelog(Scheme::benchmark, 10, 5));
}

TEST_CASE("fractional pilot power")
{
    Eigen::MatrixXd delta(2, 2);
    delta << 1.0, 0.5, 1.0, 0.5; // column sums 2 and 1
    const auto p = fractional_pilot_power(delta, 0.1);
    CHECK_THAT(p[0], WithinRel(4.0 / 3.0 * 0.1, 1e-14));
    CHECK_THAT(p[1], WithinRel(2.0 / 3.0 * 0.1, 1e-14));
    CHECK_THAT(p[0] + p[1], WithinRel(2 * 0.1, 1e-14));

    // linear in the budget, invariant to scaling delta
    const auto q = fractional_pilot_power(3.0 * delta, 0.3);
    CHECK_THAT(q[0], WithinRel(3.0 * p[0], 1e-14));

    Eigen::MatrixXd dead = delta;
    dead.col(1).setZero();
    CHECK_THROWS_AS(fractional_pilot_power(dead, 0.1), std::invalid_argument);
}

TEST_CASE("pilot assignment")
{
    SECTION("orthogonal when K <= tau_p")
    {
        const Eigen::MatrixXd delta = Eigen::MatrixXd::Random(4, 3).cwiseAbs();
        const auto p = assign_pilots(delta, {1, 1, 1}, 3);
        CHECK(p == std::vector<int>{0, 1, 2});
    }
    SECTION("one extra user against exhaustive search")
    {
        Stream rng(4, StreamTag::test);
        for (int rep = 0; rep < 50; ++rep) {
            const int tau = 3, K = 4, M = 5;
            Eigen::MatrixXd delta(M, K);
            for (int m = 0; m < M; ++m)
                for (int k = 0; k < K; ++k)
                    delta(m, k) = std::exp(rng.uniform(-5.0, 0.0));
            std::vector<double> snr{rng.uniform(1, 10), rng.uniform(1, 10), rng.uniform(1, 10), 1.0};
            // prime AP of user 3, then the pilot with the smallest received load there
            int prime = 0;
            for (int m = 1; m < M; ++m)
                if (delta(m, 3) > delta(prime, 3))
                    prime = m;
            int want = 0;
            for (int t = 1; t < tau; ++t)
                if (snr[t] * delta(prime, t) < snr[want] * delta(prime, want))
                    want = t;
            const auto p = assign_pilots(delta, snr, tau);
            CHECK(p[3] == want);
            // invariant under a common rescaling
            CHECK(assign_pilots(7.0 * delta, snr, tau) == p);
        }
    }
    SECTION("single pilot")
    {
        const Eigen::MatrixXd delta = Eigen::MatrixXd::Ones(2, 5);
        const auto p = assign_pilots(delta, std::vector<double>(5, 1.0), 1);
        CHECK(p == std::vector<int>(5, 0));
        const auto sets = copilot_sets(p);
        CHECK(sets[2].size() == 5);
    }
    SECTION("errors")
    {
        CHECK_THROWS_AS(assign_pilots(Eigen::MatrixXd::Ones(2, 2), {1, 1}, 0), std::invalid_argument);
        CHECK_THROWS_AS(assign_pilots(Eigen::MatrixXd::Ones(2, 2), {1}, 1), std::invalid_argument);
    }
}

TEST_CASE("sub-phases may use different assignments")
{
    // user 2 hears user 0 strongly on the direct path but user 1 through the RIS
    Eigen::MatrixXd direct(2, 3), ap_ris(2, 1), user_ris(3, 1);
    direct << 1.0, 1e-3, 1.0, 1e-3, 1.0, 1e-3;
    const double A2 = square_panels(1, 2)[0].trace_t();
    ap_ris << 1e-3 / std::sqrt(A2), 1.0 / std::sqrt(A2);
    user_ris << 1e-3 / std::sqrt(A2), 1.0 / std::sqrt(A2), 1.0 / std::sqrt(A2);
    const auto s = toy_scenario(direct, ap_ris, user_ris, square_panels(1, 2), 1, 2, 1.0, 1.0);
    const auto plan = plan_two_phase(s, PowerControl::equal);
    CHECK(plan.direct.pilot == std::vector<int>{0, 1, 1});
    CHECK(plan.cascaded.pilot == std::vector<int>{0, 1, 0});
}

TEST_CASE("scalar LMMSE reduction")
{
    // M = K = 1, no RIS: c = sqrt(tau rho) beta / (tau rho beta + 1), NMSE = 1 / (1 + tau rho beta)
    Eigen::MatrixXd beta(1, 1);
    beta << 0.7;
    const double rho = 4.0;
    for (int tau : {1, 2, 5}) {
        const auto s = direct_only(beta, 3, tau, rho, 1.0);
        for (Scheme sc : {Scheme::two_phase, Scheme::benchmark}) {
            const auto e = make_estimator(s, sc);
            const double a = tau * rho * 0.7;
            CHECK_THAT(e.state.c_d(0, 0), WithinRel(std::sqrt(tau * rho) * 0.7 / (a + 1.0), 1e-13));
            CHECK_THAT(e.state.lambda(0, 0), WithinRel(a * 0.7 / (a + 1.0), 1e-13));
            CHECK_THAT(nmse_closed_form(e.state), WithinRel(1.0 / (1.0 + a), 1e-13));
        }
    }
}

TEST_CASE("two-phase weights on one link")
{
    const auto s = mixed_scenario(1, 1, 1, 2, 1, 0.5);
    const auto e = make_estimator(s, Scheme::two_phase, PowerControl::equal);
    const double rho = s.pilot_snr();
    const double d = s.lsf.direct(0, 0);
    const double c = s.lsf.ap_ris(0, 0) * s.lsf.user_ris(0, 0) * s.panels[0].trace_t();
    const double emi = s.lsf.ap_ris(0, 0) * s.panels[0].emi_power() * s.panels[0].trace_t();
    CHECK_THAT(e.state.c_d(0, 0), WithinRel(std::sqrt(rho) * d / (rho * d + 1.0), 1e-13));
    CHECK_THAT(e.state.c_c(0, 0), WithinRel(std::sqrt(rho) * c / (rho * c + emi + 1.0), 1e-13));
    CHECK_THAT(e.state.lambda(0, 0),
               WithinRel(rho * d * d / (rho * d + 1.0) + rho * c * c / (rho * c + emi + 1.0), 1e-13));

    // the benchmark sees the sum in one shot
    const auto b = make_estimator(s, Scheme::benchmark);
    CHECK_THAT(b.state.lambda(0, 0), WithinRel(rho * (d + c) * (d + c) / (rho * (d + c) + emi + 1.0), 1e-13));
}

TEST_CASE("pilot contamination floor")
{
    // two users on one pilot, equal power: lambda_1 = tau rho b1^2 / (tau rho (b1 + b2) + 1)
    Eigen::MatrixXd beta(1, 2);
    beta << 1.0, 0.5;
    const auto s = direct_only(beta, 1, 1, 1e9, 1.0);
    const auto e = make_estimator(s, Scheme::benchmark);
    CHECK_THAT(e.state.lambda(0, 0), WithinRel(1.0 / 1.5, 1e-8));
    CHECK_THAT(nmse_closed_form(e.state), WithinRel(1.0 - (1.0 / 1.5 + 0.25 / 1.5) / 1.5, 1e-8));
}

TEST_CASE("limits of the weights")
{
    SECTION("noiseless pilots recover the channel")
    {
        const auto s = direct_only(Eigen::MatrixXd::Constant(2, 2, 0.3), 1, 2, 1e12, 1.0);
        const auto e = make_estimator(s, Scheme::two_phase);
        CHECK(nmse_closed_form(e.state) < 1e-9);
    }
    SECTION("no pilot energy leaves the NMSE at one")
    {
        const auto s = direct_only(Eigen::MatrixXd::Constant(2, 2, 0.3), 1, 2, 1e-14, 1.0);
        const auto e = make_estimator(s, Scheme::two_phase);
        CHECK_THAT(nmse_closed_form(e.state), WithinAbs(1.0, 1e-12));
    }
    SECTION("overwhelming EMI silences the cascaded weight")
    {
        const auto s = mixed_scenario(2, 2, 1, 1, 2, 1e12);
        const auto e = make_estimator(s, Scheme::two_phase);
        CHECK(e.state.c_c.maxCoeff() < 1e-10 * e.state.c_d.minCoeff());
    }
    SECTION("dark RIS falls back to the direct assignment")
    {
        auto s = mixed_scenario(3, 4, 2, 1, 2);
        PanelSpec dark;
        dark.l_v = dark.l_h = 2;
        dark.amplitude = 0.0;
        for (auto& p : s.panels)
            p = RisPanel::uniform(dark, RadioConstants{}.wavelength_m());
        const auto e = make_estimator(s, Scheme::two_phase);
        CHECK(e.plan.cascaded.pilot == e.plan.direct.pilot);
        CHECK(e.state.c_c.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("lambda bounded by delta and monotone in power and EMI")
{
    double prev_power = 0.0;
    for (double rho : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        auto s = mixed_scenario(3, 4, 2, 1, 2, 0.3);
        s.pilot_power_w = rho;
        const auto e = make_estimator(s, Scheme::two_phase, PowerControl::equal);
        CHECK(((e.state.lambda - e.state.delta).array() <= 1e-12).all());
        CHECK(e.state.lambda.sum() > prev_power);
        prev_power = e.state.lambda.sum();
    }
    double prev_emi = std::numeric_limits<double>::infinity();
    for (double emi : {0.0, 0.1, 1.0, 10.0}) {
        const auto s = mixed_scenario(3, 4, 2, 1, 2, emi);
        const double l = make_estimator(s, Scheme::two_phase, PowerControl::equal).state.lambda.sum();
        CHECK(l < prev_emi);
        prev_emi = l;
    }
}

TEST_CASE("estimate is the weighted sum of the projections")
{
    const auto s = mixed_scenario(2, 3, 1, 2, 2, 0.5);
    const auto e = make_estimator(s, Scheme::two_phase);
    const auto r = sample_realization(s.lsf, s.panels, s.N, 3, 0, 4);
    const auto est = estimate(r, e, s, 3, 0, 4);
    for (Eigen::Index m = 0; m < s.M; ++m)
        for (Eigen::Index k = 0; k < s.K; ++k) {
            const auto i = m * s.K + k;
            const Eigen::VectorXcd want = e.state.c_d(m, k) * est.y_d[i] + e.state.c_c(m, k) * est.y_c[i];
            CHECK((est.at(m, k) - want).norm() <= 1e-14 * want.norm());
        }
    const auto again = estimate(r, e, s, 3, 0, 4);
    CHECK(again.at(1, 2) == est.at(1, 2));
}

TEST_CASE("noiseless projections contain only channels")
{
    const auto s = mixed_scenario(2, 2, 1, 2, 2, 0.5);
    const auto e = make_estimator(s, Scheme::two_phase, PowerControl::equal);
    const auto r = sample_realization(s.lsf, s.panels, s.N, 8, 0, 0);
    const auto est = estimate(r, e, s, 8, 0, 0, true);
    const double st = std::sqrt(static_cast<double>(s.tau_p) * s.pilot_snr());
    for (Eigen::Index m = 0; m < s.M; ++m)
        for (Eigen::Index k = 0; k < s.K; ++k) {
            CHECK((est.y_d[m * s.K + k] - st * r.g_direct(m, k)).norm() <= 1e-12 * st * r.g_direct(m, k).norm());
            CHECK((est.y_c[m * s.K + k] - st * r.g_cascaded(m, k)).norm() <= 1e-12 * st * r.g_cascaded(m, k).norm());
        }
}

TEST_CASE("NMSE closed form against Monte Carlo")
{
    for (double emi : {0.0, 1.0}) {
        const auto s = mixed_scenario(3, 4, 2, 2, 2, emi);
        for (Scheme sc : {Scheme::two_phase, Scheme::benchmark}) {
            const auto e = make_estimator(s, sc);
            const double cf = nmse_closed_form(e.state);
            const auto mc = nmse_empirical(s, e, 20000, 17);
            INFO("emi=" << emi << " scheme=" << to_string(sc) << " cf=" << cf << " mc=" << mc.value << " +- "
                        << mc.stderr_);
            CHECK(std::abs(mc.value - cf) <= 0.03 * cf);
            CHECK(std::abs(mc.value - cf) <= 4.0 * mc.stderr_);
        }
    }
}

TEST_CASE("estimator moments")
{
    const auto s = mixed_scenario(2, 3, 2, 2, 2, 0.5);
    for (Scheme sc : {Scheme::two_phase, Scheme::benchmark}) {
        const auto e = make_estimator(s, sc);
        const auto mom = estimator_moments(s, e, 40000, 5);
        const Eigen::ArrayXXd ratio = mom.estimate_energy.array() / e.state.lambda.array();
        CHECK(ratio.minCoeff() >= 0.97);
        CHECK(ratio.maxCoeff() <= 1.03);
        const Eigen::ArrayXXd z = mom.orthogonality.array() / mom.orthogonality_stderr.array();
        CHECK(z.abs().maxCoeff() <= 4.0);
        CHECK_THROWS_AS(estimator_moments(s, e, 1, 5), std::invalid_argument);
    }
}

TEST_CASE("Monte Carlo standard error scales as 1/sqrt(n)")
{
    const auto s = mixed_scenario(2, 2, 1, 1, 1, 0.2);
    const auto e = make_estimator(s, Scheme::two_phase);
    const auto a = nmse_empirical(s, e, 2000, 3);
    const auto b = nmse_empirical(s, e, 32000, 3);
    CHECK_THAT(a.stderr_ / b.stderr_, WithinRel(4.0, 0.15));
}

TEST_CASE("NMSE Monte Carlo is thread-count independent")
{
    const auto s = mixed_scenario(2, 2, 1, 1, 1, 0.2);
    const auto e = make_estimator(s, Scheme::benchmark);
    const auto a = nmse_empirical(s, e, 500, 9, 0, RunOptions{1, 32});
    const auto b = nmse_empirical(s, e, 500, 9, 0, RunOptions{3, 32});
    CHECK(a.value == b.value);
    CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("estimated subtraction leaves a residual")
{
    const auto s = mixed_scenario(2, 2, 1, 1, 1, 0.0);
    const auto ideal = make_estimator(s, Scheme::two_phase, PowerControl::fractional, Subtraction::ideal);
    const auto resid = make_estimator(s, Scheme::two_phase, PowerControl::fractional, Subtraction::estimated);
    const auto r = sample_realization(s.lsf, s.panels, s.N, 2, 0, 0);
    const auto a = estimate(r, ideal, s, 2, 0, 0);
    const auto b = estimate(r, resid, s, 2, 0, 0);
    CHECK(a.y_d[0] == b.y_d[0]);
    CHECK(a.y_c[0] != b.y_c[0]);
}
