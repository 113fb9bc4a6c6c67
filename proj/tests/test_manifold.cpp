#include "slowmf/errors.hpp"
#include "slowmf/expansion.hpp"
#include "slowmf/integrate.hpp"
#include "slowmf/manifold.hpp"
#include "slowmf/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace slowmf;

namespace {

// Noise grid with enough burned-in driver before the origin for one fixed-point solve.
TimeGrid lp_grid(const SlowFastModel& m, double dt, double tol, double mu = 0.0, std::size_t after = 1) {
    const double T = default_T_cut(m.eps, m.rho, m.gamma1, tol);
    const double burn = default_burn_in(m.eps, m.gamma1, mu);
    return TimeGrid::with_origin(static_cast<std::size_t>(std::ceil((T + burn) / dt)) + 2, after, dt);
}

// Scalar model with f(u, v) = c v and no slow coupling; the graph is c xi / (1 + eps b).
SlowFastModel affine_model(double c, double b, double eps) {
    SlowFastModel m;
    m.name = "affine";
    m.A = Mat::Constant(1, 1, -1.0);
    m.B = Mat::Constant(1, 1, b);
    m.f = [c](const Vec&, const Vec& v) { return Vec(c * v); };
    m.g = [](const Vec&, const Vec& v, double) { return Vec::Zero(v.size()); };
    m.sigma = Vec::Zero(1);
    m.eps = eps;
    m.gamma1 = 1.0;
    m.gamma2 = std::abs(b);
    m.K = std::max(std::abs(c), 1e-3);
    m.rho = 0.5;
    return m;
}

std::vector<Vec> scalar_grid(int lo, int hi) {
    std::vector<Vec> out;
    for (int x = lo; x <= hi; ++x) out.push_back(Vec::Constant(1, x));
    return out;
}

}  // namespace

TEST(FixedPoint, VanishingFastNonlinearityGivesDriverValue) {
    SlowFastModel m = affine_model(0.0, 0.001, 0.1).with_sigma(Vec::Constant(1, 0.1));
    const double dt = m.eps / 200;
    const NoiseBundle nb = make_noise(lp_grid(m, dt, 1e-10), 4);
    const auto d = stationary_driver(nb, m.A, m.sigma, m.eps, NoiseKind::white, default_burn_in(m.eps, 1.0));
    const LpResult r = lp_fixed_point(m, d, Vec::Constant(1, 2.0));
    EXPECT_EQ(r.H[0], 0.0);
    EXPECT_EQ(r.h[0], d.at(nb.grid().origin())[0]);
}

TEST(FixedPoint, AffineForcingMatchesClosedForm) {
    for (double eps : {0.1, 0.02}) {
        const SlowFastModel m = affine_model(0.02, 0.01, eps);
        const double dt = eps / 400;
        const NoiseBundle nb = zero_noise(lp_grid(m, dt, 1e-12));
        const auto d = stationary_driver(nb, m.A, m.sigma, m.eps, NoiseKind::white, default_burn_in(eps, 1.0));
        LpOptions o;
        o.tol = 1e-12;
        for (double xi : {-3.0, 1.0, 4.0}) {
            const LpResult r = lp_fixed_point(m, d, Vec::Constant(1, xi), o);
            const double expected = 0.02 * xi / (1.0 + eps * 0.01);
            EXPECT_NEAR(r.h[0], expected, 1e-9 * std::abs(expected)) << "eps " << eps << " xi " << xi;
        }
    }
}

TEST(FixedPoint, ContractionRatioAndIterationBound) {
    const SlowFastModel m = example_model(0.1);
    const AssumptionReport rep = check_assumptions(m);
    ASSERT_LT(rep.kappa1, 1.0);
    const double dt = m.eps / 200;
    const double mu = 0.01;
    const NoiseBundle nb = make_noise(lp_grid(m, dt, 1e-10, mu), 8, mu);
    const int bound = static_cast<int>(std::ceil(std::log(1e-10) / std::log(rep.kappa1))) + 2;
    for (auto kind : {NoiseKind::white, NoiseKind::colored}) {
        const auto d = stationary_driver(nb, m.A, m.sigma, m.eps, kind, default_burn_in(m.eps, 1.0, mu));
        const ManifoldSample s = manifold_graph(m, d, scalar_grid(-4, 4));
        EXPECT_LE(s.max_ratio, rep.kappa1 + 0.05);
        EXPECT_LE(s.iterations, bound);
        EXPECT_LE(s.residual, 1e-10);
    }
}

TEST(FixedPoint, GraphLipschitzBelowClosedFormBound) {
    const SlowFastModel m = example_model(0.1);
    const double dt = m.eps / 200;
    const NoiseBundle nb = make_noise(lp_grid(m, dt, 1e-10), 12);
    const auto d = stationary_driver(nb, m.A, m.sigma, m.eps, NoiseKind::white, default_burn_in(m.eps, 1.0));
    const ManifoldSample s = manifold_graph(m, d, scalar_grid(-6, 6));
    EXPECT_GT(s.lipschitz_est, 0.0);
    EXPECT_LE(s.lipschitz_est, check_assumptions(m).lipschitz_bound);
}

TEST(FixedPoint, IterationCapRaisesConvergenceError) {
    const SlowFastModel m = example_model(0.1);
    const double dt = m.eps / 100;
    const NoiseBundle nb = make_noise(lp_grid(m, dt, 1e-14), 2);
    const auto d = stationary_driver(nb, m.A, m.sigma, m.eps, NoiseKind::white, default_burn_in(m.eps, 1.0));
    LpOptions o;
    o.max_iter = 2;
    o.tol = 1e-14;
    try {
        lp_fixed_point(m, d, Vec::Constant(1, 4.0), o);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.last_ratio(), 0.0);
        EXPECT_LT(e.last_ratio(), 1.0);
    }
}

TEST(FixedPoint, ShortDriverWindowIsRejected) {
    const SlowFastModel m = example_model(0.1);
    const double dt = m.eps / 100;
    const NoiseBundle nb = make_noise(TimeGrid::with_origin(static_cast<std::size_t>(std::ceil(1.5 / dt)), 1, dt), 2);
    const auto d = stationary_driver(nb, m.A, m.sigma, m.eps, NoiseKind::white, 1.0);
    EXPECT_THROW(lp_fixed_point(m, d, Vec::Constant(1, 1.0)), ConfigError);
}

TEST(FixedPoint, RejectsModelsOutsideTheGapCondition) {
    SlowFastModel m = example_model(0.1);
    m.K = 0.8;
    const double dt = m.eps / 100;
    const NoiseBundle nb = make_noise(lp_grid(m, dt, 1e-10), 2);
    const auto d = stationary_driver(nb, m.A, m.sigma, m.eps, NoiseKind::white, default_burn_in(m.eps, 1.0));
    EXPECT_THROW(lp_fixed_point(m, d, Vec::Constant(1, 1.0)), AssumptionError);
}

TEST(Expansion, NoiseFreeValueAtThree) {
    const SlowFastModel m = example_model(0.1);
    const double dt = 1e-3;
    const NoiseBundle nb = zero_noise(lp_grid(m, dt, 1e-10));
    const ExpansionNoise en = expansion_noise(nb, 0.1, NoiseKind::white, default_burn_in(0.1, 1.0));
    const auto c = ExpansionCoefficients::from_model(m);
    EXPECT_NEAR(expansion_h(c, en, 3.0), 0.015 + 1.5e-6, 1e-15);
    EXPECT_EQ(expansion_h(c, en, 0.0), 0.0);
}

TEST(Expansion, ZeroSlowValueLeavesOnlyTheDriver) {
    const SlowFastModel m = example_model(0.1);
    const double dt = 1e-3;
    const NoiseBundle nb = make_noise(lp_grid(m, dt, 1e-10), 21);
    const ExpansionNoise en = expansion_noise(nb, 0.1, NoiseKind::white, default_burn_in(0.1, 1.0));
    const std::size_t o = nb.grid().origin();
    EXPECT_DOUBLE_EQ(expansion_h(ExpansionCoefficients::from_model(m), en, 0.0), 0.1 * en.drive[o]);
    EXPECT_THROW(expansion_h(ExpansionCoefficients::from_model(m), en, 1.0, 0), ConfigError);
}

TEST(Expansion, RemainderShrinksQuadratically) {
    // Mean |fixed point - expansion| over seeds and xi, compared at two eps values.
    auto mean_gap = [](double eps) {
        const SlowFastModel m = example_model(0.1, 6.0, eps);
        const double dt = eps / 200;
        LpOptions o;
        o.tol = 1e-12;
        std::vector<double> per_seed(4, 0.0);
        parallel_for(per_seed.size(), [&](std::size_t s) {
            const NoiseBundle nb = make_noise(lp_grid(m, dt, o.tol), 50 + s);
            const double burn = default_burn_in(eps, 1.0);
            const auto d = stationary_driver(nb, m.A, m.sigma, eps, NoiseKind::white, burn);
            const ExpansionNoise en = expansion_noise(nb, eps, NoiseKind::white, burn);
            const auto c = ExpansionCoefficients::from_model(m);
            double acc = 0.0;
            for (int x = -4; x <= 4; ++x) {
                acc += std::abs(lp_fixed_point(m, d, Vec::Constant(1, x), o).h[0] - expansion_h(c, en, x));
            }
            per_seed[s] = acc / 9.0;
        });
        return mean_stderr(per_seed).mean;
    };
    const double coarse = mean_gap(0.1);
    const double fine = mean_gap(0.05);
    EXPECT_GT(coarse, 0.0);
    EXPECT_LE(fine, 0.35 * coarse);
}

TEST(Expansion, ReducedOrbitsFromBothSourcesAgree) {
    const double eps = 0.1;
    const SlowFastModel m = example_model(0.1, 6.0, eps);
    const double dt = 1e-3;
    const double T = 0.5;
    const TimeGrid g = lp_grid(m, dt, 1e-10, 0.0, static_cast<std::size_t>(T / dt));
    const NoiseBundle nb = make_noise(g, 31);
    const double burn = default_burn_in(eps, 1.0);
    const auto d = std::make_shared<StationaryDriverPath>(stationary_driver(nb, m.A, m.sigma, eps, NoiseKind::white, burn));
    const auto en = std::make_shared<ExpansionNoise>(expansion_noise(nb, eps, NoiseKind::white, burn));
    const std::size_t o = g.origin();
    const auto c = ExpansionCoefficients::from_model(m);
    const TimeGrid window = g.window(o, g.size() - 1);
    const SlowFn g_fn = m.g;
    const Trajectory by_exp = solve_reduced(
        m.B, g_fn, [&](std::size_t k, double, const Vec& xi) { return Vec::Constant(1, expansion_h(c, *en, xi[0], o + k)); },
        Vec::Constant(1, 3.0), m.a, window);
    const Trajectory by_lp = solve_reduced(
        m.B, g_fn, [&](std::size_t k, double, const Vec& xi) { return lp_fixed_point(m, *d, xi, {}, o + k).h; },
        Vec::Constant(1, 3.0), m.a, window);
    const double gap = (by_exp.slow - by_lp.slow).cwiseAbs().maxCoeff();
    EXPECT_LE(gap, 10.0 * eps * eps * T);
}

TEST(GapStudy, DecreasesWithCorrelationTime) {
    GapStudyConfig cfg;
    cfg.eps = 0.1;
    cfg.mu_list = {1e-1, 1e-2, 1e-3};
    cfg.xi_list = {-3.0, 0.0, 3.0};
    cfg.n_seeds = 8;
    cfg.source = ManifoldSource::expansion;
    const GapTable t = wz_manifold_gap(example_model(0.1), cfg);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_GT(t.rows[0].mean_gap, t.rows[1].mean_gap);
    EXPECT_GT(t.rows[1].mean_gap, t.rows[2].mean_gap);
    EXPECT_GE(t.slope, 0.35);
}

TEST(GapStudy, NeedsThreeCorrelationTimes) {
    GapStudyConfig cfg;
    cfg.mu_list = {0.1, 0.01};
    cfg.xi_list = {1.0};
    EXPECT_THROW(wz_manifold_gap(example_model(0.1), cfg), ConfigError);
    cfg.mu_list.clear();
    EXPECT_THROW(wz_manifold_gap(example_model(0.1), cfg), ConfigError);
}

TEST(Invariance, ZeroTimeHasZeroDistance) {
    const SlowFastModel m = example_model(0.1);
    const double dt = m.eps / 100;
    const NoiseBundle nb = make_noise(lp_grid(m, dt, 1e-10, 0.01, 10), 3, 0.01);
    const InvarianceReport r = invariance_check(m, nb, NoiseKind::colored, scalar_grid(-2, 2), 0.0);
    EXPECT_EQ(r.max_distance, 0.0);
    EXPECT_GT(r.scale, 0.0);
}

TEST(Invariance, LinearModelIsInvariantToRoundoff) {
    const SlowFastModel m = affine_model(0.0, 0.01, 0.1).with_sigma(Vec::Constant(1, 0.1));
    const double dt = 2e-4;
    const NoiseBundle nb = make_noise(lp_grid(m, dt, 1e-13, 0.0, 2000), 17);
    LpOptions o;
    o.tol = 1e-13;
    const InvarianceReport r = invariance_check(m, nb, NoiseKind::white, scalar_grid(-2, 2), 0.2, o);
    EXPECT_LE(r.max_distance, 1e-8);
}

TEST(Invariance, ExampleDistanceShrinksUnderRefinement) {
    const SlowFastModel m = example_model(0.1);
    const double mu = 0.01;
    const double t_check = 0.5;
    const double dt_fine = 2.5e-4;
    const double T = 1.5 * default_T_cut(m.eps, m.rho, 1.0, 1e-12) + default_burn_in(m.eps, 1.0, mu) + 0.1;
    const TimeGrid g = TimeGrid::with_origin(static_cast<std::size_t>(std::ceil(T / (4 * dt_fine))) * 4,
                                             static_cast<std::size_t>(std::ceil(0.6 / (4 * dt_fine))) * 4, dt_fine);
    const auto fine_b = std::make_shared<const BrownianPath>(sample_brownian(g, 301));
    const auto coarse_b = std::make_shared<const BrownianPath>(coarsen(*fine_b, 4));
    const NoiseBundle fine = with_mu(NoiseBundle{fine_b}, mu);
    const NoiseBundle coarse = with_mu(NoiseBundle{coarse_b}, mu);
    LpOptions lc;
    lc.tol = 1e-12;
    LpOptions lf = lc;
    lf.T_cut = 1.5 * default_T_cut(m.eps, m.rho, 1.0, 1e-12);
    const auto xi = scalar_grid(-4, 4);
    const InvarianceReport rc = invariance_check(m, coarse, NoiseKind::colored, xi, t_check, lc);
    const InvarianceReport rf = invariance_check(m, fine, NoiseKind::colored, xi, t_check, lf);
    EXPECT_LE(rc.max_distance, 1e-2 * rc.scale);
    EXPECT_LE(rf.max_distance, 0.5 * rc.max_distance);
}
