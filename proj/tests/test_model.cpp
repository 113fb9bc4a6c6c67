#include "slowmf/errors.hpp"
#include "slowmf/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace slowmf;

namespace {

SlowFastModel with_constants(double K, double eps) {
    SlowFastModel m = example_model(0.1, 6.0, eps);
    m.K = K;
    return m;
}

}  // namespace

// Reference values below were evaluated independently at 30 significant digits.

TEST(Constants, ClosedFormsAtEpsOneTenth) {
    const double K = 0.02, g1 = 1.0, g2 = 0.001, rho = 0.5, eps = 0.1;
    EXPECT_NEAR(constants::kappa(K, g1, g2, rho, eps), 0.044000800160032008, 1e-15);
    EXPECT_NEAR(constants::kappa_star(K, g1, g2, rho, eps), 0.044168197796377382, 1e-15);
    EXPECT_NEAR(constants::eps_max(K, g1, g2, rho), 22.900763358778625, 1e-11);
    EXPECT_NEAR(constants::graph_lipschitz(K, g1, g2, rho, eps), 0.041841039204526433, 1e-15);
    EXPECT_NEAR(constants::tracking_c1(K, g1, g2, rho, eps), 1.0460259801131608, 1e-14);
}

TEST(Constants, ClosedFormsAtEpsOneHundredth) {
    const double K = 0.02, g1 = 1.0, g2 = 0.001, rho = 0.5, eps = 0.01;
    EXPECT_NEAR(constants::kappa(K, g1, g2, rho, eps), 0.040400008000160004, 1e-15);
    EXPECT_NEAR(constants::kappa_star(K, g1, g2, rho, eps), 0.0404166819477838, 1e-15);
    EXPECT_NEAR(constants::graph_lipschitz(K, g1, g2, rho, eps), 0.041684035362108121, 1e-15);
    EXPECT_NEAR(constants::tracking_c1(K, g1, g2, rho, eps), 1.042100884052703, 1e-14);
}

TEST(CheckAssumptions, ExampleWithDeclaredKIsOk) {
    const AssumptionReport r = check_assumptions(with_constants(0.02, 0.1));
    EXPECT_TRUE(r.ok);
    EXPECT_TRUE(r.tracking_ok);
    EXPECT_NEAR(r.eps_max, 22.9, 0.001);
    EXPECT_EQ(r.kappa, r.kappa1);
    EXPECT_NEAR(r.c2, 5.0, 1e-15);
}

TEST(CheckAssumptions, ExampleWithComputedKIsOkAtBothScales) {
    for (double eps : {0.1, 0.01}) {
        const AssumptionReport r = check_assumptions(example_model(0.1, 6.0, eps));
        EXPECT_TRUE(r.ok) << "eps=" << eps;
        EXPECT_TRUE(r.tracking_ok) << "eps=" << eps;
    }
}

TEST(CheckAssumptions, GapViolationIsReported) {
    SlowFastModel m = with_constants(1.0, 0.1);
    const AssumptionReport r = check_assumptions(m);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(std::find(r.violations.begin(), r.violations.end(), "gap condition"), r.violations.end());
    EXPECT_THROW(require_assumptions(r), AssumptionError);
}

TEST(CheckAssumptions, EpsBoundViolationIsReported) {
    SlowFastModel m = with_constants(0.4, 0.9);
    const AssumptionReport r = check_assumptions(m);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(std::find(r.violations.begin(), r.violations.end(), "eps bound"), r.violations.end());
}

TEST(CheckAssumptions, SpectralViolationIsReported) {
    SlowFastModel m = with_constants(0.02, 0.1);
    m.A = Mat::Constant(1, 1, -0.5);
    const AssumptionReport r = check_assumptions(m);
    EXPECT_FALSE(r.ok);
    EXPECT_NE(std::find(r.violations.begin(), r.violations.end(), "spectral condition (fast)"), r.violations.end());
}

TEST(CheckAssumptions, DegenerateScaleIsValidationError) {
    EXPECT_THROW(check_assumptions(with_constants(0.02, 0.0)), ValidationError);
    SlowFastModel m = with_constants(0.02, 0.1);
    m.rho = std::nan("");
    EXPECT_THROW(check_assumptions(m), ValidationError);
}

TEST(CheckAssumptions, IsPure) {
    const SlowFastModel m = example_model(0.1);
    const AssumptionReport a = check_assumptions(m);
    const AssumptionReport b = check_assumptions(m);
    EXPECT_EQ(a.kappa, b.kappa);
    EXPECT_EQ(a.kappa_star, b.kappa_star);
    EXPECT_EQ(a.violations, b.violations);
}

TEST(ExampleModel, OriginIsAnEquilibriumOfTheNonlinearities) {
    const SlowFastModel m = example_model(0.1);
    EXPECT_EQ(m.f(Vec::Zero(1), Vec::Zero(1))[0], 0.0);
    EXPECT_EQ(m.g(Vec::Zero(1), Vec::Zero(1), 0.1)[0], 0.0);
}

TEST(ExampleModel, FastNonlinearityInsideBall) {
    const SlowFastModel m = example_model(0.1);
    EXPECT_DOUBLE_EQ(m.f(Vec::Zero(1), Vec::Constant(1, 3.0))[0], 0.015);
    EXPECT_EQ(m.f(Vec::Constant(1, 0.4), Vec::Constant(1, -5.5))[0], 5.5 * 5.5 / 600.0);
    EXPECT_EQ(m.f(Vec::Zero(1), Vec::Constant(1, 12.5))[0], 0.0);
}

TEST(ExampleModel, SlowNonlinearityInsideBall) {
    const SlowFastModel m = example_model(0.3);
    EXPECT_DOUBLE_EQ(m.g(Vec::Constant(1, 0.2), Vec::Constant(1, 3.0), 0.3)[0], -0.3 * 0.2 * 3.0);
    EXPECT_EQ(m.B(0, 0), 0.001);
    EXPECT_EQ(m.A(0, 0), -1.0);
    EXPECT_EQ(m.sigma[0], 0.1);
}

TEST(ExampleModel, DeclaredKMatchesSupOfCutoffDerivative) {
    // sup |d/dv| of the cut-off fast nonlinearity at R = 6 (attained near v = 10.334)
    EXPECT_NEAR(example_model(0.1).K, 0.029205725904283912, 1e-7);
    EXPECT_GE(example_model(0.1).K, 0.029205725904283912);
}

TEST(ExampleModel, SampledLipschitzOfFastPartBelowDeclaredK) {
    const SlowFastModel m = example_model(0.1);
    const LipschitzSample s = sample_lipschitz(m, 12.0, 200000, 17);
    EXPECT_LE(s.f, m.K);
    EXPECT_GT(s.f, 0.9 * m.K);
    EXPECT_GT(s.g, 0.0);
}

TEST(Cutoff, BridgeShape) {
    EXPECT_EQ(bridge(0.0), 1.0);
    EXPECT_EQ(bridge(1.0), 1.0);
    EXPECT_EQ(bridge(2.0), 0.0);
    EXPECT_EQ(bridge(3.0), 0.0);
    EXPECT_DOUBLE_EQ(bridge(1.5), 0.5);
    for (double s = 1.0; s < 2.0; s += 0.01) EXPECT_GE(bridge(s), bridge(s + 0.01));
}

TEST(Cutoff, InnerBallUnchangedAndOuterZero) {
    const FastFn raw = [](const Vec&, const Vec& v) -> Vec { return Vec::Constant(1, v[0] * v[0] / 600.0); };
    const FastFn cut = cutoff(raw, 6.0);
    for (double v = -4.0; v <= 4.0; v += 0.37) {
        EXPECT_EQ(cut(Vec::Constant(1, 0.5), Vec::Constant(1, v))[0], raw(Vec::Constant(1, 0.5), Vec::Constant(1, v))[0]);
    }
    EXPECT_EQ(cut(Vec::Zero(1), Vec::Constant(1, 12.0))[0], 0.0);
    EXPECT_EQ(cut(Vec::Constant(1, 9.0), Vec::Constant(1, 9.0))[0], 0.0);
    EXPECT_THROW(cutoff(raw, 0.0), ValidationError);
}

TEST(Cutoff, GlobalLipschitzOfCutSquareIsFinite) {
    const FastFn raw = [](const Vec&, const Vec& v) -> Vec { return Vec::Constant(1, v[0] * v[0] / 600.0); };
    const FastFn cut = cutoff(raw, 6.0);
    double best = 0.0;
    const double h = 1e-5;
    for (double v = 0.0; v <= 14.0; v += 1e-3) {
        const double d = (cut(Vec::Zero(1), Vec::Constant(1, v + h))[0] - cut(Vec::Zero(1), Vec::Constant(1, v))[0]) / h;
        best = std::max(best, std::abs(d));
    }
    EXPECT_NEAR(best, 0.029205725904283912, 1e-6);
}

TEST(Registry, KnownNamesAndUnknownRejected) {
    for (const auto& n : registered_nonlinearity_names()) EXPECT_NO_THROW(registered_nonlinearity(n, 6.0));
    EXPECT_THROW(registered_nonlinearity("nope", 6.0), ConfigError);
}
