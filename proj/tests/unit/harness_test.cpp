#include "dito/harness.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dito;
using namespace dito::testing;

namespace {

// Composite Simpson on [a, b] with an even number of panels.
template <typename F>
double simpson(F f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

ReferenceProblem bump_problem(int n) {
    ReferenceProblem p;
    p.b = Point::Constant(n, 0.1);
    p.c = 0.05;
    p.payoff.kind = PayoffKind::GaussianBump;
    p.payoff.width = 0.8;
    p.payoff.center = Point::Constant(n, 0.2);
    p.T = 1.0;
    p.x0 = Point::Zero(n);
    return p;
}

}  // namespace

TEST(Harness, ParsePayoffNames) {
    for (auto k : {PayoffKind::Constant, PayoffKind::GaussianBump, PayoffKind::Call, PayoffKind::Put,
                   PayoffKind::Digital}) {
        EXPECT_EQ(parse_payoff_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_payoff_kind("asian"), InvalidArgument);
}

TEST(Harness, BumpClosedFormMatchesQuadrature) {
    for (int n = 1; n <= 3; ++n) {
        const ReferenceProblem p = bump_problem(n);
        for (double t : {0.0, 0.4, 0.99}) {
            const Point x = Point::Constant(n, 0.3 * t - 0.1);
            EXPECT_NEAR(pde_oracle(p, t, x), pde_oracle_quadrature(p, t, x), 1e-8) << n << ' ' << t;
        }
        EXPECT_NEAR(pde_oracle(p, 1.0, Point::Constant(n, 0.2)), 1.0, 1e-15);
    }
}

TEST(Harness, CustomPayoffUsesQuadrature) {
    ReferenceProblem p = bump_problem(2);
    p.payoff.kind = PayoffKind::Custom;
    p.payoff.custom = [](const Point& x) { return std::exp(x(0) - x(1)); };
    // E exp(m0 - m1 + Z0 - Z1) = exp(m0 - m1 + s).
    const double s = 0.6;
    const Point x = Point::Constant(2, 0.25);
    EXPECT_NEAR(pde_oracle(p, 1.0 - s, x), std::exp(-0.05 * s) * std::exp(s), 1e-12);
}

TEST(Harness, CallClosedFormMatchesIndependentIntegral) {
    const BlackScholesParams params = bs1_params();
    const ReferenceProblem p = black_scholes_problem(params, option_payoff(PayoffKind::Call, params, 1, 105.0),
                                                     1.0, Point::Zero(1), 1.0);
    for (double x : {-0.5, 0.0, 0.7}) {
        const double s = 1.0;
        // Payoff in z: (100 exp(0.2 (x + z sqrt s) - mu) - K)^+ against the normal density,
        // integrated separately on each side of the kink.
        const double mu = params.mu[0];
        const double kink = ((std::log(105.0 / 100.0) + mu) / 0.2 - x) / std::sqrt(s);
        auto integrand = [&](double z) {
            const double v = 100.0 * std::exp(0.2 * (x + z * std::sqrt(s)) - mu) - 105.0;
            return std::max(v, 0.0) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        };
        const double integral = simpson(integrand, kink, 14.0, 200000);
        const double expect = std::exp(-params.r * s) * integral;
        EXPECT_NEAR(pde_oracle(p, 0.0, Point::Constant(1, x)), expect, 1e-10) << x;
    }
    // And against the textbook formula at the spot.
    EXPECT_NEAR(pde_oracle(p, 0.0, Point::Zero(1)), black_scholes_call(100.0, 105.0, 0.05, 0.2, 1.0), 1e-10);
}

TEST(Harness, PutAndDigitalParity) {
    const BlackScholesParams params = bs2_params();
    auto problem = [&](PayoffKind k) {
        return black_scholes_problem(params, option_payoff(k, params, 2, 90.0), 0.8, Point::Zero(2), 1.0);
    };
    const Point x = Point::Constant(2, 0.1);
    const double call = pde_oracle(problem(PayoffKind::Call), 0.3, x);
    const double put = pde_oracle(problem(PayoffKind::Put), 0.3, x);
    // Forward of asset 2 is its current price h^2(t, x) discounted at r: S(t, x) - K e^{-r s}.
    const double spot = 100.0 * std::exp(0.3 * x(1) - params.mu[1] * 0.3);
    EXPECT_NEAR(call - put, spot - 90.0 * std::exp(-0.05 * 0.5), 1e-10);
    const double digital = pde_oracle(problem(PayoffKind::Digital), 0.3, x);
    EXPECT_GT(digital, 0.0);
    EXPECT_LT(digital, std::exp(-0.05 * 0.5));
}

TEST(Harness, ConstantPayoffIsExact) {
    const BlackScholesParams params = bs1_params();
    PayoffSpec one;
    one.kind = PayoffKind::Constant;
    const ReferenceProblem p = black_scholes_problem(params, one, 0.97, Point::Zero(1), 1.0);
    const int Ns[] = {16, 32, 64, 128};
    const ConvergenceReport r = run_convergence(black_scholes_family(make_binomial(), params), p, Ns, 1.0);
    EXPECT_TRUE(r.exact);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.positive_interest);
}

TEST(Harness, BinomialOrderOne) {
    const BlackScholesParams params = bs1_params();
    PayoffSpec bump;
    bump.width = 1.0;
    const ReferenceProblem p = black_scholes_problem(params, bump, 1.0, Point::Zero(1), 1.0);
    const int Ns[] = {16, 32, 64, 128, 256};
    const ConvergenceReport r = run_convergence(black_scholes_family(make_binomial(), params), p, Ns, 1.0);
    EXPECT_TRUE(r.pass) << r.slope;
    // The same errors cannot pass for the half order.
    const ConvergenceReport wrong = run_convergence(black_scholes_family(make_binomial(), params), p, Ns, 0.5);
    EXPECT_FALSE(wrong.pass);
}

TEST(Harness, RejectsMismatchedDimensions) {
    const ReferenceProblem p = bump_problem(2);
    const int Ns[] = {16, 32, 64, 128};
    EXPECT_THROW(run_convergence(black_scholes_family(make_binomial(), bs1_params()), p, Ns, 1.0), InvalidArgument);
    const int few[] = {16, 32};
    EXPECT_THROW(run_convergence(black_scholes_family(make_binomial(), bs1_params()), bump_problem(1), few, 1.0),
                 InvalidArgument);
}

TEST(Harness, CoefficientDefectScalesLikeInverseRoot) {
    const BlackScholesParams params = bs1_params();
    const ReferenceProblem p = black_scholes_problem(params, PayoffSpec{}, 1.0, Point::Zero(1), 1.0);
    const int Ns[] = {16, 64, 256};
    const CoefficientReport r =
        coefficient_consistency(black_scholes_family(make_binomial(), params), black_scholes_limit_coefficients(params),
                                p, Ns);
    EXPECT_TRUE(r.bounded) << r.growth;
    EXPECT_EQ(r.scaled_defects.size(), 3u);
}

TEST(Harness, ShippedFamilies) {
    EXPECT_EQ(bs1_params().n(), 1);
    EXPECT_EQ(bs2_params().n(), 2);
    EXPECT_LE(black_scholes_limit_coefficients(bs2_params()).b.norm(), 1e-14);
    EXPECT_THROW(black_scholes_family(make_cyclic(2), bs1_params())(16), InvalidArgument);
}
