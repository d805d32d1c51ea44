#include "dito/market.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dito;
using namespace dito::testing;

TEST(Market, PayoffMatrixRows) {
    const OrthoBasis b = make_cyclic(2);
    const MarketModel m = harmonic_model(b, 9);
    const Point x = Point::Constant(2, 0.5);
    const StateMatrix H = m.payoff_matrix(1.0, x);
    for (int i = 0; i <= 2; ++i) {
        EXPECT_DOUBLE_EQ(H(i, 0), 1.0);
        for (int k = 0; k < 2; ++k) EXPECT_NEAR(H(i, k + 1), x(k) + b.jump(i)(k) / 3.0, 1e-15);
    }
}

TEST(Market, HarmonicStatePricesAreProbabilities) {
    const double probs[] = {0.5, 0.3, 0.2};
    for (const OrthoBasis& b : {make_binomial(), make_cyclic(3), make_from_probs(probs)}) {
        const MarketModel m = harmonic_model(b, 16);
        const StepMatrices s = step_matrices(m, 0.25, Point::Constant(b.n(), 0.1));
        EXPECT_NEAR(s.A, 1.0, 1e-13);
        for (int j = 0; j <= b.n(); ++j) EXPECT_NEAR(s.state_prices(j), b.prob(j), 1e-13);
        EXPECT_TRUE(s.complete());
        EXPECT_TRUE(s.arbitrage_free());
        EXPECT_FALSE(s.positive_interest());
    }
}

TEST(Market, HarmonicCoefficientsVanish) {
    const MarketModel m = harmonic_model(make_cyclic(2), 16);
    const PdeCoefficients c = pde_coefficients(m, 0.5, Point::Constant(2, -0.2));
    EXPECT_NEAR(c.c, 0.0, 1e-12);
    EXPECT_LE(c.b.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Market, BlackScholesDiscountIsExponential) {
    for (int n = 1; n <= 2; ++n) {
        const int N = 12;
        const MarketModel m = bs_model(n, N);
        const StepMatrices s = step_matrices(m, 0.5, Point::Constant(n, 0.3));
        EXPECT_NEAR(s.A, std::exp(-0.05 / N), 1e-13);
        EXPECT_TRUE(s.positive_interest());
        EXPECT_TRUE(s.arbitrage_free());
    }
}

TEST(Market, BlackScholesCoefficientsApproachLimit) {
    const BlackScholesParams p = bs1_params();
    const PdeCoefficients limit = black_scholes_limit_coefficients(p);
    EXPECT_NEAR(limit.c, 0.05, 1e-15);
    EXPECT_NEAR(limit.b(0), 0.0, 1e-15);
    double prev = 1.0;
    for (int N : {16, 64, 256, 1024}) {
        const PdeCoefficients c = pde_coefficients(make_black_scholes(make_binomial(), N, p), 0.5, Point::Zero(1));
        const double defect = std::abs(c.c - limit.c) + (c.b - limit.b).norm();
        EXPECT_LT(defect, prev);
        prev = defect;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Market, LimitCoefficientsSolveLinearSystem) {
    BlackScholesParams p;
    p.r = 0.03;
    p.sigma = Eigen::MatrixXd(2, 2);
    p.sigma << 0.2, 0.05, -0.1, 0.3;
    p.mu = {0.01, -0.02};
    p.s0 = {1.0, 2.0};
    const PdeCoefficients c = black_scholes_limit_coefficients(p);
    for (int j = 0; j < 2; ++j) {
        const double rhs = 0.5 * p.sigma.row(j).squaredNorm() - p.mu[static_cast<std::size_t>(j)] - p.r;
        EXPECT_NEAR(p.sigma.row(j).dot(c.b), rhs, 1e-14);
    }
    const auto neutral = neutral_drift(p.sigma, p.r);
    p.mu = neutral;
    EXPECT_LE(black_scholes_limit_coefficients(p).b.norm(), 1e-14);
}

TEST(Market, IdentitiesOnRandomGridPoints) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 1; n <= 2; ++n) {
        for (int trial = 0; trial < 25; ++trial) {
            const int N = 4 + trial;
            const MarketModel m = bs_model(n, N);
            Point x(n);
            for (int i = 0; i < n; ++i) x(i) = u(rng);
            const IdentityDefects d = sigma_pi_identity_check(m, 1.0 / N * (1 + trial % 5), x);
            EXPECT_LE(d.max(), 1e-9) << n << ' ' << trial;
        }
    }
}

TEST(Market, IdentitiesOnPerturbedModel) {
    // A complete, arbitrage-free model that is not of Black-Scholes form.
    const OrthoBasis b = make_cyclic(2);
    std::vector<ScalarField> h{
        [](double t, const Point&) { return std::exp(0.04 * t); },
        [](double t, const Point& x) { return 100 * std::exp(0.2 * x(0) - 0.01 * t) + 3 * std::sin(x(1)); },
        [](double t, const Point& x) { return 50 * std::exp(0.3 * x(1) + 0.1 * x(0) - 0.02 * t); }};
    const MarketModel m(b, 20, h);
    const StepMatrices s = step_matrices(m, 0.5, Point::Constant(2, 0.1));
    ASSERT_TRUE(s.arbitrage_free());
    EXPECT_LE(sigma_pi_identity_check(m, 0.5, Point::Constant(2, 0.1)).max(), 1e-9);
}

TEST(Market, IncompleteModelThrows) {
    const OrthoBasis b = make_cyclic(2);
    std::vector<ScalarField> h{[](double, const Point&) { return 1.0; },
                               [](double, const Point& x) { return x(0); },
                               [](double, const Point& x) { return 2.0 * x(0); }};
    const MarketModel m(b, 4, h);
    const StepMatrices s = evaluate_step(m, 0.5, Point::Zero(2));
    EXPECT_FALSE(s.complete());
    EXPECT_THROW(step_matrices(m, 0.5, Point::Zero(2)), CompletenessError);
    EXPECT_THROW(pde_coefficients(m, 0.5, Point::Zero(2)), CompletenessError);
}

TEST(Market, ArbitrageModelThrows) {
    // A drift of 10 per unit time cannot be matched by a +-1/2 binomial move at N = 4.
    std::vector<ScalarField> h{[](double, const Point&) { return 1.0; },
                               [](double t, const Point& x) { return x(0) + 10.0 * t; }};
    const MarketModel m(make_binomial(), 4, h);
    const StepMatrices s = evaluate_step(m, 0.5, Point::Zero(1));
    EXPECT_TRUE(s.complete());
    EXPECT_FALSE(s.arbitrage_free());
    EXPECT_THROW(step_matrices(m, 0.5, Point::Zero(1)), ArbitrageError);
}

TEST(Market, RejectsBadConstruction) {
    EXPECT_THROW(MarketModel(make_cyclic(2), 4, {}), InvalidArgument);
    EXPECT_THROW(harmonic_model(make_binomial(), 0), InvalidArgument);
    BlackScholesParams p = bs1_params();
    p.s0 = {-1.0};
    EXPECT_THROW(p.check(), InvalidArgument);
}

TEST(Market, StepBeforeFirstPeriodIsRejected) {
    const MarketModel m = bs_model(1, 4);
    EXPECT_THROW(step_matrices(m, 0.1, Point::Zero(1)), InvalidArgument);
}
