#include "dito/calculus.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dito;
using dito::testing::basis_for;

namespace {

ScalarField affine(const Point& a, double c) {
    return [a, c](double, const Point& x) { return a.dot(x) + c; };
}

}  // namespace

TEST(Calculus, GradientExactOnAffine) {
    for (int n = 1; n <= 5; ++n) {
        const OrthoBasis b = basis_for(n);
        Point a(n);
        for (int i = 0; i < n; ++i) a(i) = 0.7 * i - 1.3;
        const Point x = Point::Constant(n, 0.4);
        for (int N : {1, 4, 37}) {
            const Point g = gradient_N(b, N, affine(a, 2.5), 0.0, x);
            EXPECT_LE((g - a).cwiseAbs().maxCoeff(), 1e-13) << n << ' ' << N;
            EXPECT_NEAR(laplacian_N(b, N, affine(a, 2.5), 0.0, x), 0.0, 1e-12);
        }
    }
}

TEST(Calculus, LaplacianOfSquaredNormIsTwoN) {
    const double probs[] = {0.5, 0.3, 0.2};
    const OrthoBasis skew = make_from_probs(probs);
    auto sq = [](double, const Point& x) { return x.squaredNorm(); };
    for (int n = 1; n <= 5; ++n) {
        const OrthoBasis b = basis_for(n);
        for (int N : {1, 8, 100}) {
            EXPECT_NEAR(laplacian_N(b, N, sq, 0.0, Point::Constant(n, -0.3)), 2.0 * n, 1e-13 * N);
        }
    }
    EXPECT_NEAR(laplacian_N(skew, 16, sq, 0.0, Point::Constant(2, 0.1)), 4.0, 1e-12);
}

TEST(Calculus, DiscreteTimeDerivative) {
    auto f = [](double t, const Point& x) { return t * t + x(0); };
    // N (t^2 - (t - 1/N)^2) = 2t - 1/N
    EXPECT_NEAR(dt_N(10, f, 0.5, Point::Zero(1)), 0.9, 1e-12);
    EXPECT_THROW(dt_N(10, f, 0.05, Point::Zero(1)), InvalidArgument);
}

TEST(Calculus, ThirdMomentsCyclicTwo) {
    const ThirdMomentTensor m = third_moment_tensor(make_cyclic(2));
    // Brute force over the three equally likely jumps.
    const double taus[] = {1.0, 0.3660254037844386, -1.3660254037844386};
    double brute = 0.0;
    for (double t : taus) brute += t * t * t / 3.0;
    EXPECT_NEAR(brute, -0.5, 1e-12);
    EXPECT_NEAR(m(0, 0, 0), -0.5, 1e-12);
}

TEST(Calculus, ThirdMomentsMatchBruteForce) {
    for (int n = 1; n <= 5; ++n) {
        const OrthoBasis b = basis_for(n);
        const ThirdMomentTensor m = third_moment_tensor(b);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double brute = 0.0;
                    for (int l = 0; l <= n; ++l) brute += b.prob(l) * b.jump(l)(i) * b.jump(l)(j) * b.jump(l)(k);
                    EXPECT_NEAR(m(i, j, k), brute, 1e-12);
                }
        if (n == 1)
            EXPECT_LE(m.max_abs(), 1e-14);
        else
            EXPECT_GT(m.max_abs(), 1e-6);
    }
}

TEST(Calculus, ItoIdentityOnRandomPaths) {
    std::mt19937_64 rng(5);
    auto f = [](double t, const Point& x) { return std::exp(0.3 * t + x.sum() / 2) + std::sin(x(0)) * t; };
    for (int n = 1; n <= 4; ++n) {
        const OrthoBasis b = basis_for(n);
        std::uniform_int_distribution<int> jump(0, n);
        const LatticeConfig cfg{7, 3.0, Point::Constant(n, 0.2)};
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<int> path(15);
            for (int& j : path) j = jump(rng);
            EXPECT_LE(ito_decompose(b, cfg, f, path).relative_defect(), 1e-12);
        }
    }
}

TEST(Calculus, CompensatorIsMeanOfIncrement) {
    // E[f(t + 1/N, x + tau/sqrt N)] - f(t, x) equals the compensator increment, so the
    // martingale increment averages to zero under the basis law.
    const OrthoBasis b = make_cyclic(3);
    auto f = [](double t, const Point& x) { return std::cos(x(0) - x(2)) + t * x(1) * x(1); };
    const LatticeConfig cfg{5, 1.0, Point::Constant(3, 0.1)};
    double mean_mart = 0.0;
    for (int j = 0; j <= 3; ++j) {
        const int path[] = {j};
        mean_mart += b.prob(j) * ito_decompose(b, cfg, f, path).martingale_increments[0];
    }
    EXPECT_NEAR(mean_mart, 0.0, 1e-14);
}

TEST(Calculus, ItoRejectsBadJump) {
    const int path[] = {0, 3};
    EXPECT_THROW(ito_decompose(make_cyclic(2), LatticeConfig{4, 1.0, Point::Zero(2)},
                               [](double, const Point&) { return 0.0; }, path),
                 InvalidArgument);
}

TEST(Calculus, ConsistencyOrderHalfForTwoFactors) {
    auto f = [](double, const Point& x) { return std::exp(x(0) + x(1)); };
    auto g = [](double, const Point& x) -> Point { return Point::Constant(2, std::exp(x(0) + x(1))); };
    auto lap = [](double, const Point& x) { return 2.0 * std::exp(x(0) + x(1)); };
    const OrderEstimate est = consistency_order(make_cyclic(2), f, g, lap, 0.0, Point::Zero(2));
    EXPECT_FALSE(est.exact);
    EXPECT_NEAR(est.slope, -0.5, 0.1);
}

TEST(Calculus, ConsistencyOrderOneForBinomial) {
    auto f = [](double, const Point& x) { return std::exp(x(0)); };
    auto g = [](double, const Point& x) -> Point { return Point::Constant(1, std::exp(x(0))); };
    auto lap = [](double, const Point& x) { return std::exp(x(0)); };
    const OrderEstimate est = consistency_order(make_binomial(), f, g, lap, 0.0, Point::Zero(1));
    EXPECT_NEAR(est.slope, -1.0, 0.1);
}

TEST(Calculus, QuadraticGradientDefectIsThirdMoment) {
    // d_k |x|^2 = 2 x_k + N^{-1/2} E[tau_k |tau|^2]; the Laplacian is exact.
    const OrthoBasis b = make_cyclic(3);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        double m = 0.0;
        for (int l = 0; l <= 3; ++l) m += b.prob(l) * b.jump(l)(k) * b.jump(l).squaredNorm();
        worst = std::max(worst, std::abs(m));
    }
    auto f = [](double, const Point& x) { return x.squaredNorm(); };
    auto g = [](double, const Point& x) -> Point { return 2.0 * x; };
    auto lap = [](double, const Point&) { return 6.0; };
    const OrderEstimate est = consistency_order(make_cyclic(3), f, g, lap, 0.0, Point::Constant(3, 0.5));
    for (std::size_t i = 0; i < est.Ns.size(); ++i) {
        EXPECT_NEAR(est.defects[i] * std::sqrt(est.Ns[i]), worst, 1e-10);
    }
    if (worst > 1e-12) EXPECT_NEAR(est.slope, -0.5, 1e-6);
}

TEST(Calculus, ConsistencyOrderNeedsFourIncreasingNs) {
    auto f = [](double, const Point& x) { return x(0); };
    auto g = [](double, const Point&) -> Point { return Point::Ones(1); };
    auto lap = [](double, const Point&) { return 0.0; };
    const int few[] = {16, 32, 64};
    const int unsorted[] = {16, 64, 32, 128};
    EXPECT_THROW(consistency_order(make_binomial(), f, g, lap, 0.0, Point::Zero(1), few), InvalidArgument);
    EXPECT_THROW(consistency_order(make_binomial(), f, g, lap, 0.0, Point::Zero(1), unsorted), InvalidArgument);
    EXPECT_TRUE(consistency_order(make_binomial(), f, g, lap, 0.0, Point::Zero(1)).exact);
}
