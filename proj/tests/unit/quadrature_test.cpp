#include "dito/loglog.hpp"
#include "dito/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace dito;

TEST(Quadrature, RuleIsSymmetricAndNormalized) {
    for (int m : {1, 2, 5, 20, 64}) {
        const GaussHermiteRule r = gauss_hermite(m);
        ASSERT_EQ(r.nodes.size(), static_cast<std::size_t>(m));
        double w = 0.0;
        for (int i = 0; i < m; ++i) {
            w += r.weights[static_cast<std::size_t>(i)];
            EXPECT_NEAR(r.nodes[static_cast<std::size_t>(i)], -r.nodes[static_cast<std::size_t>(m - 1 - i)], 1e-12);
            if (i > 0) EXPECT_LT(r.nodes[static_cast<std::size_t>(i - 1)], r.nodes[static_cast<std::size_t>(i)]);
        }
        EXPECT_NEAR(w, std::sqrt(std::numbers::pi), 1e-12);
    }
}

TEST(Quadrature, KnownSmallRule) {
    // Two-point rule: nodes +-1/sqrt(2), weights sqrt(pi)/2.
    const GaussHermiteRule r = gauss_hermite(2);
    EXPECT_NEAR(r.nodes[1], 1.0 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(r.weights[0], std::sqrt(std::numbers::pi) / 2, 1e-14);
}

TEST(Quadrature, GaussianMoments) {
    auto power = [](int p) { return [p](const Point& z) { return std::pow(z(0), p); }; };
    EXPECT_NEAR(gaussian_expectation(power(2), 1), 1.0, 1e-12);
    EXPECT_NEAR(gaussian_expectation(power(4), 1), 3.0, 1e-11);
    EXPECT_NEAR(gaussian_expectation(power(6), 1), 15.0, 1e-10);
    EXPECT_NEAR(gaussian_expectation(power(3), 1), 0.0, 1e-12);
    // Exact degree 2m - 1 with m = 4 points.
    EXPECT_NEAR(gaussian_expectation(power(6), 1, 4), 15.0, 1e-11);
}

TEST(Quadrature, ExponentialInSeveralDimensions) {
    for (int dim = 1; dim <= 3; ++dim) {
        Point a(dim);
        for (int i = 0; i < dim; ++i) a(i) = 0.3 + 0.2 * i;
        const double v = gaussian_expectation([&](const Point& z) { return std::exp(a.dot(z)); }, dim, 32);
        EXPECT_NEAR(v, std::exp(0.5 * a.squaredNorm()), 1e-12);
    }
    EXPECT_THROW(gaussian_expectation([](const Point&) { return 1.0; }, 4), InvalidArgument);
}

TEST(LogLog, RecoversPowerLaw) {
    const double x[] = {16, 32, 64, 128};
    double y[4];
    for (int i = 0; i < 4; ++i) y[i] = 3.0 * std::pow(x[i], -0.75);
    const LogLogFit f = fit_loglog(x, y);
    EXPECT_NEAR(f.slope, -0.75, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
    const double bad[] = {1, 0, 1, 1};
    EXPECT_THROW(fit_loglog(x, bad), InvalidArgument);
}
