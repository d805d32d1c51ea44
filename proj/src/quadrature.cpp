#include "dito/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dito {

GaussHermiteRule gauss_hermite(int points) {
    if (points < 1) throw InvalidArgument("gauss_hermite: need at least one point");
    const int n = points;
    const double pi_m4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        // Asymptotic starting guesses for the largest roots, then extrapolation.
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pi_m4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        x[static_cast<std::size_t>(i)] = z;
        x[static_cast<std::size_t>(n - 1 - i)] = -z;
        w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] = 2.0 / (pp * pp);
    }
    GaussHermiteRule rule;
    rule.nodes.assign(x.rbegin(), x.rend());
    rule.weights.assign(w.rbegin(), w.rend());
    return rule;
}

double gaussian_expectation(const std::function<double(const Point&)>& f, int dim, int points) {
    if (dim < 1 || dim > kMaxQuadratureDim) {
        throw InvalidArgument("gaussian_expectation: tensor quadrature supports 1 to 3 dimensions");
    }
    const GaussHermiteRule rule = gauss_hermite(points);
    const double norm = std::pow(std::numbers::pi, -0.5 * dim);
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    Point z(dim);
    double total = 0.0;
    while (true) {
        double weight = norm;
        for (int d = 0; d < dim; ++d) {
            const auto i = static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]);
            z(d) = std::numbers::sqrt2 * rule.nodes[i];
            weight *= rule.weights[i];
        }
        total += weight * f(z);
        int d = 0;
        while (d < dim && ++idx[static_cast<std::size_t>(d)] == points) idx[static_cast<std::size_t>(d++)] = 0;
        if (d == dim) break;
    }
    return total;
}

}  // namespace dito
