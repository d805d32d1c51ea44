#include "dito/calculus.hpp"

#include "dito/loglog.hpp"

#include <algorithm>
#include <cmath>

namespace dito {

StateVector stencil_values(const OrthoBasis& basis, int N, const ScalarField& f, double t, const Point& x) {
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    StateVector out(basis.states());
    for (int j = 0; j < basis.states(); ++j) {
        const Point y = x + s * basis.jump(j);
        out(j) = f(t, y);
    }
    return out;
}

double gradient_from_values(const OrthoBasis& basis, int N, int k, const StateVector& neighbors) {
    if (k < 1 || k > basis.n()) throw InvalidArgument("d_k: direction out of range");
    double sum = 0.0;
    for (int j = 0; j < basis.states(); ++j) sum += neighbors(j) * basis.entry(0, j) * basis.entry(k, j);
    return std::sqrt(static_cast<double>(N)) * sum;
}

double laplacian_from_values(const OrthoBasis& basis, int N, double center, const StateVector& neighbors) {
    double sum = 0.0;
    for (int j = 0; j < basis.states(); ++j) sum += (neighbors(j) - center) * basis.prob(j);
    return 2.0 * N * sum;
}

double d_k(const OrthoBasis& basis, int N, const ScalarField& f, int k, double t, const Point& x) {
    return gradient_from_values(basis, N, k, stencil_values(basis, N, f, t, x));
}

Point gradient_N(const OrthoBasis& basis, int N, const ScalarField& f, double t, const Point& x) {
    const StateVector v = stencil_values(basis, N, f, t, x);
    Point g(basis.n());
    for (int k = 1; k <= basis.n(); ++k) g(k - 1) = gradient_from_values(basis, N, k, v);
    return g;
}

double laplacian_N(const OrthoBasis& basis, int N, const ScalarField& f, double t, const Point& x) {
    return laplacian_from_values(basis, N, f(t, x), stencil_values(basis, N, f, t, x));
}

double dt_N(int N, const ScalarField& f, double t, const Point& x) {
    const double dt = 1.0 / N;
    // Grid times are k/N; allow for the rounding in forming them.
    if (t < dt * (1.0 - 1e-12)) throw InvalidArgument("dt_N: need t >= 1/N");
    return N * (f(t, x) - f(t - dt, x));
}

double ItoDecomposition::rhs() const {
    double sum = 0.0;
    for (std::size_t u = 0; u < martingale_increments.size(); ++u) {
        sum += martingale_increments[u] + compensator_increments[u];
    }
    return sum;
}

double ItoDecomposition::relative_defect() const { return std::abs(lhs() - rhs()) / (1.0 + std::abs(lhs())); }

ItoDecomposition ito_decompose(const OrthoBasis& basis, const LatticeConfig& config, const ScalarField& f,
                               std::span<const int> path) {
    const int N = config.N;
    const double s = config.step();
    Point x = config.x0.size() ? config.x0 : Point::Zero(basis.n());
    if (x.size() != basis.n()) throw InvalidArgument("ito_decompose: x0 has the wrong dimension");

    ItoDecomposition out;
    out.start = f(0.0, x);
    out.martingale_increments.reserve(path.size());
    out.compensator_increments.reserve(path.size());
    for (std::size_t u = 1; u <= path.size(); ++u) {
        const int j = path[u - 1];
        if (j < 0 || j > basis.n()) throw InvalidArgument("ito_decompose: jump index out of range");
        const double t = static_cast<double>(u) / N;
        const StateVector nb = stencil_values(basis, N, f, t, x);
        const double center = f(t, x);

        double mart = 0.0;
        for (int k = 1; k <= basis.n(); ++k) {
            mart += gradient_from_values(basis, N, k, nb) * s * basis.jump(j)(k - 1);
        }
        const double drift = N * (center - f(t - 1.0 / N, x));
        const double comp = (0.5 * laplacian_from_values(basis, N, center, nb) + drift) / N;

        out.martingale_increments.push_back(mart);
        out.compensator_increments.push_back(comp);
        x = x + s * basis.jump(j);
    }
    out.end = f(static_cast<double>(path.size()) / N, x);
    return out;
}

double ThirdMomentTensor::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

ThirdMomentTensor third_moment_tensor(const OrthoBasis& basis) {
    const int n = basis.n();
    ThirdMomentTensor m(n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            for (int k = 1; k <= n; ++k) {
                double sum = 0.0;
                for (int l = 0; l <= n; ++l) {
                    sum += basis.entry(i, l) * basis.entry(j, l) * basis.entry(k, l) / basis.entry(0, l);
                }
                m(i - 1, j - 1, k - 1) = sum;
            }
        }
    }
    return m;
}

OrderEstimate consistency_order(const OrthoBasis& basis, const ScalarField& f, const GradientField& gradient,
                                const ScalarField& laplacian, double t, const Point& x,
                                std::span<const int> Ns) {
    if (Ns.size() < 4) throw InvalidArgument("consistency_order: need at least four values of N");
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        if (Ns[i] <= Ns[i - 1]) throw InvalidArgument("consistency_order: Ns must be strictly increasing");
    }
    OrderEstimate est;
    const Point grad = gradient(t, x);
    const double lap = laplacian(t, x);
    for (int N : Ns) {
        const StateVector nb = stencil_values(basis, N, f, t, x);
        double worst = 0.0;
        for (int k = 1; k <= basis.n(); ++k) {
            worst = std::max(worst, std::abs(gradient_from_values(basis, N, k, nb) - grad(k - 1)));
        }
        const double defect = worst + std::abs(laplacian_from_values(basis, N, f(t, x), nb) - lap);
        est.Ns.push_back(N);
        est.defects.push_back(defect);
    }
    est.exact = std::all_of(est.defects.begin(), est.defects.end(), [](double d) { return d < kExactDefect; });
    if (!est.exact) {
        std::vector<double> xs(est.Ns.begin(), est.Ns.end());
        // Defects that hit exact zero carry no rate information; floor them.
        std::vector<double> ys;
        for (double d : est.defects) ys.push_back(std::max(d, 1e-300));
        est.slope = fit_loglog(xs, ys).slope;
    }
    return est;
}

}  // namespace dito
