#include "dito/harness.hpp"

#include "dito/loglog.hpp"
#include "dito/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dito {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Log of the exponential coordinate at the terminal date, for a start point m.
double log_spot(const PayoffSpec& p, const Point& m, double horizon) {
    return std::log(p.s0) + p.loading.dot(m) - p.mu * horizon;
}

double option_value(const PayoffSpec& p, double log_mean, double stdev) {
    if (stdev <= 0.0) {
        const double s = std::exp(log_mean);
        switch (p.kind) {
            case PayoffKind::Call: return std::max(s - p.strike, 0.0);
            case PayoffKind::Put: return std::max(p.strike - s, 0.0);
            default: return s > p.strike ? p.level : 0.0;
        }
    }
    const double d2 = (log_mean - std::log(p.strike)) / stdev;
    const double d1 = d2 + stdev;
    const double forward = std::exp(log_mean + 0.5 * stdev * stdev);
    switch (p.kind) {
        case PayoffKind::Call: return forward * normal_cdf(d1) - p.strike * normal_cdf(d2);
        case PayoffKind::Put: return p.strike * normal_cdf(-d2) - forward * normal_cdf(-d1);
        default: return p.level * normal_cdf(d2);
    }
}

bool in_window(const Point& x, const Point& x0, double window) {
    return (x - x0).cwiseAbs().maxCoeff() <= window + 1e-12;
}

}  // namespace

PayoffKind parse_payoff_kind(const std::string& name) {
    if (name == "const") return PayoffKind::Constant;
    if (name == "smooth-exp" || name == "bump") return PayoffKind::GaussianBump;
    if (name == "call") return PayoffKind::Call;
    if (name == "put") return PayoffKind::Put;
    if (name == "digital") return PayoffKind::Digital;
    throw InvalidArgument("unknown payoff '" + name + "'");
}

std::string to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::Constant: return "const";
        case PayoffKind::GaussianBump: return "smooth-exp";
        case PayoffKind::Call: return "call";
        case PayoffKind::Put: return "put";
        case PayoffKind::Digital: return "digital";
        case PayoffKind::Custom: return "custom";
    }
    return "custom";
}

Payoff PayoffSpec::payoff(double horizon) const {
    const PayoffSpec p = *this;
    switch (kind) {
        case PayoffKind::Constant:
            return [level = level](const Point&) { return level; };
        case PayoffKind::GaussianBump:
            return [p](const Point& x) {
                const Point c = p.center.size() ? p.center : Point::Zero(x.size());
                return std::exp(-(x - c).squaredNorm() / (p.width * p.width));
            };
        case PayoffKind::Call:
        case PayoffKind::Put:
        case PayoffKind::Digital:
            return [p, horizon](const Point& x) { return option_value(p, log_spot(p, x, horizon), 0.0); };
        case PayoffKind::Custom:
            if (!custom) throw InvalidArgument("custom payoff has no function");
            return custom;
    }
    throw InvalidArgument("unknown payoff kind");
}

PayoffSpec option_payoff(PayoffKind kind, const BlackScholesParams& params, int asset, double strike) {
    if (kind != PayoffKind::Call && kind != PayoffKind::Put && kind != PayoffKind::Digital) {
        throw InvalidArgument("option_payoff: kind must be call, put or digital");
    }
    if (asset < 1 || asset > params.n()) throw InvalidArgument("option_payoff: asset out of range");
    PayoffSpec p;
    p.kind = kind;
    p.strike = strike;
    p.loading = params.sigma.row(asset - 1).transpose();
    p.s0 = params.s0[static_cast<std::size_t>(asset - 1)];
    p.mu = params.mu[static_cast<std::size_t>(asset - 1)];
    return p;
}

void ReferenceProblem::check() const {
    if (b.size() < 1) throw InvalidArgument("reference problem: b must be set");
    if (c < 0.0) throw InvalidArgument("reference problem: c must be nonnegative");
    if (!(T > 0.0)) throw InvalidArgument("reference problem: T must be positive");
    if (x0.size() != b.size()) throw InvalidArgument("reference problem: x0 has the wrong dimension");
}

double pde_oracle_quadrature(const ReferenceProblem& problem, double t, const Point& x, int points) {
    const double s = std::max(problem.T - t, 0.0);
    const Point m = x - problem.b * s;
    const Payoff phi = problem.payoff.payoff(problem.T);
    const double root_s = std::sqrt(s);
    const double mean = gaussian_expectation([&](const Point& z) { return phi(m + root_s * z); }, problem.n(), points);
    return std::exp(-problem.c * s) * mean;
}

double pde_oracle(const ReferenceProblem& problem, double t, const Point& x) {
    const double s = std::max(problem.T - t, 0.0);
    const double discount = std::exp(-problem.c * s);
    const Point m = x - problem.b * s;
    const PayoffSpec& p = problem.payoff;
    switch (p.kind) {
        case PayoffKind::Constant:
            return discount * p.level;
        case PayoffKind::GaussianBump: {
            // Per axis: E exp(-(a + sqrt(s) Z)^2 / w^2) = (1 + 2s/w^2)^{-1/2} exp(-a^2 / (w^2 + 2s)).
            const double w2 = p.width * p.width;
            const Point c = p.center.size() ? p.center : Point::Zero(m.size());
            double value = 1.0;
            for (int i = 0; i < m.size(); ++i) {
                const double a = m(i) - c(i);
                value *= std::exp(-a * a / (w2 + 2.0 * s)) / std::sqrt(1.0 + 2.0 * s / w2);
            }
            return discount * value;
        }
        case PayoffKind::Call:
        case PayoffKind::Put:
        case PayoffKind::Digital:
            return discount * option_value(p, log_spot(p, m, problem.T), p.loading.norm() * std::sqrt(s));
        case PayoffKind::Custom:
            return pde_oracle_quadrature(problem, t, x);
    }
    throw InvalidArgument("unknown payoff kind");
}

ConvergenceReport run_convergence(const ModelFamily& family, const ReferenceProblem& problem,
                                  std::span<const int> Ns, double expected_order) {
    problem.check();
    if (Ns.size() < 4) throw InvalidArgument("run_convergence: need at least four values of N");
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        if (Ns[i] <= Ns[i - 1]) throw InvalidArgument("run_convergence: Ns must be strictly increasing");
    }

    ConvergenceReport report;
    report.expected_order = expected_order;
    for (int N : Ns) {
        const MarketModel model = family(N);
        if (model.n() != problem.n()) throw InvalidArgument("run_convergence: model and problem dimensions differ");
        const LatticeConfig config{N, problem.T, problem.x0};
        const Lattice lattice(model.basis(), config);

        ReferenceProblem at_horizon = problem;
        at_horizon.T = config.horizon();
        const Claim claim{problem.payoff.payoff(at_horizon.T)};

        double sup_error = 0.0;
        auto visit = [&](int k, std::span<const double> values) {
            const double t = config.time(k);
            lattice.for_each_node(k, [&](std::uint64_t r, const Counts& c) {
                const Point x = lattice.position(c);
                if (!in_window(x, problem.x0, problem.window)) return;
                sup_error = std::max(sup_error, std::abs(values[r] - pde_oracle(at_horizon, t, x)));
            });
        };
        const PriceGrid grid = price_backward(model, claim, config, visit, SweepOptions{false, false});

        report.Ns.push_back(N);
        report.errors.push_back(sup_error);
        report.min_discount.push_back(grid.min_discount);
        report.max_discount.push_back(grid.max_discount);
        if (!(grid.min_discount > 0.0 && grid.max_discount < 1.0)) report.positive_interest = false;
    }

    report.exact = std::all_of(report.errors.begin(), report.errors.end(), [](double e) { return e < 1e-13; });
    if (report.exact) {
        report.pass = true;
        return report;
    }
    std::vector<double> xs(report.Ns.begin(), report.Ns.end());
    std::vector<double> ys;
    for (double e : report.errors) ys.push_back(std::max(e, 1e-300));
    report.slope = fit_loglog(xs, ys).slope;
    report.pass = std::abs(report.slope + expected_order) <= kOrderTolerance;
    return report;
}

CoefficientReport coefficient_consistency(const ModelFamily& family, const PdeCoefficients& limit,
                                          const ReferenceProblem& problem, std::span<const int> Ns) {
    problem.check();
    CoefficientReport report;
    for (int N : Ns) {
        const MarketModel model = family(N);
        const LatticeConfig config{N, problem.T, problem.x0};
        const Lattice lattice(model.basis(), config);
        const int K = lattice.depth();
        const int stride = std::max(1, K / 32);

        double worst = 0.0;
        for (int k = 0; k < K; k += stride) {
            const double t = config.time(k + 1);
            lattice.for_each_node(k, [&](std::uint64_t, const Counts& c) {
                const Point x = lattice.position(c);
                if (!in_window(x, problem.x0, problem.window)) return;
                const PdeCoefficients coef = pde_coefficients(model, t, x);
                worst = std::max(worst, (limit.b - coef.b).norm() + std::abs(limit.c - coef.c));
            });
        }
        report.Ns.push_back(N);
        report.scaled_defects.push_back(std::sqrt(static_cast<double>(N)) * worst);
    }
    const bool all_zero = std::all_of(report.scaled_defects.begin(), report.scaled_defects.end(),
                                      [](double d) { return d < 1e-12; });
    if (all_zero || report.Ns.size() < 2) {
        report.bounded = true;
        return report;
    }
    std::vector<double> xs(report.Ns.begin(), report.Ns.end());
    std::vector<double> ys;
    for (double d : report.scaled_defects) ys.push_back(std::max(d, 1e-300));
    report.growth = fit_loglog(xs, ys).slope;
    report.bounded = report.growth <= 0.1;
    return report;
}

BlackScholesParams bs1_params() {
    BlackScholesParams p;
    p.r = 0.05;
    p.sigma = Eigen::MatrixXd::Constant(1, 1, 0.2);
    p.mu = neutral_drift(p.sigma, p.r);
    p.s0 = {100.0};
    return p;
}

BlackScholesParams bs2_params() {
    BlackScholesParams p;
    p.r = 0.05;
    p.sigma = Eigen::MatrixXd::Zero(2, 2);
    p.sigma(0, 0) = 0.2;
    p.sigma(1, 1) = 0.3;
    p.mu = neutral_drift(p.sigma, p.r);
    p.s0 = {100.0, 100.0};
    return p;
}

ModelFamily black_scholes_family(const OrthoBasis& basis, const BlackScholesParams& params) {
    params.check();
    return [basis, params](int N) { return make_black_scholes(basis, N, params); };
}

ReferenceProblem black_scholes_problem(const BlackScholesParams& params, PayoffSpec payoff, double T,
                                       const Point& x0, double window) {
    const PdeCoefficients limit = black_scholes_limit_coefficients(params);
    ReferenceProblem problem;
    problem.b = limit.b;
    problem.c = limit.c;
    problem.payoff = std::move(payoff);
    problem.T = T;
    problem.x0 = x0.size() ? x0 : Point::Zero(params.n());
    problem.window = window;
    return problem;
}

}  // namespace dito
