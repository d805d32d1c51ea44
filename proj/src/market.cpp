#include "dito/market.hpp"

#include "dito/calculus.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dito {

namespace {

// Row vector y with y M = row, from the LU of M.
StateRow left_solve(Eigen::PartialPivLU<StateMatrix>& lu, const StateRow& row) {
    const StateVector y = lu.transpose().solve(row.transpose());
    return y.transpose();
}

std::string where(double t, const Point& x) {
    std::ostringstream os;
    os << "t=" << t << " x=(";
    for (int i = 0; i < x.size(); ++i) os << (i ? "," : "") << x(i);
    os << ")";
    return os.str();
}

void check_time(const MarketModel& model, double t) {
    if (t < (1.0 - 1e-12) / model.N()) {
        throw InvalidArgument("step evaluation needs t >= 1/N, got t=" + std::to_string(t));
    }
}

}  // namespace

MarketModel::MarketModel(OrthoBasis basis, int N, std::vector<ScalarField> securities)
    : basis_(std::move(basis)), N_(N), h_(std::move(securities)) {
    if (N_ < 1) throw InvalidArgument("market: N must be >= 1");
    if (static_cast<int>(h_.size()) != basis_.states()) {
        throw InvalidArgument("market: need exactly n+1 security price functions");
    }
    for (const auto& h : h_) {
        if (!h) throw InvalidArgument("market: empty security price function");
    }
}

StateRow MarketModel::prices(double t, const Point& x) const {
    StateRow row(basis_.states());
    for (int j = 0; j < basis_.states(); ++j) row(j) = h_[static_cast<std::size_t>(j)](t, x);
    return row;
}

StateMatrix MarketModel::payoff_matrix(double t, const Point& x) const {
    const int dim = basis_.states();
    const double s = 1.0 / std::sqrt(static_cast<double>(N_));
    StateMatrix H(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const Point y = x + s * basis_.jump(i);
        for (int j = 0; j < dim; ++j) H(i, j) = h_[static_cast<std::size_t>(j)](t, y);
    }
    return H;
}

StepMatrices evaluate_step(const MarketModel& model, double t, const Point& x) {
    check_time(model, t);
    const OrthoBasis& basis = model.basis();
    const int dim = basis.states();

    StepMatrices out;
    out.H = model.payoff_matrix(t, x);
    const StateRow prev = model.prices(t - 1.0 / model.N(), x);

    Eigen::PartialPivLU<StateMatrix> lu(out.H);
    out.H_rcond = lu.rcond();
    if (out.complete()) {
        out.state_prices = left_solve(lu, prev);
        out.A = out.state_prices.sum();
    } else {
        out.state_prices = StateRow::Constant(dim, std::numeric_limits<double>::quiet_NaN());
        out.A = std::numeric_limits<double>::quiet_NaN();
    }

    out.Sigma.resize(dim, dim);
    out.Sigma.row(0) = prev;
    for (int j = 0; j < dim; ++j) {
        const StateVector column = out.H.col(j);
        for (int k = 1; k <= basis.n(); ++k) {
            out.Sigma(k, j) = gradient_from_values(basis, model.N(), k, column);
        }
    }
    out.Sigma_rcond = Eigen::PartialPivLU<StateMatrix>(out.Sigma).rcond();
    return out;
}

StepMatrices step_matrices(const MarketModel& model, double t, const Point& x) {
    StepMatrices out = evaluate_step(model, t, x);
    if (!out.complete()) {
        throw CompletenessError("H^N is singular (rcond " + std::to_string(out.H_rcond) + ") at " + where(t, x));
    }
    if (!out.arbitrage_free()) {
        throw ArbitrageError("non-positive state price at " + where(t, x));
    }
    return out;
}

StatePriceStep state_price_step(const MarketModel& model, double t, const Point& x) {
    check_time(model, t);
    StatePriceStep out{Eigen::PartialPivLU<StateMatrix>(model.payoff_matrix(t, x)), {}, 0.0};
    const double rcond = out.lu.rcond();
    if (!(rcond > kSingularRcond)) {
        throw CompletenessError("H^N is singular (rcond " + std::to_string(rcond) + ") at " + where(t, x));
    }
    const StateRow prev = model.prices(t - 1.0 / model.N(), x);
    out.state_prices = left_solve(out.lu, prev);
    if (!(out.state_prices.array() > kStatePriceFloor).all()) {
        throw ArbitrageError("non-positive state price at " + where(t, x));
    }
    out.A = out.state_prices.sum();
    return out;
}

PdeCoefficients pde_coefficients(const MarketModel& model, double t, const Point& x) {
    const StepMatrices step = step_matrices(model, t, x);
    const OrthoBasis& basis = model.basis();
    const int dim = basis.states();
    const int N = model.N();

    // Under completeness and no-arbitrage Sigma is invertible; failing that is a
    // numerical breakdown, reported as incompleteness.
    if (!(step.Sigma_rcond > kSingularRcond)) {
        throw CompletenessError("Sigma^N is singular at " + where(t, x));
    }

    StateVector w(dim);
    const StateRow now = model.prices(t, x);
    for (int j = 0; j < dim; ++j) {
        const StateVector column = step.H.col(j);
        const double drift = N * (now(j) - step.Sigma(0, j));
        w(j) = drift + 0.5 * laplacian_from_values(basis, N, now(j), column);
    }
    const StateVector y = Eigen::PartialPivLU<StateMatrix>(step.Sigma).transpose().solve(w);

    PdeCoefficients out;
    out.c = y(0);
    out.b = y.tail(basis.n());
    return out;
}

IdentityDefects sigma_pi_identity_check(const MarketModel& model, double t, const Point& x) {
    const StepMatrices step = step_matrices(model, t, x);
    const OrthoBasis& basis = model.basis();
    const int dim = basis.states();
    const double root_n = std::sqrt(static_cast<double>(model.N()));

    StateMatrix weighted = basis.matrix();
    for (int j = 0; j < dim; ++j) weighted.col(j) *= basis.entry(0, j);
    const StateMatrix G = weighted * step.H;
    Eigen::PartialPivLU<StateMatrix> g_lu(G);

    IdentityDefects d;
    const StateRow prev = step.Sigma.row(0);
    const StateVector pi_col = g_lu.transpose().solve(prev.transpose());
    const StateRow pi = pi_col.transpose();
    d.pi_first = std::abs(pi(0) - step.A);

    const StateMatrix block_t = g_lu.transpose().solve(step.Sigma.transpose());
    const StateMatrix block = block_t.transpose();
    for (int i = 1; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const double expected = (i == j) ? root_n : 0.0;
            d.block = std::max(d.block, std::abs(block(i, j) - expected) / root_n);
        }
    }

    Eigen::PartialPivLU<StateMatrix> sigma_lu(step.Sigma);
    const StateVector unit = sigma_lu.transpose().solve(prev.transpose());
    for (int j = 0; j < dim; ++j) d.unit_row = std::max(d.unit_row, std::abs(unit(j) - (j == 0 ? 1.0 : 0.0)));
    return d;
}

void BlackScholesParams::check() const {
    const int m = n();
    if (m < 1 || sigma.cols() != m) throw InvalidArgument("black-scholes: sigma must be a square n x n matrix");
    if (static_cast<int>(mu.size()) != m) throw InvalidArgument("black-scholes: need one drift per asset");
    if (static_cast<int>(s0.size()) != m) throw InvalidArgument("black-scholes: need one spot per asset");
    for (double s : s0) {
        if (!(s > 0.0)) throw InvalidArgument("black-scholes: spots must be positive");
    }
    if (std::abs(sigma.determinant()) < 1e-14) throw InvalidArgument("black-scholes: sigma must be invertible");
}

std::vector<double> neutral_drift(const Eigen::MatrixXd& sigma, double r) {
    std::vector<double> mu;
    for (Eigen::Index j = 0; j < sigma.rows(); ++j) mu.push_back(0.5 * sigma.row(j).squaredNorm() - r);
    return mu;
}

MarketModel make_black_scholes(OrthoBasis basis, int N, const BlackScholesParams& params) {
    params.check();
    if (params.n() != basis.n()) throw InvalidArgument("black-scholes: basis and sigma dimensions differ");
    std::vector<ScalarField> h;
    const double r = params.r;
    h.emplace_back([r](double t, const Point&) { return std::exp(r * t); });
    for (int j = 0; j < params.n(); ++j) {
        Point loading = params.sigma.row(j).transpose();
        const double mu = params.mu[static_cast<std::size_t>(j)];
        const double s0 = params.s0[static_cast<std::size_t>(j)];
        h.emplace_back([loading, mu, s0](double t, const Point& x) {
            return s0 * std::exp(loading.dot(x) - mu * t);
        });
    }
    return MarketModel(std::move(basis), N, std::move(h));
}

PdeCoefficients black_scholes_limit_coefficients(const BlackScholesParams& params) {
    params.check();
    Eigen::VectorXd rhs(params.n());
    for (int j = 0; j < params.n(); ++j) {
        rhs(j) = 0.5 * params.sigma.row(j).squaredNorm() - params.mu[static_cast<std::size_t>(j)] - params.r;
    }
    const Eigen::VectorXd b = params.sigma.partialPivLu().solve(rhs);
    PdeCoefficients out;
    out.c = params.r;
    out.b = b;
    return out;
}

}  // namespace dito
