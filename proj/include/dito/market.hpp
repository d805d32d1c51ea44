#pragma once

#include "dito/basis.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <vector>

namespace dito {

/// Threshold on the reciprocal condition estimate below which H or Sigma is
/// treated as singular.
inline constexpr double kSingularRcond = 1e-12;
/// State prices must exceed this to count as strictly positive.
inline constexpr double kStatePriceFloor = 1e-14;

/**
 * n+1 securities priced as S^j_t = h^j(t, X^N_t) on the walk driven by `basis`
 * with N steps per unit time. Security 0 is conventionally the money account.
 */
class MarketModel {
public:
    MarketModel(OrthoBasis basis, int N, std::vector<ScalarField> securities);

    const OrthoBasis& basis() const { return basis_; }
    int N() const { return N_; }
    int n() const { return basis_.n(); }
    const ScalarField& security(int j) const { return h_[static_cast<std::size_t>(j)]; }

    /// h^N(t, x) as a row vector.
    StateRow prices(double t, const Point& x) const;
    /// H^N(t, x): row i holds the prices at x + N^{-1/2} e_i.
    StateMatrix payoff_matrix(double t, const Point& x) const;

private:
    OrthoBasis basis_;
    int N_;
    std::vector<ScalarField> h_;
};

/**
 * One trading period (t - 1/N, t] at position x:
 *
 *   H      = H^N(t, x)
 *   Sigma  = [ h^N(t - 1/N, x) ; d_1 h^N(t, x) ; ... ; d_n h^N(t, x) ]
 *   pi     = h^N(t - 1/N, x) H^N(t, x)^{-1}      (state prices)
 *   A      = sum of pi                            (one-period discount)
 *
 * The state prices are those of the period starting at t - 1/N, so
 * `step_matrices(model, (k+1)/N, x)` prices a node at depth k.
 */
struct StepMatrices {
    StateMatrix H;
    StateMatrix Sigma;
    StateRow state_prices;
    double A = 0.0;
    double H_rcond = 0.0;
    double Sigma_rcond = 0.0;

    bool complete() const { return H_rcond > kSingularRcond; }
    bool arbitrage_free() const { return (state_prices.array() > kStatePriceFloor).all(); }
    bool positive_interest() const { return A > 0.0 && A < 1.0; }
};

/// Evaluates everything and sets the flags; never throws on market defects.
StepMatrices evaluate_step(const MarketModel& model, double t, const Point& x);

/// As evaluate_step, but throws CompletenessError / ArbitrageError.
StepMatrices step_matrices(const MarketModel& model, double t, const Point& x);

/// The part of a step the backward sweep needs: H's LU and the state prices.
struct StatePriceStep {
    Eigen::PartialPivLU<StateMatrix> lu;
    StateRow state_prices;
    double A = 0.0;
};

/// Throws CompletenessError / ArbitrageError. Same time convention as step_matrices.
StatePriceStep state_price_step(const MarketModel& model, double t, const Point& x);

/// (c^N, b^N) = (dt_N h + Lap_N h / 2) Sigma^{-1}, at the same (t, x) as Sigma.
struct PdeCoefficients {
    double c = 0.0;
    Point b;
};

PdeCoefficients pde_coefficients(const MarketModel& model, double t, const Point& x);

/// Numerical defects of the identities linking pi, Sigma and the basis matrix.
struct IdentityDefects {
    double pi_first = 0.0;  ///< |pi_1 - A| with pi = (h(t-1/N)) [D' H]^{-1}
    double block = 0.0;     ///< rows 2..n+1 of Sigma [D' H]^{-1} vs (0 | sqrt(N) I), relative to sqrt(N)
    double unit_row = 0.0;  ///< max |h(t-1/N) Sigma^{-1} - (1, 0, ..., 0)|
    double max() const { return std::max({pi_first, block, unit_row}); }
};

/// D' = D diag(e_{0,0}, ..., e_{0,n}) maps stencil values f~ to
/// (E f(x + N^{-1/2} tau), N^{-1/2} d_1 f, ..., N^{-1/2} d_n f).
IdentityDefects sigma_pi_identity_check(const MarketModel& model, double t, const Point& x);

/// h^j(t, x) = S^j_0 exp(<sigma_j, x> - mu_j t) for j = 1..n; h^0(t, x) = exp(r t).
struct BlackScholesParams {
    double r = 0.0;
    Eigen::MatrixXd sigma;  ///< row j-1 is the loading vector sigma_j of asset j
    std::vector<double> mu;
    std::vector<double> s0;

    int n() const { return static_cast<int>(sigma.rows()); }
    void check() const;
};

/// mu_j = |sigma_j|^2 / 2 - r, which makes the limiting drift b vanish.
std::vector<double> neutral_drift(const Eigen::MatrixXd& sigma, double r);

MarketModel make_black_scholes(OrthoBasis basis, int N, const BlackScholesParams& params);

/// Continuum coefficients of the limit equation for the Black-Scholes family:
/// c = r and sigma b = (|sigma_j|^2 / 2 - mu_j - r)_j.
PdeCoefficients black_scholes_limit_coefficients(const BlackScholesParams& params);

}  // namespace dito
