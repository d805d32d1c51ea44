#pragma once

#include "dito/market.hpp"
#include "dito/pricer.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dito {

enum class PayoffKind { Constant, GaussianBump, Call, Put, Digital, Custom };

PayoffKind parse_payoff_kind(const std::string& name);
std::string to_string(PayoffKind kind);

/**
 * Terminal payoff description, rich enough for the continuum oracle to pick a
 * closed form. Option payoffs are written on the exponential coordinate
 * S(T, x) = s0 exp(<loading, x> - mu T), so they depend on the horizon.
 */
struct PayoffSpec {
    PayoffKind kind = PayoffKind::GaussianBump;
    double level = 1.0;   ///< Constant: the value; Digital: the cash amount
    Point center;         ///< GaussianBump: exp(-|x - center|^2 / width^2)
    double width = 1.0;
    double strike = 100.0;
    Point loading;
    double s0 = 100.0;
    double mu = 0.0;
    Payoff custom;        ///< Custom only; evaluated by quadrature

    /// Smooth payoffs are the ones order fitting is meant for.
    bool smooth() const { return kind == PayoffKind::Constant || kind == PayoffKind::GaussianBump || kind == PayoffKind::Custom; }
    Payoff payoff(double horizon) const;
};

/// Option payoff on asset `asset` (1-based) of a Black-Scholes market.
PayoffSpec option_payoff(PayoffKind kind, const BlackScholesParams& params, int asset, double strike);

/// Constant-coefficient continuum problem dv/dt + Lap v / 2 - <b, grad v> - c v = 0, v(T) = Phi.
struct ReferenceProblem {
    Point b;
    double c = 0.0;
    PayoffSpec payoff;
    double T = 1.0;
    Point x0;
    double window = 1.0;  ///< half-width of the evaluation box around x0 (max norm)

    int n() const { return static_cast<int>(b.size()); }
    void check() const;
};

/// v(t, x) = exp(-c s) E[Phi(x - b s + W_s)], s = T - t. Closed forms for the
/// constant, Gaussian-bump and option payoffs; tensor Gauss-Hermite otherwise.
double pde_oracle(const ReferenceProblem& problem, double t, const Point& x);

/// Same expectation, always by tensor Gauss-Hermite (n <= 3).
double pde_oracle_quadrature(const ReferenceProblem& problem, double t, const Point& x,
                             int points = 64);

/// Builds the N-th market of a family.
using ModelFamily = std::function<MarketModel(int N)>;

struct ConvergenceReport {
    std::vector<int> Ns;
    std::vector<double> errors;      ///< sup over window nodes and grid times of |v^N - v|
    std::vector<double> min_discount;
    std::vector<double> max_discount;
    double slope = 0.0;
    double expected_order = 0.0;
    bool exact = false;              ///< every error below 1e-13: no rate to fit
    bool positive_interest = true;   ///< 0 < A < 1 at every visited node
    bool pass = false;
};

inline constexpr double kOrderTolerance = 0.2;

/// For each N: price with the backward sweep over [0, T_N], compare against
/// the oracle solved on the same horizon T_N at every lattice node inside the
/// window, and fit log(error) against log(N). Passes iff
/// |slope + expected_order| <= kOrderTolerance.
ConvergenceReport run_convergence(const ModelFamily& family, const ReferenceProblem& problem,
                                  std::span<const int> Ns, double expected_order);

struct CoefficientReport {
    std::vector<int> Ns;
    std::vector<double> scaled_defects;  ///< max sqrt(N) (|b - b^N| + |c - c^N|) over the window
    double growth = 0.0;                 ///< log-log slope of the scaled defects
    bool bounded = false;
};

/// Scaled coefficient defect per N, sampled over at most 32 grid times.
/// Bounded iff the scaled defects show no upward trend (growth <= 0.1).
CoefficientReport coefficient_consistency(const ModelFamily& family, const PdeCoefficients& limit,
                                          const ReferenceProblem& problem, std::span<const int> Ns);

/// Shipped families: one risky factor on the binomial basis, and two on the
/// cyclic basis with sigma = diag(0.2, 0.3). Both use r = 0.05, spots 100 and
/// the drift that makes the limiting b vanish.
BlackScholesParams bs1_params();
BlackScholesParams bs2_params();
ModelFamily black_scholes_family(const OrthoBasis& basis, const BlackScholesParams& params);

/// The continuum problem matching a Black-Scholes family.
ReferenceProblem black_scholes_problem(const BlackScholesParams& params, PayoffSpec payoff, double T,
                                       const Point& x0, double window);

}  // namespace dito
