#pragma once

#include "dito/lattice.hpp"
#include "dito/market.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dito {

/// Terminal payoff Phi^N evaluated at lattice positions.
using Payoff = std::function<double(const Point& x)>;

struct Claim {
    Payoff payoff;
};

/// v^N(k/N, .) per depth in colex rank order, and the hedge theta held over
/// (k/N, (k+1)/N] at each node of depth k < K.
class PriceGrid {
public:
    PriceGrid(int n, int depth);

    int n() const { return n_; }
    int depth() const { return static_cast<int>(values_.size()) - 1; }

    std::vector<double>& slice(int k) { return values_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& slice(int k) const { return values_[static_cast<std::size_t>(k)]; }
    double value(int k, std::uint64_t rank) const { return slice(k)[rank]; }
    double root_value() const { return values_.front().front(); }

    bool has_hedges() const { return !hedges_.empty(); }
    std::span<const double> theta(int k, std::uint64_t rank) const;
    std::span<double> theta(int k, std::uint64_t rank);
    void allocate_hedges(const Lattice& lattice);

    /// Range of the one-period discount A over every node the sweep visited.
    double min_discount = 0.0;
    double max_discount = 0.0;

private:
    int n_;
    std::vector<std::vector<double>> values_;
    std::vector<std::vector<double>> hedges_;
};

/// Called once per depth, deepest first, with the completed slice.
using SliceVisitor = std::function<void(int depth, std::span<const double> values)>;

struct SweepOptions {
    bool store_grid = true;  ///< false keeps only two slices in memory
    bool store_hedges = true;
};

/**
 * Backward recursion v(t, x) = h(t, x) H(t + 1/N, x)^{-1} v~(t + 1/N) with
 * hedge theta = H(t + 1/N, x)^{-1} v~. Market defects abort with the depth and
 * rank of the offending node.
 */
PriceGrid price_backward(const MarketModel& model, const Claim& claim, const LatticeConfig& config,
                         const SliceVisitor& visitor = {}, SweepOptions options = {});

/**
 * Solves dt_N u + Lap_N u / 2 - <b^N, grad_N u> - c^N u(t - 1/N) = g backward,
 * one explicit relation per node, using the discrete operators and the
 * coefficients (c^N, b^N) rather than state prices. Hedges come from Sigma^{-1}.
 * `source` g is evaluated at (t, x) for the period (t - 1/N, t]; empty means zero.
 */
PriceGrid price_pde(const MarketModel& model, const Claim& claim, const LatticeConfig& config,
                    const ScalarField& source = {});

/// Transition law of the chain Y^N from (t, x): child j with probability
/// pi_j / A, one-period discount A.
struct MarkovTransition {
    StateRow probs;
    double discount = 0.0;
};

MarkovTransition markov_transition(const MarketModel& model, double t, const Point& x);

inline constexpr double kExhaustivePathLimit = 1e6;

struct PathSelection {
    /// Unset: exhaustive, which requires (n+1)^K <= kExhaustivePathLimit.
    std::optional<std::uint64_t> samples;
    std::uint64_t seed = 20240601;
};

struct ReplicationReport {
    double max_defect = 0.0;         ///< max |terminal wealth - Phi(X_T)|
    double max_cost_mismatch = 0.0;  ///< max |theta . h - wealth| at rebalancing dates
    std::uint64_t paths = 0;
    bool exhaustive = true;
    std::uint64_t seed = 0;
};

/// Starts with v(0, x0), rolls the self-financing portfolio forward along each
/// path by accumulating theta . (h(t+1/N, X_{t+1/N}) - h(t, X_t)).
ReplicationReport hedge_replication_test(const MarketModel& model, const Claim& claim,
                                         const LatticeConfig& config, PathSelection selection = {});
ReplicationReport hedge_replication_test(const MarketModel& model, const Claim& claim,
                                         const LatticeConfig& config, const PriceGrid& grid,
                                         PathSelection selection = {});

struct FeynmanKacOptions {
    /// Start node; root when unset.
    std::optional<LatticeNode> start;
    /// Monte Carlo sample count; required when exhaustive enumeration is too large.
    std::optional<std::uint64_t> samples;
    std::uint64_t seed = 20240601;
};

/**
 * u(t, x) = E[Psi(Y_T) prod A] - (1/N) E[sum_s g(s + 1/N, Y_s) A(s, Y_s) prod_{u<s} A(u, Y_u)]
 * by weighted enumeration of every path of the chain Y^N (no recombination).
 * With g = 0 this is the price; with g != 0 it solves the same equation as
 * price_pde with that source.
 */
double feynman_kac_oracle(const MarketModel& model, const Claim& claim, const LatticeConfig& config,
                          const ScalarField& source = {}, const FeynmanKacOptions& options = {});

struct StabilityVerdict {
    std::vector<double> sup_solution;  ///< per depth: max |u| over the slice
    std::vector<double> bound;         ///< per depth: (T_N - t) sup|g| + sup|Psi|
    int violations = 0;
    bool positive_interest = true;     ///< 0 < A < 1 at every node
    bool holds() const { return violations == 0; }
};

StabilityVerdict stability_check(const MarketModel& model, const LatticeConfig& config, const ScalarField& source,
                                 const Payoff& terminal);

}  // namespace dito
