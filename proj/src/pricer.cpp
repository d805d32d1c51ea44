#include "dito/pricer.hpp"

#include "dito/calculus.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace dito {

namespace {

std::string node_context(int depth, std::uint64_t rank) {
    return "depth " + std::to_string(depth) + " rank " + std::to_string(rank) + ": ";
}

// Re-throws market defects with the node that triggered them.
template <typename Fn>
auto at_node(int depth, std::uint64_t rank, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const CompletenessError& e) {
        throw CompletenessError(node_context(depth, rank) + e.what());
    } catch (const ArbitrageError& e) {
        throw ArbitrageError(node_context(depth, rank) + e.what());
    }
}

Lattice make_lattice(const MarketModel& model, const LatticeConfig& config) {
    if (config.N != model.N()) throw InvalidArgument("lattice N does not match the market model");
    return Lattice(model.basis(), config);
}

double path_count(int states, int steps) { return std::pow(static_cast<double>(states), steps); }

StateVector child_values(const Lattice& lattice, const std::vector<double>& next, const Counts& c) {
    StateVector v(lattice.n() + 1);
    for (int j = 0; j <= lattice.n(); ++j) v(j) = next[lattice.child_rank(c, j)];
    return v;
}

std::vector<double> terminal_slice(const Lattice& lattice, const Payoff& payoff) {
    std::vector<double> out(lattice.slice_size(lattice.depth()));
    lattice.for_each_node(lattice.depth(),
                          [&](std::uint64_t r, const Counts& c) { out[r] = payoff(lattice.position(c)); });
    return out;
}

}  // namespace

PriceGrid::PriceGrid(int n, int depth) : n_(n), values_(static_cast<std::size_t>(depth + 1)) {}

std::span<const double> PriceGrid::theta(int k, std::uint64_t rank) const {
    const auto& s = hedges_[static_cast<std::size_t>(k)];
    return {s.data() + rank * static_cast<std::uint64_t>(n_ + 1), static_cast<std::size_t>(n_ + 1)};
}

std::span<double> PriceGrid::theta(int k, std::uint64_t rank) {
    auto& s = hedges_[static_cast<std::size_t>(k)];
    return {s.data() + rank * static_cast<std::uint64_t>(n_ + 1), static_cast<std::size_t>(n_ + 1)};
}

void PriceGrid::allocate_hedges(const Lattice& lattice) {
    hedges_.assign(static_cast<std::size_t>(lattice.depth()), {});
    for (int k = 0; k < lattice.depth(); ++k) {
        hedges_[static_cast<std::size_t>(k)].assign(lattice.slice_size(k) * static_cast<std::uint64_t>(n_ + 1), 0.0);
    }
}

PriceGrid price_backward(const MarketModel& model, const Claim& claim, const LatticeConfig& config,
                         const SliceVisitor& visitor, SweepOptions options) {
    const Lattice lattice = make_lattice(model, config);
    const int K = lattice.depth();
    const int N = model.N();
    const bool hedges = options.store_grid && options.store_hedges;

    PriceGrid grid(lattice.n(), K);
    if (hedges) grid.allocate_hedges(lattice);

    std::vector<double> next = terminal_slice(lattice, claim.payoff);
    if (visitor) visitor(K, next);
    std::vector<double> cur;
    grid.min_discount = std::numeric_limits<double>::infinity();
    grid.max_discount = -std::numeric_limits<double>::infinity();

    for (int k = K - 1; k >= 0; --k) {
        const double t_next = static_cast<double>(k + 1) / N;
        cur.assign(lattice.slice_size(k), 0.0);
        lattice.for_each_node(k, [&](std::uint64_t r, const Counts& c) {
            const Point x = lattice.position(c);
            const StatePriceStep step = at_node(k, r, [&] { return state_price_step(model, t_next, x); });
            const StateVector v = child_values(lattice, next, c);
            cur[r] = step.state_prices.dot(v.transpose());
            grid.min_discount = std::min(grid.min_discount, step.A);
            grid.max_discount = std::max(grid.max_discount, step.A);
            if (hedges) {
                const StateVector theta = step.lu.solve(v);
                auto out = grid.theta(k, r);
                for (int j = 0; j <= lattice.n(); ++j) out[static_cast<std::size_t>(j)] = theta(j);
            }
        });
        if (visitor) visitor(k, cur);
        if (options.store_grid) grid.slice(k + 1) = std::move(next);
        next = std::move(cur);
        cur = {};
    }
    grid.slice(0) = std::move(next);
    return grid;
}

PriceGrid price_pde(const MarketModel& model, const Claim& claim, const LatticeConfig& config,
                    const ScalarField& source) {
    const Lattice lattice = make_lattice(model, config);
    const OrthoBasis& basis = lattice.basis();
    const int K = lattice.depth();
    const int N = model.N();
    const int n = lattice.n();

    PriceGrid grid(n, K);
    grid.allocate_hedges(lattice);
    grid.slice(K) = terminal_slice(lattice, claim.payoff);

    for (int k = K - 1; k >= 0; --k) {
        const double t = static_cast<double>(k + 1) / N;
        const auto& next = grid.slice(k + 1);
        auto& cur = grid.slice(k);
        cur.assign(lattice.slice_size(k), 0.0);
        lattice.for_each_node(k, [&](std::uint64_t r, const Counts& c) {
            const Point x = lattice.position(c);
            const PdeCoefficients coef = at_node(k, r, [&] { return pde_coefficients(model, t, x); });
            const StepMatrices step = at_node(k, r, [&] { return step_matrices(model, t, x); });
            const StateVector nb = child_values(lattice, next, c);

            Point grad(n);
            for (int d = 1; d <= n; ++d) grad(d - 1) = gradient_from_values(basis, N, d, nb);

            // u(t, x) itself is off-lattice; it enters dt_N with weight N and
            // Lap_N / 2 with weight -N and cancels, so any center value will do.
            const double center = 0.0;
            const double half_lap = 0.5 * laplacian_from_values(basis, N, center, nb);
            const double g = source ? source(t, x) : 0.0;
            const double prev = (N * center + half_lap - coef.b.dot(grad) - g) / (N + coef.c);
            cur[r] = prev;

            StateVector rhs(n + 1);
            rhs(0) = prev;
            rhs.tail(n) = grad;
            const StateVector theta = Eigen::PartialPivLU<StateMatrix>(step.Sigma).solve(rhs);
            auto out = grid.theta(k, r);
            for (int j = 0; j <= n; ++j) out[static_cast<std::size_t>(j)] = theta(j);
        });
    }
    return grid;
}

MarkovTransition markov_transition(const MarketModel& model, double t, const Point& x) {
    const StatePriceStep step = state_price_step(model, t + 1.0 / model.N(), x);
    MarkovTransition out;
    out.discount = step.A;
    out.probs = step.state_prices / step.A;
    if (std::abs(out.probs.sum() - 1.0) > 1e-12) throw Error("transition probabilities do not sum to one");
    return out;
}

ReplicationReport hedge_replication_test(const MarketModel& model, const Claim& claim,
                                         const LatticeConfig& config, PathSelection selection) {
    const PriceGrid grid = price_backward(model, claim, config);
    return hedge_replication_test(model, claim, config, grid, selection);
}

ReplicationReport hedge_replication_test(const MarketModel& model, const Claim& claim,
                                         const LatticeConfig& config, const PriceGrid& grid,
                                         PathSelection selection) {
    const Lattice lattice = make_lattice(model, config);
    const int K = lattice.depth();
    const int N = model.N();
    const int states = lattice.n() + 1;
    if (!grid.has_hedges() || grid.depth() != K) throw InvalidArgument("replication: grid lacks hedges for this lattice");

    ReplicationReport report;
    report.exhaustive = !selection.samples.has_value();
    report.seed = selection.seed;
    if (report.exhaustive && path_count(states, K) > kExhaustivePathLimit) {
        throw InvalidArgument("replication: (n+1)^K exceeds the exhaustive limit; give a sample count");
    }

    // One self-financing period from node (k, c) along jump j; returns new wealth.
    auto roll = [&](int k, const Counts& c, double wealth, int j, Counts& child) {
        const Point x = lattice.position(c);
        const StateRow h_now = model.prices(static_cast<double>(k) / N, x);
        const auto theta = grid.theta(k, lattice.rank(c));
        double cost = 0.0;
        for (int i = 0; i < states; ++i) cost += theta[static_cast<std::size_t>(i)] * h_now(i);
        report.max_cost_mismatch = std::max(report.max_cost_mismatch, std::abs(cost - wealth));

        child = c;
        child[static_cast<std::size_t>(j)] += 1;
        const StateRow h_next = model.prices(static_cast<double>(k + 1) / N, lattice.position(child));
        double gain = 0.0;
        for (int i = 0; i < states; ++i) gain += theta[static_cast<std::size_t>(i)] * (h_next(i) - h_now(i));
        return wealth + gain;
    };
    auto settle = [&](const Counts& c, double wealth) {
        const double defect = std::abs(wealth - claim.payoff(lattice.position(c)));
        report.max_defect = std::max(report.max_defect, defect);
        ++report.paths;
    };

    const Counts root = [&] {
        Counts c(static_cast<std::size_t>(states), 0);
        return c;
    }();
    const double v0 = grid.root_value();

    if (report.exhaustive) {
        std::function<void(int, const Counts&, double)> dfs = [&](int k, const Counts& c, double wealth) {
            if (k == K) {
                settle(c, wealth);
                return;
            }
            Counts child;
            for (int j = 0; j < states; ++j) {
                const double w = roll(k, c, wealth, j, child);
                dfs(k + 1, child, w);
            }
        };
        dfs(0, root, v0);
    } else {
        std::mt19937_64 rng(selection.seed);
        std::discrete_distribution<int> jump(model.basis().probs().begin(), model.basis().probs().end());
        for (std::uint64_t p = 0; p < *selection.samples; ++p) {
            Counts c = root;
            Counts child;
            double wealth = v0;
            for (int k = 0; k < K; ++k) {
                wealth = roll(k, c, wealth, jump(rng), child);
                c = child;
            }
            settle(c, wealth);
        }
    }
    return report;
}

double feynman_kac_oracle(const MarketModel& model, const Claim& claim, const LatticeConfig& config,
                          const ScalarField& source, const FeynmanKacOptions& options) {
    const Lattice lattice = make_lattice(model, config);
    const OrthoBasis& basis = lattice.basis();
    const int K = lattice.depth();
    const int N = model.N();
    const int states = basis.states();
    const double s = config.step();

    int k0 = 0;
    Point x0 = lattice.position(Counts(static_cast<std::size_t>(states), 0));
    if (options.start) {
        k0 = options.start->depth;
        if (k0 < 0 || k0 > K) throw InvalidArgument("feynman_kac_oracle: start depth out of range");
        x0 = position(basis, lattice.config(), *options.start);
    }
    const int remaining = K - k0;

    // Source contribution of the period starting at (k, x), already weighted by
    // the one-period discount.
    auto source_term = [&](int k, const Point& x, double discount) {
        return source ? -discount * source(static_cast<double>(k + 1) / N, x) / N : 0.0;
    };

    if (!options.samples) {
        if (path_count(states, remaining) > kExhaustivePathLimit) {
            throw InvalidArgument("feynman_kac_oracle: too many paths for exhaustive enumeration; give a sample count");
        }
        // Each leaf is one path of Y^N, weighted by its full probability.
        double total = 0.0;
        std::function<void(int, const Point&, double, double, double)> dfs =
            [&](int k, const Point& x, double prob, double discount, double acc) {
                if (k == K) {
                    total += prob * (discount * claim.payoff(x) + acc);
                    return;
                }
                const MarkovTransition step = markov_transition(model, static_cast<double>(k) / N, x);
                const double acc_next = acc + discount * source_term(k, x, step.discount);
                for (int j = 0; j < states; ++j) {
                    const Point y = x + s * basis.jump(j);
                    dfs(k + 1, y, prob * step.probs(j), discount * step.discount, acc_next);
                }
            };
        dfs(k0, x0, 1.0, 1.0, 0.0);
        return total;
    }

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double total = 0.0;
    for (std::uint64_t p = 0; p < *options.samples; ++p) {
        Point x = x0;
        double discount = 1.0, acc = 0.0;
        for (int k = k0; k < K; ++k) {
            const MarkovTransition step = markov_transition(model, static_cast<double>(k) / N, x);
            acc += discount * source_term(k, x, step.discount);
            discount *= step.discount;
            double u = unif(rng);
            int j = 0;
            while (j < states - 1 && u >= step.probs(j)) u -= step.probs(j++);
            x = x + s * basis.jump(j);
        }
        total += discount * claim.payoff(x) + acc;
    }
    return total / static_cast<double>(*options.samples);
}

StabilityVerdict stability_check(const MarketModel& model, const LatticeConfig& config, const ScalarField& source,
                                 const Payoff& terminal) {
    const Lattice lattice = make_lattice(model, config);
    const int K = lattice.depth();
    const int N = model.N();
    const PriceGrid grid = price_pde(model, Claim{terminal}, config, source);

    StabilityVerdict verdict;
    verdict.sup_solution.assign(static_cast<std::size_t>(K + 1), 0.0);
    verdict.bound.assign(static_cast<std::size_t>(K + 1), 0.0);

    double sup_terminal = 0.0;
    for (double v : grid.slice(K)) sup_terminal = std::max(sup_terminal, std::abs(v));

    // sup |g| over the evaluation points of periods starting at depth >= k.
    double sup_source = 0.0;
    for (int k = K; k >= 0; --k) {
        if (k < K) {
            const double t = static_cast<double>(k + 1) / N;
            lattice.for_each_node(k, [&](std::uint64_t, const Counts& c) {
                const Point x = lattice.position(c);
                if (source) sup_source = std::max(sup_source, std::abs(source(t, x)));
                const StatePriceStep step = state_price_step(model, t, x);
                if (!(step.A > 0.0 && step.A < 1.0)) verdict.positive_interest = false;
            });
        }
        double sup_u = 0.0;
        for (double v : grid.slice(k)) sup_u = std::max(sup_u, std::abs(v));
        const double remaining = config.horizon() - static_cast<double>(k) / N;
        const double bound = remaining * sup_source + sup_terminal;
        verdict.sup_solution[static_cast<std::size_t>(k)] = sup_u;
        verdict.bound[static_cast<std::size_t>(k)] = bound;
        if (sup_u > bound * (1.0 + 1e-12) + 1e-14) ++verdict.violations;
    }
    return verdict;
}

}  // namespace dito
