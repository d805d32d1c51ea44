#pragma once

#include "dito/basis.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace dito {

struct LatticeConfig {
    int N = 1;       ///< steps per unit time
    double T = 1.0;  ///< horizon; the grid horizon is T_N = floor(T N) / N
    Point x0;        ///< initial point X_0

    int depth() const;   ///< K = floor(T N)
    double horizon() const { return static_cast<double>(depth()) / N; }
    double time(int k) const { return static_cast<double>(k) / N; }
    double step() const { return 1.0 / std::sqrt(static_cast<double>(N)); }  ///< N^{-1/2}
};

/// Jump-count multi-index (k_0, ..., k_n) of a recombined state; depth = sum k_j.
using Counts = std::vector<int>;

struct LatticeNode {
    int depth = 0;
    Counts counts;

    bool operator==(const LatticeNode&) const = default;
};

/// Number of nodes at depth k: binomial(k + n, n). Throws on 64-bit overflow.
std::uint64_t slice_size(int n, int k);

/// Colexicographic rank of a multi-index of fixed weight: entries are compared
/// from the last slot down, so (k, 0, ..., 0) has rank 0 and (0, ..., 0, k)
/// is the last node of the slice.
std::uint64_t rank(const LatticeNode& node);
LatticeNode unrank(int n, int depth, std::uint64_t r);

/// Steps `counts` to its colex successor in place; false at the end of a slice.
bool next_counts(Counts& counts);

/// The n+1 nodes one step later; child j takes jump e_j (probability p_j).
std::vector<LatticeNode> children(const LatticeNode& node);

/// x0 + N^{-1/2} sum_j k_j e_j.
Point position(const OrthoBasis& basis, const LatticeConfig& config, const LatticeNode& node);

/**
 * The recombining state space of X^N over [0, T_N]. Nodes are keyed by their
 * count multi-index, never by floating-point position. Construction checks that
 * distinct nodes of the deepest slice have numerically distinct positions.
 */
class Lattice {
public:
    Lattice(OrthoBasis basis, LatticeConfig config);

    const OrthoBasis& basis() const { return basis_; }
    const LatticeConfig& config() const { return config_; }
    int n() const { return basis_.n(); }
    int depth() const { return depth_; }

    std::uint64_t slice_size(int k) const;
    std::uint64_t rank(const Counts& counts) const;
    /// Rank of counts + unit vector in slot j, without materializing it.
    std::uint64_t child_rank(const Counts& counts, int j) const;

    Point position(const Counts& counts) const;

    /// Visits every node at depth k in rank order.
    void for_each_node(int k, const std::function<void(std::uint64_t, const Counts&)>& visit) const;

    /// Smallest separation between positions of distinct nodes in the deepest slice.
    double min_separation() const { return min_separation_; }

private:
    std::uint64_t binom(int a, int b) const;

    OrthoBasis basis_;
    LatticeConfig config_;
    int depth_;
    std::vector<std::vector<std::uint64_t>> binom_;  // binom_[a][b], a <= depth + n + 1
    double min_separation_ = 0.0;
};

}  // namespace dito
