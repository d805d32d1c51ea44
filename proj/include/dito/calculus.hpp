#pragma once

#include "dito/basis.hpp"
#include "dito/lattice.hpp"

#include <span>
#include <vector>

namespace dito {

// Discrete differential operators attached to the walk X^N:
//
//   d_k f(., x)     = sqrt(N) sum_j f(., x + N^{-1/2} e_j) e_{0,j} e_{k,j}
//   Lap_N f(., x)   = 2N sum_j {f(., x + N^{-1/2} e_j) - f(., x)} e_{0,j}^2
//   dt_N f(t, .)    = N (f(t, .) - f(t - 1/N, .))
//
// Directions k are 1-based (1..n) in the public API, matching the basis rows.

/// f(t, x + N^{-1/2} e_j) for j = 0..n.
StateVector stencil_values(const OrthoBasis& basis, int N, const ScalarField& f, double t, const Point& x);

/// d_k from precomputed stencil values.
double gradient_from_values(const OrthoBasis& basis, int N, int k, const StateVector& neighbors);
/// Lap_N from a center value and precomputed stencil values.
double laplacian_from_values(const OrthoBasis& basis, int N, double center, const StateVector& neighbors);

double d_k(const OrthoBasis& basis, int N, const ScalarField& f, int k, double t, const Point& x);
Point gradient_N(const OrthoBasis& basis, int N, const ScalarField& f, double t, const Point& x);
double laplacian_N(const OrthoBasis& basis, int N, const ScalarField& f, double t, const Point& x);
/// Throws InvalidArgument when t < 1/N.
double dt_N(int N, const ScalarField& f, double t, const Point& x);

/// Doob decomposition of f(t, X^N_t) - f(0, X_0) along one path.
struct ItoDecomposition {
    std::vector<double> martingale_increments;
    std::vector<double> compensator_increments;
    double start = 0.0;  ///< f(0, X_0)
    double end = 0.0;    ///< f(t, X^N_t)

    double lhs() const { return end - start; }
    double rhs() const;
    /// |lhs - rhs| / (1 + |lhs|)
    double relative_defect() const;
};

/// `path[u]` is the index of the jump taken at step u+1 (0..n).
ItoDecomposition ito_decompose(const OrthoBasis& basis, const LatticeConfig& config, const ScalarField& f,
                               std::span<const int> path);

/// E[tau^i tau^j tau^k] for i, j, k in 1..n, stored 0-based.
class ThirdMomentTensor {
public:
    explicit ThirdMomentTensor(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

    int n() const { return n_; }
    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
    double max_abs() const;

private:
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>((i * n_ + j) * n_ + k);
    }
    int n_;
    std::vector<double> data_;
};

/// sum_l e_{i,l} e_{j,l} e_{k,l} / e_{0,l}.
ThirdMomentTensor third_moment_tensor(const OrthoBasis& basis);

using GradientField = std::function<Point(double t, const Point& x)>;

inline constexpr double kExactDefect = 1e-13;
inline constexpr int kDefaultOrderNsStorage[] = {16, 32, 64, 128, 256, 512};
inline constexpr std::span<const int> kDefaultOrderNs{kDefaultOrderNsStorage};

struct OrderEstimate {
    std::vector<int> Ns;
    std::vector<double> defects;
    bool exact = false;  ///< every defect below kExactDefect; slope is not meaningful
    double slope = 0.0;
};

/// Defect max_k |d_k f - df/dx_k| + |Lap_N f - Lap f| against caller-supplied
/// analytic derivatives, fitted in log-log space over `Ns` (at least four values).
OrderEstimate consistency_order(const OrthoBasis& basis, const ScalarField& f, const GradientField& gradient,
                                const ScalarField& laplacian, double t, const Point& x,
                                std::span<const int> Ns = kDefaultOrderNs);

}  // namespace dito
