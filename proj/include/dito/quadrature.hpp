#pragma once

#include "dito/types.hpp"

#include <functional>
#include <vector>

namespace dito {

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on the orthonormal Hermite recurrence; nodes ascending.
GaussHermiteRule gauss_hermite(int points);

inline constexpr int kDefaultHermitePoints = 64;
inline constexpr int kMaxQuadratureDim = 3;

/// E[f(Z)] for Z ~ N(0, I_dim) by the tensor rule with `points` nodes per axis.
double gaussian_expectation(const std::function<double(const Point&)>& f, int dim,
                            int points = kDefaultHermitePoints);

}  // namespace dito
