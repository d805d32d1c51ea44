#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace dito {

/// Upper bound on the number of risky factors n. Small dense objects are
/// stack allocated with this capacity so the lattice sweeps never touch the heap.
inline constexpr int kMaxFactors = 16;
inline constexpr int kMaxStates = kMaxFactors + 1;

using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxFactors, 1>;
using StateVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxStates, 1>;
using StateRow = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, kMaxStates>;
using StateMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxStates, kMaxStates>;

/// f(t, x) on [0, inf) x R^n.
using ScalarField = std::function<double(double t, const Point& x)>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Raised when a basis fails orthogonality / positivity / moment checks.
class BasisError : public Error {
public:
    using Error::Error;
};

class LatticeError : public Error {
public:
    using Error::Error;
};

/// H^N is singular at some grid point: the one-step market is incomplete.
class CompletenessError : public Error {
public:
    using Error::Error;
};

/// Some state price is not strictly positive.
class ArbitrageError : public Error {
public:
    using Error::Error;
};

}  // namespace dito
