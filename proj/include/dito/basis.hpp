#pragma once

#include "dito/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace dito {

inline constexpr double kBasisTolerance = 1e-12;

struct ValidationReport {
    double orthogonality_defect = 0.0;  ///< max |E E^T - I|
    bool first_row_positive = false;
    double probability_defect = 0.0;    ///< |sum p_j - 1|
    double mean_defect = 0.0;           ///< max_k |sum_j p_j e_j^k|
    double covariance_defect = 0.0;     ///< max_{k,l} |sum_j p_j e_j^k e_j^l - delta_kl|

    bool passed(double tol = kBasisTolerance) const {
        return first_row_positive && orthogonality_defect <= tol && probability_defect <= tol &&
               mean_defect <= tol && covariance_defect <= tol;
    }
    std::string describe() const;
};

/**
 * An (n+1)x(n+1) orthogonal matrix with strictly positive first row, and the
 * innovation law it induces: tau takes the value e_j = (e_{1,j},...,e_{n,j}) / e_{0,j}
 * with probability e_{0,j}^2. Immutable once built; construction validates and
 * throws BasisError on failure.
 */
class OrthoBasis {
public:
    explicit OrthoBasis(StateMatrix matrix);

    int n() const { return n_; }
    int states() const { return n_ + 1; }

    const StateMatrix& matrix() const { return matrix_; }
    double entry(int i, int j) const { return matrix_(i, j); }

    const Point& jump(int j) const { return jumps_[static_cast<std::size_t>(j)]; }
    const std::vector<Point>& jumps() const { return jumps_; }

    double prob(int j) const { return probs_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& probs() const { return probs_; }

    bool uniform() const;

private:
    int n_;
    StateMatrix matrix_;
    std::vector<Point> jumps_;
    std::vector<double> probs_;
};

/// n = 1, tau = +-1 with probability 1/2.
OrthoBasis make_binomial();

/// Real characters of the cyclic group C_{n+1} under phi(x + iy) = x + y
/// (the Hartley "cas" kernel). Columns are ordered by group element j = 0..n.
OrthoBasis make_cyclic(int n);

/// First row sqrt(p); the remaining rows come from the Householder reflection
/// sending the first unit vector to that row, followed by one Gram-Schmidt pass.
OrthoBasis make_from_probs(std::span<const double> probs);

ValidationReport validate(const StateMatrix& matrix);
ValidationReport validate(const OrthoBasis& basis);

}  // namespace dito
