#include "dito/basis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dito {

namespace {

void check_square(const StateMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 2) {
        throw BasisError("basis matrix must be square with at least 2 rows");
    }
    if (m.rows() > kMaxStates) {
        throw BasisError("basis dimension exceeds kMaxFactors");
    }
}

}  // namespace

std::string ValidationReport::describe() const {
    std::ostringstream os;
    os << "orthogonality=" << orthogonality_defect << " first_row_positive=" << first_row_positive
       << " probability=" << probability_defect << " mean=" << mean_defect
       << " covariance=" << covariance_defect;
    return os.str();
}

ValidationReport validate(const StateMatrix& matrix) {
    check_square(matrix);
    const int dim = static_cast<int>(matrix.rows());
    const int n = dim - 1;

    ValidationReport r;
    StateMatrix gram = matrix * matrix.transpose();
    gram -= StateMatrix::Identity(dim, dim);
    r.orthogonality_defect = gram.cwiseAbs().maxCoeff();

    r.first_row_positive = (matrix.row(0).array() > 0.0).all();

    // Moments are computed from the derived law, so they are meaningful even
    // when the matrix is not quite orthogonal. A zero first-row entry makes
    // the jump undefined; report it as a failure rather than dividing by zero.
    double psum = 0.0;
    for (int j = 0; j < dim; ++j) psum += matrix(0, j) * matrix(0, j);
    r.probability_defect = std::abs(psum - 1.0);

    if ((matrix.row(0).array() == 0.0).any()) {
        r.mean_defect = r.covariance_defect = std::numeric_limits<double>::infinity();
        return r;
    }
    for (int k = 1; k <= n; ++k) {
        double mean = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double p = matrix(0, j) * matrix(0, j);
            mean += p * matrix(k, j) / matrix(0, j);
        }
        r.mean_defect = std::max(r.mean_defect, std::abs(mean));
        for (int l = 1; l <= n; ++l) {
            double cov = 0.0;
            for (int j = 0; j < dim; ++j) {
                const double p = matrix(0, j) * matrix(0, j);
                cov += p * (matrix(k, j) / matrix(0, j)) * (matrix(l, j) / matrix(0, j));
            }
            r.covariance_defect = std::max(r.covariance_defect, std::abs(cov - (k == l ? 1.0 : 0.0)));
        }
    }
    return r;
}

ValidationReport validate(const OrthoBasis& basis) { return validate(basis.matrix()); }

OrthoBasis::OrthoBasis(StateMatrix matrix) : n_(0), matrix_(std::move(matrix)) {
    const ValidationReport report = validate(matrix_);
    if (!report.passed()) {
        throw BasisError("invalid orthogonal basis: " + report.describe());
    }
    n_ = static_cast<int>(matrix_.rows()) - 1;
    jumps_.reserve(static_cast<std::size_t>(n_ + 1));
    probs_.reserve(static_cast<std::size_t>(n_ + 1));
    for (int j = 0; j <= n_; ++j) {
        const double e0 = matrix_(0, j);
        Point e(n_);
        for (int k = 1; k <= n_; ++k) e(k - 1) = matrix_(k, j) / e0;
        jumps_.push_back(e);
        probs_.push_back(e0 * e0);
    }
}

bool OrthoBasis::uniform() const {
    const double first = matrix_(0, 0);
    for (int j = 1; j <= n_; ++j) {
        if (std::abs(matrix_(0, j) - first) > kBasisTolerance) return false;
    }
    return true;
}

OrthoBasis make_binomial() {
    const double a = 1.0 / std::numbers::sqrt2;
    StateMatrix m(2, 2);
    m << a, a, a, -a;
    return OrthoBasis(std::move(m));
}

OrthoBasis make_cyclic(int n) {
    if (n < 1 || n > kMaxFactors) {
        throw InvalidArgument("make_cyclic: n must be in [1, " + std::to_string(kMaxFactors) + "]");
    }
    const int dim = n + 1;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    StateMatrix m(dim, dim);
    for (int k = 0; k < dim; ++k) {
        for (int j = 0; j < dim; ++j) {
            // Reduce jk mod (n+1) before forming the angle so equal group
            // elements give bit-identical entries.
            const int idx = (j * k) % dim;
            const double angle = 2.0 * std::numbers::pi * idx / dim;
            m(k, j) = (std::cos(angle) + std::sin(angle)) * scale;
        }
    }
    return OrthoBasis(std::move(m));
}

OrthoBasis make_from_probs(std::span<const double> probs) {
    const int dim = static_cast<int>(probs.size());
    if (dim < 2 || dim > kMaxStates) {
        throw InvalidArgument("make_from_probs: need between 2 and " + std::to_string(kMaxStates) +
                              " probabilities");
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) throw InvalidArgument("make_from_probs: probabilities must be positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw InvalidArgument("make_from_probs: probabilities must sum to 1");
    }

    StateVector u(dim);
    for (int j = 0; j < dim; ++j) u(j) = std::sqrt(probs[static_cast<std::size_t>(j)]);

    // Householder Q = I - 2 v v^T / (v^T v) with v = e_1 - u maps e_1 to u.
    // Q is symmetric, so its first row is u as well. u != e_1 since every p_j > 0.
    StateVector v = -u;
    v(0) += 1.0;
    StateMatrix q = StateMatrix::Identity(dim, dim) - (2.0 / v.squaredNorm()) * (v * v.transpose());
    q.row(0) = u.transpose();

    // Gram-Schmidt polish on rows 1..n against the (exact) first row.
    for (int i = 1; i < dim; ++i) {
        for (int l = 0; l < i; ++l) q.row(i) -= q.row(i).dot(q.row(l)) * q.row(l);
        q.row(i) /= q.row(i).norm();
    }
    return OrthoBasis(std::move(q));
}

}  // namespace dito
