#pragma once

#include "sigle/numerics.hpp"

namespace sigle {

/// Shared experiment context: design matrix, binary response, penalty.
struct DesignProblem {
    Matrix X;
    Vector Y;
    double lambda = 0.0;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }
    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;
};

double sigmoid(double x);
Vector sigmoid(const Vector& x);
/// log(1 + e^t), overflow-safe.
double softplus(double t);
/// sigma'(x) = sigma(x) (1 - sigma(x)), applied entrywise to a linear predictor.
Vector sigmoid_deriv(const Vector& xtheta);

double neg_log_likelihood(const Vector& theta, const Matrix& x, const Vector& y);
Vector score(const Vector& theta, const Matrix& x, const Vector& y);
/// X_M^T Diag(sigma'(X_M theta)) X_M, the Hessian of the restricted likelihood.
Matrix fisher_info(const Vector& theta, const Matrix& x_m);

/// Unconditional Bernoulli log-mass log P_pi(y) for y in {0,1}^N.
double log_bernoulli_mass(const Vector& y, const Vector& pi);

}  // namespace sigle
