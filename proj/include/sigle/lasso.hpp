#pragma once

#include <vector>

#include "sigle/glm.hpp"

namespace sigle {

struct SolverOptions {
    int max_iter = 20000;
    double kkt_tolerance = 1e-6;
    double active_tolerance = 1e-4;
    bool acceleration = true;  // FISTA when true, plain ISTA otherwise
    bool newton_polish = true;
    int check_interval = 8;
};

/// Solution of the generalized linear lasso with its KKT proof obligations.
struct LassoCertificate {
    Vector theta_hat;
    Vector sign_vector;        // (1/lambda) X^T (Y - sigma(X theta_hat))
    std::vector<int> support;  // sorted indices of nonzero coefficients
    double kkt_residual = 0.0;
    bool degenerate = false;   // |S_k| ~ 1 with theta_k = 0 for some k outside support
    bool converged = false;
    int iterations = 0;
};

/// Reusable solver for one (X, lambda); precomputes the step seed 1/L,
/// L = ||X||^2 / 4. solve() keeps no mutable state between calls.
class GllSolver {
public:
    GllSolver(Matrix x, double lambda, SolverOptions opts = {});

    LassoCertificate solve(const Vector& y, const Vector* warm_start = nullptr) const;

    const Matrix& design() const { return x_; }
    double lambda() const { return lambda_; }
    const SolverOptions& options() const { return opts_; }

private:
    Matrix x_;
    double lambda_;
    SolverOptions opts_;
    double lipschitz_;
};

LassoCertificate solve_gll(const DesignProblem& prob, const SolverOptions& opts = {});

Vector sign_vector(const DesignProblem& prob, const Vector& theta_hat);

std::vector<int> equicorrelation_set(const Vector& sign_vec, double active_tolerance);

}  // namespace sigle
