#pragma once

#include "sigle/glm.hpp"

namespace sigle {

struct PsiOptions {
    double tolerance = 1e-8;       // scaled by (1 + ||rho||)
    int max_iter = 300;
    double divergence_cap = 1e3;   // ||theta|| beyond this reads as rho outside Im(Xi)
};

struct PsiResult {
    Vector theta;
    double residual = 0.0;   // ||Xi(theta) - rho||_2
    bool converged = false;
    bool diverged = false;   // rho outside Im(Xi): the MLE does not exist
    int iterations = 0;
};

/// Xi(theta) = X_M^T sigma(X_M theta).
Vector xi(const Vector& theta, const Matrix& x_m);

/// Psi = Xi^{-1} by damped Newton on the soft-response likelihood.
/// Divergence is a semantic outcome (separable data), not a failure.
PsiResult psi(const Vector& rho, const Matrix& x_m, const PsiOptions& opts = {});

struct ThetaBarOptions {
    double epsilon = -1.0;       // < 0 means 1e-10 * s
    double learning_rate = 1.0;  // fraction of 1/L_G
    long max_iter = 200000;
};

/// theta_bar(pi_bar) = Psi(X_M^T pi_bar) via least-squares warm start on the
/// logits followed by gradient descent on G(theta) = ||Xi(theta) - X_M^T pi_bar||^2.
PsiResult theta_bar(const Vector& pi_bar, const Matrix& x_m, const ThetaBarOptions& opts = {});

}  // namespace sigle
