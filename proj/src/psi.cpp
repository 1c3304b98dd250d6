#include "sigle/psi.hpp"

#include <cmath>

#include "sigle/errors.hpp"

namespace sigle {

Vector xi(const Vector& theta, const Matrix& x_m) {
    if (theta.size() != x_m.cols()) throw DimensionMismatch("xi: theta/X_M mismatch");
    return x_m.transpose() * sigmoid(x_m * theta);
}

PsiResult psi(const Vector& rho, const Matrix& x_m, const PsiOptions& opts) {
    if (rho.size() != x_m.cols()) throw DimensionMismatch("psi: rho/X_M mismatch");
    const Eigen::Index s = x_m.cols();
    const double tol = opts.tolerance * (1.0 + rho.norm());

    // F(theta) = sum_i softplus(x_i theta) - <rho, theta> is strictly convex
    // with gradient Xi(theta) - rho; its minimizer (when attained) is Psi(rho).
    auto value = [&](const Vector& theta) {
        Vector xt = x_m * theta;
        double acc = 0;
        for (Eigen::Index i = 0; i < xt.size(); ++i) acc += softplus(xt(i));
        return acc - rho.dot(theta);
    };

    PsiResult out;
    Vector theta = Vector::Zero(s);
    double fcur = value(theta);
    Vector grad = xi(theta, x_m) - rho;

    for (int it = 0; it < opts.max_iter; ++it) {
        out.iterations = it;
        out.residual = grad.norm();
        if (out.residual <= tol) {
            out.theta = theta;
            out.converged = true;
            return out;
        }
        if (theta.norm() > opts.divergence_cap) break;

        Matrix h = fisher_info(theta, x_m);
        double ridge = 1e-14 * (1.0 + h.trace());
        h.diagonal().array() += ridge;
        Vector dir = h.ldlt().solve(-grad);
        if (!dir.allFinite()) {
            out.theta = theta;
            out.diverged = true;
            return out;
        }
        double alpha = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            Vector cand = theta + alpha * dir;
            double fc = value(cand);
            if (fc < fcur - 1e-16 * std::abs(fcur) || (ls == 0 && fc <= fcur)) {
                theta = cand;
                fcur = fc;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) break;  // flat to machine precision without reaching tol
        grad = xi(theta, x_m) - rho;
    }

    out.theta = theta;
    out.residual = grad.norm();
    out.converged = out.residual <= tol;
    out.diverged = !out.converged;
    return out;
}

PsiResult theta_bar(const Vector& pi_bar, const Matrix& x_m, const ThetaBarOptions& opts) {
    const Eigen::Index n = x_m.rows();
    const Eigen::Index s = x_m.cols();
    if (pi_bar.size() != n) throw DimensionMismatch("theta_bar: pi_bar/X_M mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(pi_bar(i) > 0.0 && pi_bar(i) < 1.0))
            throw Error("theta_bar: pi_bar must lie strictly inside (0,1)^N");

    const double eps = opts.epsilon > 0 ? opts.epsilon : 1e-10 * static_cast<double>(s);
    const Vector target = x_m.transpose() * pi_bar;

    auto g_value = [&](const Vector& theta) { return (xi(theta, x_m) - target).squaredNorm(); };

    // Least-squares warm start on the logits.
    Vector logits(n);
    for (Eigen::Index i = 0; i < n; ++i) logits(i) = std::log(pi_bar(i) / (1.0 - pi_bar(i)));
    Vector theta = x_m.householderQr().solve(logits);

    PsiResult out;
    double g = g_value(theta);
    if (g < eps) {
        out.theta = theta;
        out.residual = std::sqrt(g);
        out.converged = true;
        return out;
    }

    // L_G = (1/4) ||X_M^T X_M|| * ||X_M||_{1,2}.
    Eigen::SelfAdjointEigenSolver<Matrix> es(x_m.transpose() * x_m);
    double gram_norm = es.eigenvalues().cwiseAbs().maxCoeff();
    double row_l1_sq = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double l1 = x_m.row(i).lpNorm<1>();
        row_l1_sq += l1 * l1;
    }
    const double lg = 0.25 * gram_norm * std::sqrt(row_l1_sq);
    const double base_step = opts.learning_rate / lg;

    long t = 0;
    for (; t < opts.max_iter && g > eps; ++t) {
        Vector grad =
            2.0 * (x_m.transpose() * (sigmoid_deriv(x_m * theta).asDiagonal() * (x_m * (x_m.transpose() * (sigmoid(x_m * theta) - pi_bar)))));
        double step = base_step;
        Vector cand = theta - step * grad;
        double gc = g_value(cand);
        // Halve on the rare non-decrease so iterates stay monotone.
        int halvings = 0;
        while (gc > g && halvings < 60) {
            step *= 0.5;
            cand = theta - step * grad;
            gc = g_value(cand);
            ++halvings;
        }
        if (gc > g) break;
        theta = cand;
        g = gc;
    }

    out.theta = theta;
    out.residual = std::sqrt(g);
    out.converged = g <= eps;
    out.iterations = static_cast<int>(t);
    return out;
}

}  // namespace sigle
