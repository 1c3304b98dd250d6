#include "sigle/lasso.hpp"

#include <algorithm>
#include <cmath>

namespace sigle {

namespace {

double spectral_norm_sq(const Matrix& x) {
    // Power iteration on X^T X; deterministic start.
    const Eigen::Index d = x.cols();
    Vector v = Vector::Ones(d).normalized();
    double prev = 0;
    for (int it = 0; it < 500; ++it) {
        Vector w = x.transpose() * (x * v);
        double norm = w.norm();
        if (norm == 0) return 0;
        v = w / norm;
        if (std::abs(norm - prev) <= 1e-12 * norm) return norm;
        prev = norm;
    }
    return prev;
}

Vector soft_threshold(const Vector& v, double t) {
    Vector out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        double a = std::abs(v(k)) - t;
        out(k) = a > 0 ? (v(k) > 0 ? a : -a) : 0.0;
    }
    return out;
}

struct KktCheck {
    Vector sign_vector;
    double residual;
};

KktCheck kkt_at(const Matrix& x, const Vector& y, double lambda, const Vector& theta) {
    KktCheck out;
    out.sign_vector = x.transpose() * (y - sigmoid(x * theta)) / lambda;
    double res = 0;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        if (theta(k) != 0.0) {
            double s = theta(k) > 0 ? 1.0 : -1.0;
            res = std::max(res, std::abs(out.sign_vector(k) - s));
        } else {
            res = std::max(res, std::abs(out.sign_vector(k)) - 1.0);
        }
    }
    out.residual = std::max(res, 0.0);
    return out;
}

std::vector<int> nonzero_support(const Vector& theta) {
    std::vector<int> out;
    for (Eigen::Index k = 0; k < theta.size(); ++k)
        if (theta(k) != 0.0) out.push_back(static_cast<int>(k));
    return out;
}

// Newton refinement of the smooth restricted problem
//   min_theta_M  L_N(theta_M) + lambda <S_M, theta_M>,
// with the signs S_M frozen. Returns false when a coordinate wants to
// cross zero, i.e. the support guess was wrong.
bool polish_on_support(const Matrix& x, const Vector& y, double lambda,
                       const std::vector<int>& support, Vector& theta, double grad_tol) {
    const int s = static_cast<int>(support.size());
    if (s == 0) return true;
    Matrix xm(x.rows(), s);
    for (int j = 0; j < s; ++j) xm.col(j) = x.col(support[j]);
    Vector tm(s), sm(s);
    for (int j = 0; j < s; ++j) {
        tm(j) = theta(support[j]);
        sm(j) = tm(j) > 0 ? 1.0 : -1.0;
    }
    auto objective = [&](const Vector& t) {
        Vector xt = xm * t;
        double acc = 0;
        for (Eigen::Index i = 0; i < xt.size(); ++i) acc += softplus(xt(i)) - y(i) * xt(i);
        return acc + lambda * sm.dot(t);
    };
    double fcur = objective(tm);
    for (int it = 0; it < 60; ++it) {
        Vector xt = xm * tm;
        Vector grad = xm.transpose() * (sigmoid(xt) - y) + lambda * sm;
        if (grad.lpNorm<Eigen::Infinity>() <= grad_tol) break;
        Matrix h = xm.transpose() * sigmoid_deriv(xt).asDiagonal() * xm;
        h.diagonal().array() += 1e-12 * (1.0 + h.trace());
        Vector dir = h.ldlt().solve(-grad);
        if (!dir.allFinite()) return false;
        // Step must keep every coordinate strictly on its sign.
        double alpha_max = 1.0;
        for (int j = 0; j < s; ++j)
            if (dir(j) != 0.0 && (tm(j) + dir(j)) * sm(j) <= 0.0)
                alpha_max = std::min(alpha_max, 0.95 * (-tm(j) / dir(j)));
        if (alpha_max <= 1e-10) return false;
        double alpha = alpha_max;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            Vector cand = tm + alpha * dir;
            double fc = objective(cand);
            if (fc <= fcur + 1e-14 * std::abs(fcur)) {
                tm = cand;
                fcur = fc;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) break;
    }
    for (int j = 0; j < s; ++j) theta(support[j]) = tm(j);
    return true;
}

}  // namespace

GllSolver::GllSolver(Matrix x, double lambda, SolverOptions opts)
    : x_(std::move(x)), lambda_(lambda), opts_(opts) {
    lipschitz_ = spectral_norm_sq(x_) * 0.25 * (1.0 + 1e-9) + 1e-300;
}

LassoCertificate GllSolver::solve(const Vector& y, const Vector* warm_start) const {
    const Eigen::Index d = x_.cols();
    const double step = 1.0 / lipschitz_;
    const double thresh = lambda_ * step;

    Vector theta = warm_start && warm_start->size() == d ? *warm_start : Vector::Zero(d);
    Vector z = theta;
    double tk = 1.0;

    LassoCertificate cert;
    cert.iterations = 0;

    KktCheck kc = kkt_at(x_, y, lambda_, theta);
    std::vector<int> last_support = nonzero_support(theta);

    auto finalize = [&](const KktCheck& check, int iters) {
        cert.theta_hat = theta;
        cert.sign_vector = check.sign_vector;
        cert.support = nonzero_support(theta);
        cert.kkt_residual = check.residual;
        cert.converged = check.residual <= opts_.kkt_tolerance;
        cert.iterations = iters;
        cert.degenerate = false;
        for (Eigen::Index k = 0; k < d; ++k)
            if (theta(k) == 0.0 && std::abs(check.sign_vector(k)) >= 1.0 - opts_.active_tolerance)
                cert.degenerate = true;
    };

    if (kc.residual <= opts_.kkt_tolerance) {
        finalize(kc, 0);
        return cert;
    }

    int it = 1;
    for (; it <= opts_.max_iter; ++it) {
        Vector grad = x_.transpose() * (sigmoid(x_ * z) - y);
        Vector theta_next = soft_threshold(z - step * grad, thresh);
        if (opts_.acceleration) {
            double tk_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            Vector diff = theta_next - theta;
            // Gradient-style restart: drop momentum when it fights the step.
            if ((z - theta_next).dot(diff) > 0) {
                tk_next = 1.0;
                z = theta_next;
            } else {
                z = theta_next + ((tk - 1.0) / tk_next) * diff;
            }
            tk = tk_next;
        } else {
            z = theta_next;
        }
        theta = theta_next;

        bool check_now = (it % opts_.check_interval == 0) || it == opts_.max_iter;
        if (!check_now) continue;

        kc = kkt_at(x_, y, lambda_, theta);
        std::vector<int> support = nonzero_support(theta);
        if (kc.residual <= opts_.kkt_tolerance) {
            finalize(kc, it);
            return cert;
        }
        if (opts_.newton_polish && support == last_support && kc.residual < 0.5) {
            Vector polished = theta;
            if (polish_on_support(x_, y, lambda_, support, polished, 0.2 * lambda_ * opts_.kkt_tolerance)) {
                KktCheck kp = kkt_at(x_, y, lambda_, polished);
                if (kp.residual <= opts_.kkt_tolerance) {
                    theta = polished;
                    finalize(kp, it);
                    return cert;
                }
                if (kp.residual < kc.residual) {
                    // Keep the improvement and let the proximal loop fix the support.
                    theta = polished;
                    z = polished;
                    tk = 1.0;
                    kc = kp;
                }
            }
        }
        last_support = std::move(support);
    }

    finalize(kc, opts_.max_iter);
    return cert;
}

LassoCertificate solve_gll(const DesignProblem& prob, const SolverOptions& opts) {
    prob.validate();
    GllSolver solver(prob.X, prob.lambda, opts);
    return solver.solve(prob.Y);
}

Vector sign_vector(const DesignProblem& prob, const Vector& theta_hat) {
    return prob.X.transpose() * (prob.Y - sigmoid(prob.X * theta_hat)) / prob.lambda;
}

std::vector<int> equicorrelation_set(const Vector& sign_vec, double active_tolerance) {
    std::vector<int> out;
    for (Eigen::Index k = 0; k < sign_vec.size(); ++k)
        if (std::abs(sign_vec(k)) >= 1.0 - active_tolerance) out.push_back(static_cast<int>(k));
    return out;
}

}  // namespace sigle
