#include "sigle/glm.hpp"

#include <cmath>
#include <stdexcept>

#include "sigle/errors.hpp"

namespace sigle {

void DesignProblem::validate() const {
    if (X.rows() < 1 || X.cols() < 1) throw std::invalid_argument("DesignProblem: empty design");
    if (Y.size() != X.rows()) throw std::invalid_argument("DesignProblem: |Y| != rows(X)");
    if (!(lambda > 0)) throw std::invalid_argument("DesignProblem: lambda must be positive");
    for (Eigen::Index i = 0; i < Y.size(); ++i)
        if (Y(i) != 0.0 && Y(i) != 1.0) throw std::invalid_argument("DesignProblem: Y must be binary");
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

Vector sigmoid(const Vector& x) {
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = sigmoid(x(i));
    return out;
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

Vector sigmoid_deriv(const Vector& xtheta) {
    Vector out(xtheta.size());
    for (Eigen::Index i = 0; i < xtheta.size(); ++i) {
        double s = sigmoid(xtheta(i));
        out(i) = s * (1.0 - s);
    }
    return out;
}

double neg_log_likelihood(const Vector& theta, const Matrix& x, const Vector& y) {
    if (theta.size() != x.cols()) throw DimensionMismatch("neg_log_likelihood: theta/X mismatch");
    if (y.size() != x.rows()) throw DimensionMismatch("neg_log_likelihood: Y/X mismatch");
    Vector xt = x * theta;
    double acc = 0;
    for (Eigen::Index i = 0; i < xt.size(); ++i) acc += softplus(xt(i)) - y(i) * xt(i);
    return acc;
}

Vector score(const Vector& theta, const Matrix& x, const Vector& y) {
    if (theta.size() != x.cols()) throw DimensionMismatch("score: theta/X mismatch");
    if (y.size() != x.rows()) throw DimensionMismatch("score: Y/X mismatch");
    return x.transpose() * (sigmoid(x * theta) - y);
}

Matrix fisher_info(const Vector& theta, const Matrix& x_m) {
    if (theta.size() != x_m.cols()) throw DimensionMismatch("fisher_info: theta/X_M mismatch");
    Vector w = sigmoid_deriv(x_m * theta);
    return x_m.transpose() * w.asDiagonal() * x_m;
}

double log_bernoulli_mass(const Vector& y, const Vector& pi) {
    if (y.size() != pi.size()) throw DimensionMismatch("log_bernoulli_mass: length mismatch");
    double acc = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        acc += y(i) != 0.0 ? std::log(pi(i)) : std::log1p(-pi(i));
    return acc;
}

}  // namespace sigle
