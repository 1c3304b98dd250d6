#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace sigle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Splittable counter-based generator (splitmix64 core with per-stream
/// gammas). Identical seeds produce identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t gamma = kGoldenGamma);

    std::uint64_t next_u64();
    /// Uniform in [0,1) with 53 random bits.
    double uniform();
    bool bernoulli(double p);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal();

    /// New statistically independent generator; advances this one.
    Rng split();
    /// Deterministic per-stream generator, independent of call order.
    static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream);

private:
    static constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
    static std::uint64_t mix64(std::uint64_t z);
    static std::uint64_t mix_gamma(std::uint64_t z);

    std::uint64_t state_;
    std::uint64_t gamma_;
};

struct SpectralDecomposition {
    Vector eigenvalues;   // descending
    Matrix eigenvectors;  // column k pairs with eigenvalues[k]
};

SpectralDecomposition eigh(const Matrix& a);

struct InvSqrtResult {
    Matrix matrix;
    int floored = 0;  // eigenvalues raised to the floor
};

/// Symmetric inverse square root V diag(max(l, floor))^{-1/2} V^T.
InvSqrtResult inv_sqrt_psd(const Matrix& a, double floor = 1e-12);

/// Orthogonal projection of v onto the column span of x (thin QR).
Vector project_colspan(const Matrix& x, const Vector& v);
Vector project_colspan_orth(const Matrix& x, const Vector& v);

double normal_cdf(double x);
/// log of the upper tail P(Z > x), finite for x up to ~1e8.
double normal_log_tail(double x);
/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
double chi2_cdf(int dof, double x);
double chi2_quantile(int dof, double q);
/// CDF at x of N(mu, sigma2) truncated to [lower, upper]; tail-safe.
double truncated_normal_cdf(double x, double mu, double sigma2, double lower,
                            double upper);

double log_sum_exp(std::span<const double> v);

}  // namespace sigle
