#include "sigle/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "sigle/errors.hpp"

namespace sigle {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t gamma) : state_(seed), gamma_(gamma | 1ULL) {}

std::uint64_t Rng::mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::mix_gamma(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xFF51AFD7ED558CCDULL;
    z ^= z >> 33;
    z *= 0xC4CEB9FE1A85EC53ULL;
    z ^= z >> 33;
    z |= 1ULL;
    if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xAAAAAAAAAAAAAAAAULL;
    return z;
}

std::uint64_t Rng::next_u64() {
    state_ += gamma_;
    return mix64(state_);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

bool Rng::bernoulli(double p) { return uniform() < p; }

std::uint64_t Rng::below(std::uint64_t n) {
    // Lemire-style rejection keeps the draw unbiased.
    std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
        std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

double Rng::normal() {
    // Box-Muller on fresh uniforms; the discarded twin keeps streams simple.
    double u1 = 0;
    do { u1 = uniform(); } while (u1 <= 0);
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

Rng Rng::split() {
    std::uint64_t seed = next_u64();
    std::uint64_t gamma = mix_gamma(next_u64());
    return Rng(seed, gamma);
}

Rng Rng::for_stream(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t seed = mix64(master_seed + (stream + 1) * kGoldenGamma);
    std::uint64_t gamma = mix_gamma(master_seed ^ mix64(stream * 0xDA942042E4DD58B5ULL + 1));
    return Rng(seed, gamma);
}

SpectralDecomposition eigh(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw Error("eigh: eigendecomposition failed");
    const Eigen::Index n = a.rows();
    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    // Eigen returns ascending order; flip to descending.
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = es.eigenvalues()(n - 1 - k);
        out.eigenvectors.col(k) = es.eigenvectors().col(n - 1 - k);
    }
    return out;
}

InvSqrtResult inv_sqrt_psd(const Matrix& a, double floor) {
    SpectralDecomposition sd = eigh(a);
    InvSqrtResult out;
    Vector inv = sd.eigenvalues;
    for (Eigen::Index k = 0; k < inv.size(); ++k) {
        double l = inv(k);
        if (l < floor) {
            l = floor;
            ++out.floored;
        }
        inv(k) = 1.0 / std::sqrt(l);
    }
    out.matrix = sd.eigenvectors * inv.asDiagonal() * sd.eigenvectors.transpose();
    return out;
}

Vector project_colspan(const Matrix& x, const Vector& v) {
    if (x.rows() != v.size()) throw DimensionMismatch("project_colspan: length mismatch");
    Eigen::HouseholderQR<Matrix> qr(x);
    Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), std::min(x.rows(), x.cols()));
    return q * (q.transpose() * v);
}

Vector project_colspan_orth(const Matrix& x, const Vector& v) {
    return v - project_colspan(x, v);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_log_tail(double x) {
    if (x < 30.0) {
        double q = 0.5 * std::erfc(x / kSqrt2);
        if (q > 0) return std::log(q);
    }
    // Asymptotic expansion of Mills' ratio for the far tail.
    double inv2 = 1.0 / (x * x);
    double series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)));
    return -0.5 * x * x - std::log(x) - kLogSqrt2Pi + std::log(series);
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-17) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0 || x < 0) throw Error("regularized_gamma_p: domain");
    if (x == 0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_cdf(int dof, double x) {
    if (dof < 1) throw Error("chi2_cdf: dof must be >= 1");
    if (x <= 0) return 0.0;
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double q) {
    if (dof < 1) throw Error("chi2_quantile: dof must be >= 1");
    if (!(q > 0.0 && q < 1.0)) throw Error("chi2_quantile: q must be in (0,1)");
    double hi = static_cast<double>(dof);
    while (chi2_cdf(dof, hi) < q) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (chi2_cdf(dof, mid) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double truncated_normal_cdf(double x, double mu, double sigma2, double lower, double upper) {
    if (!(sigma2 > 0)) throw Error("truncated_normal_cdf: sigma2 must be positive");
    if (!(lower < upper)) throw EmptyTruncation("truncated_normal_cdf: empty interval");
    double sigma = std::sqrt(sigma2);
    double a = (lower - mu) / sigma;
    double b = (upper - mu) / sigma;
    double z = std::clamp((x - mu) / sigma, a, b);
    if (a >= 5.0) {
        // Both endpoints deep in the upper tail; work with log tail masses.
        double la = normal_log_tail(a);
        double lz = normal_log_tail(z);
        double lb = std::isinf(b) ? -std::numeric_limits<double>::infinity() : normal_log_tail(b);
        double num = -std::expm1(lz - la);
        double den = std::isinf(lb) ? 1.0 : -std::expm1(lb - la);
        return den > 0 ? num / den : (z >= b ? 1.0 : 0.0);
    }
    if (b <= -5.0) return 1.0 - truncated_normal_cdf(-x, -mu, sigma2, -upper, -lower);
    double pa = normal_cdf(a);
    double pb = normal_cdf(b);
    double den = pb - pa;
    if (den <= 0) return z >= b ? 1.0 : 0.0;
    return std::clamp((normal_cdf(z) - pa) / den, 0.0, 1.0);
}

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double m = *std::max_element(v.begin(), v.end());
    if (std::isinf(m)) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace sigle
