#include "sigle/event.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "sigle/errors.hpp"

namespace sigle {

std::uint64_t state_code(const Vector& y) {
    const int n = static_cast<int>(y.size());
    if (n > 63) throw CapExceeded("state_code: N > 63");
    std::uint64_t code = 0;
    for (int i = 0; i < n; ++i) code = (code << 1) | (y(i) != 0.0 ? 1ULL : 0ULL);
    return code;
}

Vector state_from_code(std::uint64_t code, int n) {
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = (code >> (n - 1 - i)) & 1ULL ? 1.0 : 0.0;
    return y;
}

std::string state_bitstring(const Vector& y) {
    std::string out(static_cast<std::size_t>(y.size()), '0');
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 0.0) out[static_cast<std::size_t>(i)] = '1';
    return out;
}

Vector state_from_bitstring(const std::string& bits) {
    Vector y(static_cast<Eigen::Index>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) y(static_cast<Eigen::Index>(i)) = bits[i] == '1' ? 1.0 : 0.0;
    return y;
}

Matrix EventSpec::x_m() const {
    Matrix out(X.rows(), static_cast<Eigen::Index>(M.size()));
    for (std::size_t j = 0; j < M.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = X.col(M[j]);
    return out;
}

Matrix EventSpec::x_off() const {
    std::vector<char> in_m(static_cast<std::size_t>(X.cols()), 0);
    for (int k : M) in_m[static_cast<std::size_t>(k)] = 1;
    Matrix out(X.rows(), X.cols() - static_cast<Eigen::Index>(M.size()));
    Eigen::Index j = 0;
    for (Eigen::Index k = 0; k < X.cols(); ++k)
        if (!in_m[static_cast<std::size_t>(k)]) out.col(j++) = X.col(k);
    return out;
}

void EventSpec::validate(double rank_tolerance) const {
    if (!(lambda > 0)) throw std::invalid_argument("EventSpec: lambda must be positive");
    if (!(delta > 0)) throw std::invalid_argument("EventSpec: delta must be positive");
    if (!std::is_sorted(M.begin(), M.end())) throw std::invalid_argument("EventSpec: M must be sorted");
    for (int k : M)
        if (k < 0 || k >= X.cols()) throw std::invalid_argument("EventSpec: M index out of range");
    if (!M.empty()) {
        Eigen::JacobiSVD<Matrix> svd(x_m());
        if (svd.singularValues().minCoeff() <= rank_tolerance)
            throw std::invalid_argument("EventSpec: X_M is rank deficient");
    }
}

double b_delta(double x, double delta) {
    if (x < 0) return 1.0;
    if (x >= delta) return 0.0;
    return 1.0 - std::sqrt(x / delta);
}

EventOracle::EventOracle(EventSpec spec, SolverOptions opts)
    : spec_(std::move(spec)), solver_(spec_.X, spec_.lambda, opts) {
    memoize_ = spec_.n() <= 63;
}

EventMembershipReport EventOracle::compute(const Vector& y) const {
    LassoCertificate cert = solver_.solve(y);
    if (!cert.converged) throw Error("EventOracle: lasso solve did not converge");
    EventMembershipReport rep;
    rep.in_event = cert.support == spec_.M;
    double off_max = 0.0;
    std::vector<char> in_m(static_cast<std::size_t>(spec_.X.cols()), 0);
    for (int k : spec_.M) in_m[static_cast<std::size_t>(k)] = 1;
    for (Eigen::Index k = 0; k < cert.sign_vector.size(); ++k)
        if (!in_m[static_cast<std::size_t>(k)]) off_max = std::max(off_max, std::abs(cert.sign_vector(k)));
    rep.dual_margin = 1.0 - off_max;
    rep.p1 = b_delta(rep.dual_margin, spec_.delta);
    rep.p2 = 0.0;
    rep.sign_subvector.resize(static_cast<Eigen::Index>(spec_.M.size()));
    for (std::size_t j = 0; j < spec_.M.size(); ++j) {
        double s = cert.sign_vector(spec_.M[j]);
        rep.sign_subvector(static_cast<Eigen::Index>(j)) = s;
        rep.p2 += std::max(0.0, 1.0 - std::abs(s));
    }
    if (!spec_.M.empty()) rep.p2 /= static_cast<double>(spec_.M.size());
    rep.energy = std::max(rep.p1, rep.p2);
    return rep;
}

const EventMembershipReport& EventOracle::evaluate(const Vector& y) {
    if (!memoize_) {
        scratch_ = compute(y);
        return scratch_;
    }
    std::uint64_t key = state_code(y);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    EventMembershipReport rep = compute(y);
    if (cache_.size() >= kCacheCap) {
        scratch_ = rep;
        return scratch_;
    }
    return cache_.emplace(key, std::move(rep)).first->second;
}

EventMembershipReport energy(const Vector& y, const EventSpec& spec, const SolverOptions& opts) {
    EventOracle oracle(spec, opts);
    return oracle.evaluate(y);
}

Vector EnumeratedEvent::conditional_probabilities(const Vector& pi) const {
    Vector logp(static_cast<Eigen::Index>(codes.size()));
    for (std::size_t k = 0; k < codes.size(); ++k) {
        Vector y = member(k);
        double acc = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            acc += y(i) != 0.0 ? std::log(pi(i)) : std::log1p(-pi(i));
        logp(static_cast<Eigen::Index>(k)) = acc;
    }
    double lse = log_sum_exp(std::span<const double>(logp.data(), static_cast<std::size_t>(logp.size())));
    return (logp.array() - lse).exp();
}

EnumeratedEvent enumerate_event(const EventSpec& spec, int n_cap, const SolverOptions& opts, int threads) {
    const int n = static_cast<int>(spec.n());
    if (n > n_cap) throw CapExceeded("enumerate_event: N exceeds the enumeration cap");
    const std::uint64_t total = 1ULL << n;

    struct Hit {
        std::uint64_t code;
        double margin;
    };
    threads = std::max(1, threads);
    std::vector<std::vector<Hit>> hits(static_cast<std::size_t>(threads));

    auto worker = [&](int tid) {
        GllSolver solver(spec.X, spec.lambda, opts);
        std::vector<char> in_m(static_cast<std::size_t>(spec.X.cols()), 0);
        for (int k : spec.M) in_m[static_cast<std::size_t>(k)] = 1;
        Vector warm;
        for (std::uint64_t code = static_cast<std::uint64_t>(tid); code < total;
             code += static_cast<std::uint64_t>(threads)) {
            Vector y = state_from_code(code, n);
            LassoCertificate cert = solver.solve(y, warm.size() ? &warm : nullptr);
            if (!cert.converged) cert = solver.solve(y);  // retry cold
            if (!cert.converged) throw Error("enumerate_event: lasso solve did not converge");
            warm = cert.theta_hat;
            if (cert.support != spec.M) continue;
            double off_max = 0.0;
            for (Eigen::Index k = 0; k < cert.sign_vector.size(); ++k)
                if (!in_m[static_cast<std::size_t>(k)])
                    off_max = std::max(off_max, std::abs(cert.sign_vector(k)));
            hits[static_cast<std::size_t>(tid)].push_back({code, 1.0 - off_max});
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    EnumeratedEvent out;
    out.n = n;
    out.delta_c = 1.0;
    std::vector<Hit> all;
    for (auto& part : hits) all.insert(all.end(), part.begin(), part.end());
    std::sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) { return a.code < b.code; });
    for (const Hit& h : all) {
        out.codes.push_back(h.code);
        out.delta_c = std::min(out.delta_c, h.margin);
    }
    return out;
}

Thm1Report check_thm1(const Vector& y, const EventSpec& spec, const Vector& s_m, const PsiOptions& opts) {
    const Matrix xm = spec.x_m();
    if (s_m.size() != xm.cols()) throw DimensionMismatch("check_thm1: S_M size mismatch");
    Thm1Report rep;
    Vector rho = xm.transpose() * y - spec.lambda * s_m;
    rep.psi_result = psi(rho, xm, opts);
    if (rep.psi_result.diverged || rep.psi_result.residual >= 1e-6) return rep;
    rep.in_image = true;
    const Vector& theta = rep.psi_result.theta;
    rep.sign_ok = (s_m.array() * theta.array()).minCoeff() >= -1e-8;
    Vector resid = y - sigmoid(xm * theta);
    const Matrix x_off = spec.x_off();
    double off = x_off.cols() > 0 ? (x_off.transpose() * resid).lpNorm<Eigen::Infinity>() : 0.0;
    rep.dual_margin = spec.lambda - off;
    rep.strict_dual = off < spec.lambda;
    return rep;
}

bool thm1_membership(const Vector& y, const EventSpec& spec, const PsiOptions& opts) {
    const std::size_t s = spec.M.size();
    if (s == 0) {
        // Empty support: membership reduces to strict dual feasibility at theta = 0.
        Vector resid = y.array() - 0.5;
        return (spec.X.transpose() * Vector(resid)).lpNorm<Eigen::Infinity>() < spec.lambda;
    }
    if (s > 25) throw CapExceeded("thm1_membership: 2^s sweep too large");
    for (std::uint64_t mask = 0; mask < (1ULL << s); ++mask) {
        Vector s_m(static_cast<Eigen::Index>(s));
        for (std::size_t j = 0; j < s; ++j)
            s_m(static_cast<Eigen::Index>(j)) = (mask >> j) & 1ULL ? 1.0 : -1.0;
        if (check_thm1(y, spec, s_m, opts).all()) return true;
    }
    return false;
}

}  // namespace sigle
