#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "sigle/lasso.hpp"
#include "sigle/psi.hpp"

namespace sigle {

/// Display encoding of a hypercube state: bit i = Y_i, i = 0 most significant.
std::uint64_t state_code(const Vector& y);
Vector state_from_code(std::uint64_t code, int n);
std::string state_bitstring(const Vector& y);
Vector state_from_bitstring(const std::string& bits);

/// (X, lambda, M, delta) defining E_M and its annealing energy.
struct EventSpec {
    Matrix X;
    double lambda = 0.0;
    std::vector<int> M;  // sorted
    double delta = 0.01;

    Eigen::Index n() const { return X.rows(); }
    Matrix x_m() const;
    Matrix x_off() const;  // columns outside M
    void validate(double rank_tolerance = 1e-10) const;
};

struct EventMembershipReport {
    bool in_event = false;
    double energy = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    Vector sign_subvector;     // S_M(Y)
    double dual_margin = 0.0;  // 1 - ||S_{-M}(Y)||_inf
};

/// b_delta(x) = 1 - sqrt((x/delta) /\ 1); clamped to 1 for x < 0.
double b_delta(double x, double delta);

/// Memoizing membership/energy oracle: one lasso solve per distinct state.
class EventOracle {
public:
    explicit EventOracle(EventSpec spec, SolverOptions opts = {});

    const EventMembershipReport& evaluate(const Vector& y);
    const EventSpec& spec() const { return spec_; }
    const GllSolver& solver() const { return solver_; }
    std::size_t cache_size() const { return cache_.size(); }

private:
    EventMembershipReport compute(const Vector& y) const;

    EventSpec spec_;
    GllSolver solver_;
    bool memoize_;
    std::unordered_map<std::uint64_t, EventMembershipReport> cache_;
    EventMembershipReport scratch_;
    static constexpr std::size_t kCacheCap = std::size_t(1) << 22;
};

EventMembershipReport energy(const Vector& y, const EventSpec& spec, const SolverOptions& opts = {});

struct EnumeratedEvent {
    int n = 0;
    std::vector<std::uint64_t> codes;  // ascending display codes of E_M members
    double delta_c = 0.0;              // min over E_M of (1 - ||S_{-M}||_inf)
    Vector member(std::size_t k) const { return state_from_code(codes[k], n); }
    std::size_t size() const { return codes.size(); }
    /// Exact conditional probabilities of the members under Bernoulli(pi).
    Vector conditional_probabilities(const Vector& pi) const;
};

/// Exact E_M by sweeping all 2^N responses. Throws CapExceeded for N > n_cap.
EnumeratedEvent enumerate_event(const EventSpec& spec, int n_cap = 20,
                                const SolverOptions& opts = {}, int threads = 1);

struct Thm1Report {
    bool in_image = false;     // (a) rho in Im(Xi)
    bool sign_ok = false;      // (b) Diag(S_M) Psi(rho) >= 0
    bool strict_dual = false;  // (c) ||X_{-M}^T (Y - sigma(X_M Psi(rho)))||_inf < lambda
    double dual_margin = 0.0;
    PsiResult psi_result;
    bool all() const { return in_image && sign_ok && strict_dual; }
};

Thm1Report check_thm1(const Vector& y, const EventSpec& spec, const Vector& s_m,
                      const PsiOptions& opts = {});

/// Membership via the Theorem-1 characterization, sweeping S_M in {-1,+1}^s.
bool thm1_membership(const Vector& y, const EventSpec& spec, const PsiOptions& opts = {});

}  // namespace sigle
