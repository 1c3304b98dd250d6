#pragma once

#include <functional>

#include "sigle/event.hpp"
#include "sigle/moments.hpp"
#include "sigle/numerics.hpp"

namespace sigle {

enum class ChainMethod { rejection, annealing };

/// Hypercube states with per-state provenance; states are bit-packed.
struct SampleChain {
    int n = 0;
    ChainMethod method = ChainMethod::rejection;
    double accepted_fraction = 0.0;

    std::vector<std::uint64_t> words;      // words_per_state() per state
    std::vector<double> energies;          // annealing trace only
    std::vector<double> log_weights;       // log P_{pi*}(Y^(t)) when pi* known at sampling time
    std::vector<std::uint8_t> accepted;    // annealing trace only

    int words_per_state() const { return (n + 63) / 64; }
    std::size_t size() const;
    Vector state(std::size_t t) const;
    void append(const Vector& y);
};

struct CoolingSchedule {
    double K0 = 1.0;
    double temperature(long t) const;  // K0 / log(t + 1)
    /// Schedule meeting the uniform-limit guarantee T_t >= 2^{N+1}/log(t+1).
    static CoolingSchedule guaranteed(int n);
};

struct RejectionOptions {
    double acceptance_floor = 1e-4;
    long probe_budget = 200000;
};

/// i.i.d. draws from Bernoulli(pi*) conditioned on E_M.
SampleChain rejection_sample(const Vector& pi_star, EventOracle& oracle, long T, Rng& rng,
                             const RejectionOptions& opts = {});

struct SeiSlrOptions {
    bool repulsion = true;
    bool record_trace = true;  // energies + accepted flags
};

/// Simulated annealing on {0,1}^N whose zero-energy set is E_M.
SampleChain sei_slr(EventOracle& oracle, const Vector& y0, const CoolingSchedule& schedule,
                    long T, Rng& rng, const SeiSlrOptions& opts = {},
                    const Vector* pi_star = nullptr);

/// Paper-shaped entry point: solves at prob.Y to fix M, then runs the chain.
SampleChain sei_slr(const DesignProblem& prob, const CoolingSchedule& schedule, long T,
                    double delta, bool repulsion, std::uint64_t seed);

struct CondExpectation {
    Vector value;
    double ess = 0.0;  // sum(w)/max(w) for annealing chains, T for rejection chains
};

/// Monte-Carlo estimate of the conditional expectation of h: weighted for
/// annealing chains (log-sum-exp stabilized), plain average for rejection.
CondExpectation conditional_expectation(const SampleChain& chain, const Vector& pi_star,
                                        const std::function<Vector(const Vector&)>& h,
                                        bool tolerate_degenerate = false);

/// pi_tilde, G_tilde (and optionally Gamma_tilde) from a chain.
ConditionalMoments estimate_moments(const SampleChain& chain, const Vector& pi_star,
                                    const Matrix& x_m, bool with_gamma = false);

/// Exact moments from an enumerated event (oracle for tests and small fixtures).
ConditionalMoments exact_moments(const EnumeratedEvent& event, const Vector& pi_star,
                                 const Matrix& x_m, bool with_gamma = false);

/// An enumerated event repackaged as a one-visit-per-member weighted chain;
/// estimators on it reproduce exact conditional expectations.
SampleChain exact_chain(const EnumeratedEvent& event);

}  // namespace sigle
