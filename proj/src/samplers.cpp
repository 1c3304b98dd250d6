#include "sigle/samplers.hpp"

#include <cmath>

#include "sigle/errors.hpp"
#include "sigle/glm.hpp"

namespace sigle {

std::size_t SampleChain::size() const {
    int wps = words_per_state();
    return wps == 0 ? 0 : words.size() / static_cast<std::size_t>(wps);
}

Vector SampleChain::state(std::size_t t) const {
    const int wps = words_per_state();
    const std::uint64_t* w = words.data() + t * static_cast<std::size_t>(wps);
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = (w[i / 64] >> (i % 64)) & 1ULL ? 1.0 : 0.0;
    return y;
}

void SampleChain::append(const Vector& y) {
    const int wps = words_per_state();
    std::size_t base = words.size();
    words.resize(base + static_cast<std::size_t>(wps), 0);
    for (int i = 0; i < n; ++i)
        if (y(i) != 0.0) words[base + static_cast<std::size_t>(i / 64)] |= 1ULL << (i % 64);
}

double CoolingSchedule::temperature(long t) const { return K0 / std::log(static_cast<double>(t) + 1.0); }

CoolingSchedule CoolingSchedule::guaranteed(int n) {
    return CoolingSchedule{std::ldexp(1.0, n + 1)};
}

SampleChain rejection_sample(const Vector& pi_star, EventOracle& oracle, long T, Rng& rng,
                             const RejectionOptions& opts) {
    const int n = static_cast<int>(oracle.spec().n());
    if (pi_star.size() != n) throw DimensionMismatch("rejection_sample: pi_star length");
    SampleChain chain;
    chain.n = n;
    chain.method = ChainMethod::rejection;
    long accepted = 0;
    long proposed = 0;
    Vector y(n);
    while (accepted < T) {
        for (int i = 0; i < n; ++i) y(i) = rng.uniform() < pi_star(i) ? 1.0 : 0.0;
        ++proposed;
        if (oracle.evaluate(y).in_event) {
            ++accepted;
            chain.append(y);
            chain.log_weights.push_back(0.0);
        }
        if (proposed % opts.probe_budget == 0 &&
            static_cast<double>(accepted) / static_cast<double>(proposed) < opts.acceptance_floor)
            throw AcceptanceTooLow("rejection_sample: acceptance below floor over probe budget");
    }
    chain.accepted_fraction = static_cast<double>(accepted) / static_cast<double>(proposed);
    return chain;
}

SampleChain sei_slr(EventOracle& oracle, const Vector& y0, const CoolingSchedule& schedule,
                    long T, Rng& rng, const SeiSlrOptions& opts, const Vector* pi_star) {
    const int n = static_cast<int>(oracle.spec().n());
    if (y0.size() != n) throw DimensionMismatch("sei_slr: initial state length");
    SampleChain chain;
    chain.n = n;
    chain.method = ChainMethod::annealing;
    chain.words.reserve(static_cast<std::size_t>(T) * static_cast<std::size_t>(chain.words_per_state()));
    if (opts.record_trace) {
        chain.energies.reserve(static_cast<std::size_t>(T));
        chain.accepted.reserve(static_cast<std::size_t>(T));
    }
    if (pi_star) chain.log_weights.reserve(static_cast<std::size_t>(T));

    Vector cur = y0;
    double e_cur = oracle.evaluate(cur).energy;
    double logw_cur = pi_star ? log_bernoulli_mass(cur, *pi_star) : 0.0;
    long accepted_count = 0;

    for (long t = 1; t <= T; ++t) {
        int flip = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        Vector cand = cur;
        cand(flip) = 1.0 - cand(flip);
        double e_cand = oracle.evaluate(cand).energy;
        double delta_e = e_cand - e_cur;
        double u = rng.uniform();
        double temp = schedule.temperature(t);
        double metro = std::exp(-delta_e / temp);
        bool accept;
        if (opts.repulsion) {
            accept = std::min(1.0 - metro, 1.0 - e_cur) <= u;
        } else {
            accept = metro >= u;
        }
        if (accept) {
            cur.swap(cand);
            e_cur = e_cand;
            if (pi_star) logw_cur = log_bernoulli_mass(cur, *pi_star);
            ++accepted_count;
        }
        chain.append(cur);
        if (opts.record_trace) {
            chain.energies.push_back(e_cur);
            chain.accepted.push_back(accept ? 1 : 0);
        }
        if (pi_star) chain.log_weights.push_back(logw_cur);
    }
    chain.accepted_fraction = static_cast<double>(accepted_count) / static_cast<double>(T);
    return chain;
}

SampleChain sei_slr(const DesignProblem& prob, const CoolingSchedule& schedule, long T,
                    double delta, bool repulsion, std::uint64_t seed) {
    prob.validate();
    LassoCertificate cert = solve_gll(prob);
    if (!cert.converged) throw Error("sei_slr: initial lasso solve did not converge");
    EventSpec spec{prob.X, prob.lambda, cert.support, delta};
    EventOracle oracle(std::move(spec));
    Rng rng(seed);
    SeiSlrOptions opts;
    opts.repulsion = repulsion;
    return sei_slr(oracle, prob.Y, schedule, T, rng, opts);
}

namespace {

std::vector<double> chain_log_weights(const SampleChain& chain, const Vector& pi_star) {
    const std::size_t t_total = chain.size();
    std::vector<double> lw(t_total);
    Vector log_p(chain.n), log_q(chain.n);
    for (int i = 0; i < chain.n; ++i) {
        log_p(i) = std::log(pi_star(i));
        log_q(i) = std::log1p(-pi_star(i));
    }
    const double base = log_q.sum();
    const int wps = chain.words_per_state();
    for (std::size_t t = 0; t < t_total; ++t) {
        const std::uint64_t* w = chain.words.data() + t * static_cast<std::size_t>(wps);
        double acc = base;
        for (int i = 0; i < chain.n; ++i)
            if ((w[i / 64] >> (i % 64)) & 1ULL) acc += log_p(i) - log_q(i);
        lw[t] = acc;
    }
    return lw;
}

}  // namespace

CondExpectation conditional_expectation(const SampleChain& chain, const Vector& pi_star,
                                        const std::function<Vector(const Vector&)>& h,
                                        bool tolerate_degenerate) {
    const std::size_t t_total = chain.size();
    if (t_total == 0) throw Error("conditional_expectation: empty chain");
    CondExpectation out;
    if (chain.method == ChainMethod::rejection) {
        Vector acc;
        for (std::size_t t = 0; t < t_total; ++t) {
            Vector v = h(chain.state(t));
            if (acc.size() == 0) acc = Vector::Zero(v.size());
            acc += v;
        }
        out.value = acc / static_cast<double>(t_total);
        out.ess = static_cast<double>(t_total);
        return out;
    }
    if (pi_star.size() != chain.n) throw DimensionMismatch("conditional_expectation: pi_star length");
    std::vector<double> lw = chain_log_weights(chain, pi_star);
    double lse = log_sum_exp(lw);
    double max_lw = *std::max_element(lw.begin(), lw.end());
    out.ess = std::exp(lse - max_lw);
    if (out.ess < 10.0 && !tolerate_degenerate)
        throw DegenerateWeights("conditional_expectation: effective sample size < 10");
    Vector acc;
    for (std::size_t t = 0; t < t_total; ++t) {
        double w = std::exp(lw[t] - lse);
        if (w == 0.0) continue;
        Vector v = h(chain.state(t));
        if (acc.size() == 0) acc = Vector::Zero(v.size());
        acc += w * v;
    }
    out.value = acc;
    return out;
}

ConditionalMoments estimate_moments(const SampleChain& chain, const Vector& pi_star,
                                    const Matrix& x_m, bool with_gamma) {
    const std::size_t t_total = chain.size();
    if (t_total == 0) throw Error("estimate_moments: empty chain");
    const int n = chain.n;
    const int wps = chain.words_per_state();

    std::vector<double> weights(t_total, 1.0 / static_cast<double>(t_total));
    if (chain.method == ChainMethod::annealing) {
        std::vector<double> lw = chain_log_weights(chain, pi_star);
        double lse = log_sum_exp(lw);
        double max_lw = *std::max_element(lw.begin(), lw.end());
        if (std::exp(lse - max_lw) < 10.0)
            throw DegenerateWeights("estimate_moments: effective sample size < 10");
        for (std::size_t t = 0; t < t_total; ++t) weights[t] = std::exp(lw[t] - lse);
    }

    ConditionalMoments m;
    m.pi_bar = Vector::Zero(n);
    Matrix second;
    if (with_gamma) second = Matrix::Zero(n, n);
    std::vector<int> setbits;
    setbits.reserve(static_cast<std::size_t>(n));
    for (std::size_t t = 0; t < t_total; ++t) {
        double w = weights[t];
        if (w == 0.0) continue;
        const std::uint64_t* wd = chain.words.data() + t * static_cast<std::size_t>(wps);
        setbits.clear();
        for (int i = 0; i < n; ++i)
            if ((wd[i / 64] >> (i % 64)) & 1ULL) setbits.push_back(i);
        for (int i : setbits) m.pi_bar(i) += w;
        if (with_gamma)
            for (int i : setbits)
                for (int j : setbits) second(i, j) += w;
    }

    double floor_check = 1.0;
    for (int i = 0; i < n; ++i) floor_check = std::min(floor_check, m.pi_bar(i) * (1.0 - m.pi_bar(i)));
    if (floor_check < 1e-10) throw SingularMoments("estimate_moments: pi_tilde touches {0,1}");

    Vector var = m.pi_bar.array() * (1.0 - m.pi_bar.array());
    m.G_bar = x_m.transpose() * var.asDiagonal() * x_m;
    if (with_gamma) m.gamma_bar = second - m.pi_bar * m.pi_bar.transpose();
    return m;
}

SampleChain exact_chain(const EnumeratedEvent& event) {
    SampleChain chain;
    chain.n = event.n;
    chain.method = ChainMethod::annealing;
    for (std::size_t k = 0; k < event.size(); ++k) chain.append(event.member(k));
    chain.log_weights.assign(event.size(), 0.0);
    chain.accepted_fraction = 1.0;
    return chain;
}

ConditionalMoments exact_moments(const EnumeratedEvent& event, const Vector& pi_star,
                                 const Matrix& x_m, bool with_gamma) {
    SampleChain chain = exact_chain(event);
    return estimate_moments(chain, pi_star, x_m, with_gamma);
}

}  // namespace sigle
