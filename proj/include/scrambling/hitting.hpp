#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scrambling/random.hpp"

namespace scrambling {

/// Walk on {-1, ..., a} started at 0. At positions <= 0 the walk moves right
/// with probability p_minus; at position i in 1..a-1 with probability
/// p_plus[i - 1]. Both ends absorb.
struct WalkSpec {
    unsigned a = 1;
    double p_minus = 0.5;
    std::vector<double> p_plus;

    static WalkSpec uniform(unsigned a, double p_minus, double p_plus);
    /// Throws std::invalid_argument naming the violated condition.
    void validate() const;
};

/// Probability of absorbing at -1 before a. Evaluated as S_1 / (S_1 + alpha_-)
/// with S_i = 1 + S_{i+1} / alpha_+(i), S_a = 1, carried in log space.
double hitting_probability(const WalkSpec& spec);

/// Closed form for constant ratios; alpha_plus == 1 takes the limit 1/(1 + alpha_minus / a).
double hitting_probability_uniform(double alpha_minus, double alpha_plus, unsigned a);

struct MonteCarloEstimate {
    uint64_t successes = 0;
    uint64_t trials = 0;
    double estimate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
    /// Binomial standard error sqrt(p(1-p)/N) evaluated at `p`.
    double sigma(double p) const;
};

MonteCarloEstimate simulate_hitting(const WalkSpec& spec, uint64_t walks, RandomSource& rng);

/// Descent of the weight chain from `start` down to `target` before reaching
/// floor(n/2) (visits at time 0 do not count, so start = floor(n/2) is allowed).
struct DescentProbability {
    double log_bound = 0;  // natural log of (2n)^m / (2^l C(n, l))
    double bound = 0;
    std::optional<double> exact;  // first-step analysis, n <= 2048
};

DescentProbability chain_descent_probability(unsigned n, unsigned start, unsigned target);

/// Solves the tridiagonal system lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]
/// (lower[0] and upper[last] ignored) by the Thomas algorithm.
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                                      std::vector<double> rhs);

}  // namespace scrambling
