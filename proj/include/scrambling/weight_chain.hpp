#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "scrambling/random.hpp"

namespace scrambling {

using Rational = boost::multiprecision::cpp_rational;

/// One row of the lumped weight chain. Probabilities of moving from weight
/// x to x-1, staying, and moving to x+1 after one uniformly random
/// two-qubit gate on a uniformly random pair of the complete graph.
struct TransitionRow {
    double back = 0;
    double stay = 0;
    double forward = 0;
};

struct ExactTransitionRow {
    Rational back;
    Rational stay;
    Rational forward;
};

/// back = 2x(x-1)/(5n(n-1)), forward = 6x(n-x)/(5n(n-1)), stay = 1 - back - forward.
TransitionRow transition_row(unsigned n, unsigned x);
ExactTransitionRow transition_row_exact(unsigned n, unsigned x);

/// The birth-death chain on weights {1..n}. Holds precomputed rows.
class WeightChain {
   public:
    explicit WeightChain(unsigned n);
    /// Chain with caller-supplied rows, used to run the checks against
    /// perturbed transition formulas.
    WeightChain(unsigned n, const std::function<TransitionRow(unsigned n, unsigned x)>& row_fn);

    unsigned n() const { return n_; }
    const TransitionRow& row(unsigned x) const { return rows_.at(x - 1); }

    /// One step dist -> dist * P, in place. `scratch` must have size n.
    void step(std::span<double> mass, std::span<double> scratch) const;

   private:
    unsigned n_;
    std::vector<TransitionRow> rows_;
};

/// Nonnegative mass on weights 1..n; mass[k - 1] is the mass at weight k.
struct WeightDistribution {
    unsigned n = 0;
    std::vector<double> mass;

    static WeightDistribution point_mass(unsigned n, unsigned weight);
    double at(unsigned weight) const { return mass.at(weight - 1); }
    double total() const;
};

/// pi(k) = 3^k C(n,k) / (4^n - 1).
WeightDistribution stationary(unsigned n);
std::vector<Rational> stationary_exact(unsigned n);

WeightDistribution evolve_exact(const WeightDistribution& dist, uint64_t t);
WeightDistribution evolve_exact(const WeightChain& chain, const WeightDistribution& dist, uint64_t t);
/// Rational evolution for small n; an independent oracle for the float path.
std::vector<Rational> evolve_rational(unsigned n, std::vector<Rational> mass, uint64_t t);

/// floor(f n) with a small tolerance for products like 0.29 * 100.
unsigned weight_threshold(unsigned n, double f);

/// Pr[X_t(start) <= floor(f n)] by exact evolution of a point mass.
double tail_probability(unsigned n, unsigned start_weight, uint64_t t, double f);

/// Tail probabilities at every time in `times` (any order) from a single evolution pass.
std::vector<double> tail_curve(unsigned n, unsigned start_weight, std::span<const uint64_t> times, double f);

/// Binary entropy in bits; h(0) = h(1) = 0.
double binary_entropy(double f);

/// First term of the tail bound, 2^{(f log2 3 + h(f)) n} / (C(n, r) 3^r) with
/// r = floor(n/2), evaluated in log space.
double theorem_bound_first_term(unsigned n, double f);
double log2_theorem_bound_first_term(unsigned n, double f);

/// Both terms of the tail bound for a start weight. The second term carries
/// an unnamed polynomial factor, exposed here as n^poly_exponent.
struct TheoremBound {
    unsigned n = 0;
    unsigned start_weight = 1;
    double f = 0.1;
    unsigned poly_exponent = 1;

    /// f log2 3 + h(f) - log2(3)/2 < 0.
    bool valid_regime() const;
    double first_term() const { return theorem_bound_first_term(n, f); }
    /// 1 / (2^start C(n, start) n^poly_exponent).
    double second_term() const;
    double total() const { return first_term() + second_term(); }
};

/// Sample path of the chain: path[0] = start, length t + 1.
std::vector<unsigned> simulate_trajectory(unsigned n, unsigned start_weight, uint64_t t, RandomSource& rng);
std::vector<unsigned> simulate_trajectory(const WeightChain& chain, unsigned start_weight, uint64_t t,
                                          RandomSource& rng);

struct ChainGap {
    double gap = 0;
    /// Second-largest eigenvalue modulus.
    double slem = 0;
    std::vector<double> eigenvalues;  // ascending
};

/// 1 - SLEM of the n x n chain, via the symmetrized tridiagonal D^{1/2} P D^{-1/2}.
ChainGap chain_spectral_gap(unsigned n);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

}  // namespace scrambling
