#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scrambling/circuit.hpp"
#include "scrambling/random.hpp"

namespace scrambling {

/// Support of a Pauli operator as a bitset over [n].
class SupportState {
   public:
    SupportState() = default;
    explicit SupportState(uint32_t n) : n_(n), words_((n + 63) / 64, 0) {}
    static SupportState singleton(uint32_t n, uint32_t member);

    uint32_t num_qubits() const { return n_; }
    bool contains(uint32_t q) const { return (words_[q >> 6] >> (q & 63)) & 1; }
    void insert(uint32_t q) { words_[q >> 6] |= uint64_t{1} << (q & 63); }
    void erase(uint32_t q) { words_[q >> 6] &= ~(uint64_t{1} << (q & 63)); }
    void assign(uint32_t q, bool v) {
        uint64_t& w = words_[q >> 6];
        w = (w & ~(uint64_t{1} << (q & 63))) | (uint64_t{v} << (q & 63));
    }
    uint64_t size() const;
    bool empty() const { return size() == 0; }
    std::vector<uint32_t> members() const;

    bool operator==(const SupportState&) const = default;

   private:
    uint32_t n_ = 0;
    std::vector<uint64_t> words_;
};

/// Throws unless `matching` is a maximum matching of [n].
void validate_matching(uint32_t n, std::span<const Edge> matching);

/// One level of the subset chain. Each pair touching S draws one of the 15
/// non-identity Pauli pairs uniformly and keeps the members whose letter is
/// not I: both with probability 9/15, either one alone with 3/15.
SupportState step(const SupportState& s, std::span<const Edge> matching, RandomSource& rng);

/// |S_t| for t = 0..depth under independent uniform matchings.
std::vector<uint64_t> simulate_growth(uint32_t n, uint64_t depth, RandomSource& rng);
std::vector<uint64_t> simulate_growth(uint32_t n, uint64_t depth, RandomSource& rng, const SupportState& start);

/// Binomial proportion with a Wilson 95% interval.
struct ProportionEstimate {
    uint64_t successes = 0;
    uint64_t trials = 0;
    double estimate = 0;
    double lower = 0;
    double upper = 0;
};

ProportionEstimate wilson_interval(uint64_t successes, uint64_t trials, double z = 1.959963984540054);

/// Pr[|S_depth| <= floor(f n)] from the singleton {0}, trials seeded by split(trial).
ProportionEstimate survival_probability(uint32_t n, double f, uint64_t depth, uint64_t trials, RandomSource& rng);

struct CouponEstimate {
    ProportionEstimate containment;  // Pr[S_depth subset of T], T uniform of size n - c
    double mean_conditional = 0;     // E[C(n - |S|, c) / C(n, c)]
    double reference = 0;            // (1 - f)^c
};

CouponEstimate coupon_check(uint32_t n, uint64_t depth, uint64_t trials, uint32_t c, double f, RandomSource& rng);

}  // namespace scrambling
