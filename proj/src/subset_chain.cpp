#include "scrambling/subset_chain.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "scrambling/pauli.hpp"
#include "scrambling/weight_chain.hpp"

namespace scrambling {
namespace {

// Pair index k = 4a + b in [1, 16): bit 0 = first letter not I, bit 1 = second not I.
constexpr std::array<uint8_t, 16> kKeep = [] {
    std::array<uint8_t, 16> t{};
    for (unsigned k = 1; k < 16; ++k) {
        t[k] = static_cast<uint8_t>((k >= 4 ? 1 : 0) | (k % 4 != 0 ? 2 : 0));
    }
    return t;
}();

void step_in_place(SupportState& s, std::span<const Edge> matching, RandomSource& rng) {
    PairTransitionSampler sampler(rng);
    for (const auto& [i, j] : matching) {
        const bool in_i = s.contains(i), in_j = s.contains(j);
        if (!in_i && !in_j) {
            continue;
        }
        const uint8_t keep = kKeep[sampler.next_index()];
        s.assign(i, keep & 1);
        s.assign(j, keep & 2);
    }
}

std::vector<uint64_t> growth(uint32_t n, uint64_t depth, RandomSource& rng, SupportState s,
                             SupportState* final_state) {
    std::vector<uint32_t> pool;
    std::vector<Edge> matching;
    matching.reserve(n / 2);
    std::vector<uint64_t> sizes;
    sizes.reserve(depth + 1);
    sizes.push_back(s.size());
    for (uint64_t t = 0; t < depth; ++t) {
        sample_matching(n, rng, pool, matching);
        step_in_place(s, matching, rng);
        sizes.push_back(s.size());
    }
    const uint64_t initial = sizes.front();
    if (initial > 0 && !within_lightcone(sizes, initial, n)) {
        throw std::logic_error("support growth exceeded the light-cone envelope");
    }
    for (uint64_t v : sizes) {
        if (initial > 0 && v == 0) {
            throw std::logic_error("support chain reached the empty set");
        }
    }
    if (final_state) {
        *final_state = std::move(s);
    }
    return sizes;
}

}  // namespace

SupportState SupportState::singleton(uint32_t n, uint32_t member) {
    if (member >= n) {
        throw std::out_of_range("singleton member outside [0, n)");
    }
    SupportState s(n);
    s.insert(member);
    return s;
}

uint64_t SupportState::size() const {
    uint64_t total = 0;
    for (uint64_t w : words_) {
        total += std::popcount(w);
    }
    return total;
}

std::vector<uint32_t> SupportState::members() const {
    std::vector<uint32_t> out;
    for (size_t k = 0; k < words_.size(); ++k) {
        uint64_t w = words_[k];
        while (w) {
            out.push_back(static_cast<uint32_t>(64 * k + std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

void validate_matching(uint32_t n, std::span<const Edge> matching) {
    if (matching.size() != n / 2) {
        throw std::invalid_argument("matching has " + std::to_string(matching.size()) + " pairs; a maximum matching of " +
                                    std::to_string(n) + " qubits has " + std::to_string(n / 2));
    }
    std::vector<char> seen(n, 0);
    for (const auto& [i, j] : matching) {
        if (i >= n || j >= n || i == j || seen[i] || seen[j]) {
            throw std::invalid_argument("matching pair (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") overlaps or is out of range");
        }
        seen[i] = seen[j] = 1;
    }
}

SupportState step(const SupportState& s, std::span<const Edge> matching, RandomSource& rng) {
    validate_matching(s.num_qubits(), matching);
    SupportState out = s;
    step_in_place(out, matching, rng);
    return out;
}

std::vector<uint64_t> simulate_growth(uint32_t n, uint64_t depth, RandomSource& rng) {
    return simulate_growth(n, depth, rng, SupportState::singleton(n, 0));
}

std::vector<uint64_t> simulate_growth(uint32_t n, uint64_t depth, RandomSource& rng, const SupportState& start) {
    if (n < 2) {
        throw std::invalid_argument("subset chain needs n >= 2");
    }
    if (start.num_qubits() != n) {
        throw std::invalid_argument("start state size does not match n");
    }
    return growth(n, depth, rng, start, nullptr);
}

ProportionEstimate wilson_interval(uint64_t successes, uint64_t trials, double z) {
    ProportionEstimate e;
    e.successes = successes;
    e.trials = trials;
    if (trials == 0) {
        e.upper = 1.0;
        return e;
    }
    const double nn = static_cast<double>(trials);
    const double p = successes / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
    e.estimate = p;
    e.lower = std::max(0.0, centre - half);
    e.upper = std::min(1.0, centre + half);
    return e;
}

ProportionEstimate survival_probability(uint32_t n, double f, uint64_t depth, uint64_t trials, RandomSource& rng) {
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    const uint64_t threshold = weight_threshold(n, f);
    uint64_t hits = 0;
    for (uint64_t k = 0; k < trials; ++k) {
        RandomSource trial_rng = rng.split(k);
        const auto sizes = simulate_growth(n, depth, trial_rng);
        hits += sizes.back() <= threshold;
    }
    return wilson_interval(hits, trials);
}

CouponEstimate coupon_check(uint32_t n, uint64_t depth, uint64_t trials, uint32_t c, double f, RandomSource& rng) {
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    if (c > n) {
        throw std::invalid_argument("c must not exceed n");
    }
    uint64_t contained = 0;
    double conditional_sum = 0;
    std::vector<uint32_t> perm(n);
    for (uint64_t k = 0; k < trials; ++k) {
        RandomSource trial_rng = rng.split(k);
        SupportState s;
        growth(n, depth, trial_rng, SupportState::singleton(n, 0), &s);
        // T = [n] minus c uniformly chosen qubits (partial Fisher-Yates).
        std::iota(perm.begin(), perm.end(), 0);
        bool inside = true;
        for (uint32_t r = 0; r < c; ++r) {
            const auto pick = r + static_cast<uint32_t>(trial_rng.uniform_below(n - r));
            std::swap(perm[r], perm[pick]);
            inside = inside && !s.contains(perm[r]);
        }
        contained += inside;
        const double size = static_cast<double>(s.size());
        double cond = 1.0;
        for (uint32_t r = 0; r < c; ++r) {
            cond *= std::max(0.0, (n - size - r) / (n - r));
        }
        conditional_sum += cond;
    }
    CouponEstimate out;
    out.containment = wilson_interval(contained, trials);
    out.mean_conditional = conditional_sum / trials;
    out.reference = std::pow(1.0 - f, c);
    return out;
}

}  // namespace scrambling
