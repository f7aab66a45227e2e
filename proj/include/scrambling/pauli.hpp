#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scrambling/random.hpp"

namespace scrambling {

using BigInt = boost::multiprecision::cpp_int;

/// Single-qubit Pauli letter. The numeric value follows the sigma_0..sigma_3
/// labelling (I, X, Y, Z); storage inside PauliString uses (x, z) bit pairs
/// with I=00, X=10, Z=01, Y=11.
enum class Letter : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

constexpr bool letter_x(Letter p) { return p == Letter::X || p == Letter::Y; }
constexpr bool letter_z(Letter p) { return p == Letter::Z || p == Letter::Y; }
constexpr Letter letter_from_bits(bool x, bool z) {
    return x ? (z ? Letter::Y : Letter::X) : (z ? Letter::Z : Letter::I);
}
char letter_char(Letter p);
Letter letter_from_char(char c);

/// n-qubit Pauli operator without phase, bit-pair packed into 64-bit words.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(size_t n);

    static PauliString from_string(std::string_view letters);

    size_t num_qubits() const { return n_; }
    Letter get(size_t q) const;
    void set(size_t q, Letter p);
    bool x(size_t q) const { return (xs_[q >> 6] >> (q & 63)) & 1; }
    bool z(size_t q) const { return (zs_[q >> 6] >> (q & 63)) & 1; }

    size_t weight() const;
    std::vector<size_t> support() const;
    bool is_identity() const { return weight() == 0; }
    bool commutes(const PauliString& other) const;

    std::span<const uint64_t> x_words() const { return xs_; }
    std::span<const uint64_t> z_words() const { return zs_; }

    std::string str() const;

    bool operator==(const PauliString&) const = default;

   private:
    size_t n_ = 0;
    std::vector<uint64_t> xs_;
    std::vector<uint64_t> zs_;
};

/// Two-qubit letter pair (a on the first qubit, b on the second).
struct PauliPair {
    Letter a = Letter::I;
    Letter b = Letter::I;

    /// Dense index 4*a + b in [0, 16); 0 is the identity pair.
    constexpr uint8_t index() const { return static_cast<uint8_t>(4 * static_cast<int>(a) + static_cast<int>(b)); }
    static constexpr PauliPair from_index(uint8_t k) {
        return {static_cast<Letter>(k >> 2), static_cast<Letter>(k & 3)};
    }
    constexpr bool is_identity() const { return a == Letter::I && b == Letter::I; }
    bool operator==(const PauliPair&) const = default;
};

/// Transition induced on a two-qubit Pauli pair by a uniformly random
/// two-qubit Clifford (or Haar) gate: the identity pair is fixed, any other
/// pair moves to one of the 15 non-identity pairs uniformly.
PauliPair gate_transition(PauliPair pair, RandomSource& rng);

/// Batched form of gate_transition for a non-identity input: each engine
/// draw is a uniform integer below 15^16, read as 16 base-15 digits, each
/// selecting one of the 15 non-identity output pairs.
class PairTransitionSampler {
   public:
    explicit PairTransitionSampler(RandomSource& rng) : rng_(rng) {}
    /// Output pair index in [1, 16).
    uint8_t next_index() {
        if (left_ == 0) {
            digits_ = rng_.uniform_below(kBlock);
            left_ = 16;
        }
        const auto d = static_cast<uint8_t>(digits_ % 15);
        digits_ /= 15;
        --left_;
        return static_cast<uint8_t>(d + 1);
    }
    PauliPair next() { return PauliPair::from_index(next_index()); }

   private:
    static constexpr uint64_t kBlock = 6568408355712890625ULL;  // 15^16
    RandomSource& rng_;
    uint64_t digits_ = 0;
    unsigned left_ = 0;
};

/// Number of n-qubit Pauli strings of weight `weight`: 3^weight * C(n, weight).
BigInt weight_class_count(unsigned n, unsigned weight);

BigInt binomial(unsigned n, unsigned k);

}  // namespace scrambling
