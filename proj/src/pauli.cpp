#include "scrambling/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace scrambling {

char letter_char(Letter p) {
    constexpr char chars[] = {'I', 'X', 'Y', 'Z'};
    return chars[static_cast<int>(p)];
}

Letter letter_from_char(char c) {
    switch (c) {
        case 'I':
        case '_':
            return Letter::I;
        case 'X':
            return Letter::X;
        case 'Y':
            return Letter::Y;
        case 'Z':
            return Letter::Z;
        default:
            throw std::invalid_argument(std::string("not a Pauli letter: '") + c + "'");
    }
}

PauliString::PauliString(size_t n) : n_(n), xs_((n + 63) / 64, 0), zs_((n + 63) / 64, 0) {}

PauliString PauliString::from_string(std::string_view letters) {
    PauliString p(letters.size());
    for (size_t q = 0; q < letters.size(); ++q) {
        p.set(q, letter_from_char(letters[q]));
    }
    return p;
}

Letter PauliString::get(size_t q) const { return letter_from_bits(x(q), z(q)); }

void PauliString::set(size_t q, Letter p) {
    uint64_t bit = uint64_t{1} << (q & 63);
    auto& xw = xs_[q >> 6];
    auto& zw = zs_[q >> 6];
    xw = letter_x(p) ? (xw | bit) : (xw & ~bit);
    zw = letter_z(p) ? (zw | bit) : (zw & ~bit);
}

size_t PauliString::weight() const {
    size_t w = 0;
    for (size_t k = 0; k < xs_.size(); ++k) {
        w += std::popcount(xs_[k] | zs_[k]);
    }
    return w;
}

std::vector<size_t> PauliString::support() const {
    std::vector<size_t> out;
    for (size_t k = 0; k < xs_.size(); ++k) {
        uint64_t w = xs_[k] | zs_[k];
        while (w) {
            out.push_back(64 * k + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return out;
}

bool PauliString::commutes(const PauliString& other) const {
    if (other.n_ != n_) {
        throw std::invalid_argument("commutes: qubit count mismatch");
    }
    unsigned parity = 0;
    for (size_t k = 0; k < xs_.size(); ++k) {
        parity ^= std::popcount((xs_[k] & other.zs_[k]) ^ (zs_[k] & other.xs_[k])) & 1;
    }
    return parity == 0;
}

std::string PauliString::str() const {
    std::string s(n_, 'I');
    for (size_t q = 0; q < n_; ++q) {
        s[q] = letter_char(get(q));
    }
    return s;
}

PauliPair gate_transition(PauliPair pair, RandomSource& rng) {
    if (pair.is_identity()) {
        return pair;
    }
    return PauliPair::from_index(static_cast<uint8_t>(1 + rng.uniform_below32(15)));
}

BigInt binomial(unsigned n, unsigned k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    BigInt result = 1;
    for (unsigned i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

BigInt weight_class_count(unsigned n, unsigned weight) {
    if (weight > n) {
        throw std::out_of_range("weight_class_count: weight " + std::to_string(weight) + " exceeds n=" +
                                std::to_string(n));
    }
    return boost::multiprecision::pow(BigInt(3), weight) * binomial(n, weight);
}

}  // namespace scrambling
