#include "scrambling/clifford_group.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace scrambling {
namespace {

constexpr std::array<LocalPauli, 4> kIdentityImages = {1, 2, 4, 8};

// Exponent of i in P(x1,z1) P(x2,z2) = i^g P(x1^x2, z1^z2), single qubit.
int single_qubit_phase(unsigned x1, unsigned z1, unsigned x2, unsigned z2) {
    if (x1 && z1) {
        return static_cast<int>(z2) - static_cast<int>(x2);
    }
    if (x1) {
        return static_cast<int>(z2) * (2 * static_cast<int>(x2) - 1);
    }
    if (z1) {
        return static_cast<int>(x2) * (1 - 2 * static_cast<int>(z2));
    }
    return 0;
}

int local_product_phase(LocalPauli u, LocalPauli w) {
    return single_qubit_phase(u & 1, (u >> 1) & 1, w & 1, (w >> 1) & 1) +
           single_qubit_phase((u >> 2) & 1, (u >> 3) & 1, (w >> 2) & 1, (w >> 3) & 1);
}

bool is_symplectic_basis(const std::array<LocalPauli, 4>& g) {
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            unsigned expected = (i == 0 && j == 1) || (i == 2 && j == 3);
            if (local_symplectic_product(g[i], g[j]) != expected) {
                return false;
            }
        }
    }
    return true;
}

uint16_t pack(const std::array<LocalPauli, 4>& g) {
    return static_cast<uint16_t>(g[0] | (g[1] << 4) | (g[2] << 8) | (g[3] << 12));
}

TwoQubitCliffordAction make_action(const std::array<LocalPauli, 4>& g, uint8_t signs) {
    TwoQubitCliffordAction act;
    act.generator_images = g;
    act.generator_signs = signs;
    for (unsigned v = 0; v < 16; ++v) {
        // P(v) = i^{x_a z_a + x_b z_b} X_a^{x_a} Z_a^{z_a} X_b^{x_b} Z_b^{z_b}
        int phase = static_cast<int>((v & 1) & ((v >> 1) & 1)) + static_cast<int>(((v >> 2) & 1) & ((v >> 3) & 1));
        LocalPauli acc = 0;
        for (unsigned k = 0; k < 4; ++k) {
            if ((v >> k) & 1) {
                phase += local_product_phase(acc, g[k]);
                phase += 2 * ((signs >> k) & 1);
                acc ^= g[k];
            }
        }
        phase = ((phase % 4) + 4) % 4;
        if (phase & 1) {
            throw std::logic_error("Clifford image of a Hermitian Pauli is not Hermitian");
        }
        act.image[v] = acc;
        act.sign[v] = static_cast<uint8_t>(phase >> 1);
    }
    std::array<uint8_t, 16> anf = act.sign;
    for (unsigned bit = 0; bit < 4; ++bit) {
        for (unsigned m = 0; m < 16; ++m) {
            if ((m >> bit) & 1) {
                anf[m] ^= anf[m ^ (1u << bit)];
            }
        }
    }
    for (unsigned m = 0; m < 16; ++m) {
        act.sign_anf |= static_cast<uint16_t>(anf[m] << m);
    }
    for (unsigned out = 0; out < 4; ++out) {
        for (unsigned k = 0; k < 4; ++k) {
            act.column_mask[out] |= static_cast<uint8_t>(((g[k] >> out) & 1) << k);
        }
    }
    return act;
}

}  // namespace

TwoQubitCliffordTable::TwoQubitCliffordTable() : symplectic_index_(1 << 16, -1) {
    std::vector<std::array<LocalPauli, 4>> bases;
    std::array<LocalPauli, 4> g{};
    for (g[0] = 1; g[0] < 16; ++g[0]) {
        for (g[1] = 1; g[1] < 16; ++g[1]) {
            for (g[2] = 1; g[2] < 16; ++g[2]) {
                for (g[3] = 1; g[3] < 16; ++g[3]) {
                    if (is_symplectic_basis(g)) {
                        bases.push_back(g);
                    }
                }
            }
        }
    }
    auto key = [](const std::array<LocalPauli, 4>& b) {
        std::array<LocalPauli, 4> k{};
        for (int i = 0; i < 4; ++i) {
            k[i] = b[i] ^ kIdentityImages[i];
        }
        return k;
    };
    std::sort(bases.begin(), bases.end(), [&](const auto& lhs, const auto& rhs) { return key(lhs) < key(rhs); });
    if (bases.size() * 16 != kTwoQubitCliffordCount) {
        throw std::logic_error("symplectic enumeration produced " + std::to_string(bases.size()) + " matrices");
    }
    actions_.reserve(kTwoQubitCliffordCount);
    for (size_t s = 0; s < bases.size(); ++s) {
        symplectic_index_[pack(bases[s])] = static_cast<int32_t>(s);
        for (uint8_t signs = 0; signs < 16; ++signs) {
            actions_.push_back(make_action(bases[s], signs));
        }
    }
}

const TwoQubitCliffordTable& TwoQubitCliffordTable::instance() {
    static const TwoQubitCliffordTable table;
    return table;
}

const TwoQubitCliffordAction& TwoQubitCliffordTable::operator[](uint32_t clifford_id) const {
    if (clifford_id >= actions_.size()) {
        throw std::out_of_range("clifford_id " + std::to_string(clifford_id) + " outside [0, 11520)");
    }
    return actions_[clifford_id];
}

uint32_t TwoQubitCliffordTable::id_of(const std::array<LocalPauli, 4>& generator_images,
                                      uint8_t generator_signs) const {
    for (auto img : generator_images) {
        if (img == 0 || img > 15) {
            throw std::invalid_argument("generator image must be a non-identity local Pauli");
        }
    }
    int32_t s = symplectic_index_[pack(generator_images)];
    if (s < 0) {
        throw std::invalid_argument("generator images do not form a symplectic basis");
    }
    return static_cast<uint32_t>(s) * 16 + (generator_signs & 15);
}

uint32_t named_clifford_id(NamedGate gate) {
    const auto& table = TwoQubitCliffordTable::instance();
    switch (gate) {
        case NamedGate::Identity:
            return table.id_of({1, 2, 4, 8}, 0);
        case NamedGate::H0:
            return table.id_of({2, 1, 4, 8}, 0);
        case NamedGate::H1:
            return table.id_of({1, 2, 8, 4}, 0);
        case NamedGate::S0:
            return table.id_of({3, 2, 4, 8}, 0);
        case NamedGate::S1:
            return table.id_of({1, 2, 12, 8}, 0);
        case NamedGate::CNOT01:
            return table.id_of({5, 2, 4, 10}, 0);
        case NamedGate::CNOT10:
            return table.id_of({1, 10, 5, 8}, 0);
        case NamedGate::CZ:
            return table.id_of({9, 2, 6, 8}, 0);
        case NamedGate::SWAP:
            return table.id_of({4, 8, 1, 2}, 0);
        case NamedGate::X0:
            return table.id_of({1, 2, 4, 8}, 0b0010);
        case NamedGate::Z0:
            return table.id_of({1, 2, 4, 8}, 0b0001);
    }
    throw std::invalid_argument("unknown named gate");
}

}  // namespace scrambling
